#pragma once

#include <stdexcept>

namespace gflow {

// Numerical policy shared by rank decisions, root finding and set comparisons.
// Rank cutoffs are relative to the largest singular value; the remaining
// tolerances are absolute on well-scaled (orthonormal-row) residuals.
struct TolerancePolicy {
    double rank_rel_tol = 1e-9;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double set_eq_tol = 1e-8;

    void validate() const {
        if (!(rank_rel_tol > 0.0) || !(newton_tol > 0.0) || !(set_eq_tol > 0.0) ||
            newton_max_iter <= 0) {
            throw std::invalid_argument("TolerancePolicy: all tolerances must be strictly positive");
        }
    }
};

} // namespace gflow
