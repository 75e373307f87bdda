#pragma once

#include "gflow/fields.hpp"
#include "gflow/linalg.hpp"
#include "gflow/tolerance.hpp"

namespace gflow {

// Outcome of a damped Gauss-Newton solve. On failure the last residual norm
// is retained so callers can distinguish "nearly there" from "nowhere close".
struct GaussNewtonResult {
    bool ok = false;
    Vector x;
    double residual_inf = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

// Pseudo-inverse steps with a halving line search; no trust region. The
// systems solved here are tiny, so robustness comes from the SVD cutoff.
GaussNewtonResult gauss_newton(const VectorField& F, const Vector& x0,
                               const TolerancePolicy& tol = {});

} // namespace gflow
