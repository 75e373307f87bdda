#pragma once

#include "gflow/lagrangian.hpp"

namespace gflow {

struct NotOnConstraintError : std::runtime_error {
    explicit NotOnConstraintError(double residual_)
        : std::runtime_error("element is not on the constraint manifold (residual " +
                             std::to_string(residual_) + ")"),
          residual(residual_) {}
    double residual;
};

// Lie-algebra distribution spanned by the columns of basis; covectors restrict
// to it through the transpose.
struct ConstraintDistribution {
    Matrix basis; // algebra_dim x k, full column rank

    Matrix dual_projection() const { return basis.transpose(); }
    int dim() const { return static_cast<int>(basis.cols()); }
};

// Constraint submanifold of the group, given by a residual function and a
// global parametrization chart of the same dimension as the distribution.
struct ConstraintManifold {
    VectorFieldPtr residual; // element -> R^m, zero on the manifold
    VectorFieldPtr chart;    // R^k -> element
    int chart_dim = 0;
};

struct NonholonomicSystem {
    DiscreteLagrangian lagrangian;
    ConstraintManifold constraint_manifold;
    ConstraintDistribution distribution;
};

struct SleighParams {
    double m = 1.0, a = 0.0, b = 0.0, J = 1.0;

    void validate() const {
        if (!(m > 0.0) || !(J > 0.0))
            throw std::invalid_argument("SleighParams: m and J must be positive");
    }
};

double constraint_residual(const NonholonomicSystem& sys, const Vector& g);

// Restricted discrete Legendre transform: the full transform followed by the
// projection onto D_c coordinates. Throws NotOnConstraintError when the
// membership residual is >= 1e-8.
Vector nh_legendre(const NonholonomicSystem& sys, const Vector& g, LegendreSide side);

Vector nh_del_residual(const NonholonomicSystem& sys, const Vector& g, const Vector& h);

struct NhEvolveResult {
    bool ok = false;
    Vector element;
    Vector chart_params;
    std::vector<Vector> roots; // all converged chart-parameter roots, nearest first
    bool multiple_roots = false;
    double residual_inf = std::numeric_limits<double>::infinity();
};

// One nonholonomic step: solves the restricted DEL equations in the chart
// parameters of the successor. Several deterministic seeds around the supplied
// one are tried; distinct converged roots are all reported and the nearest to
// the seed wins.
NhEvolveResult nh_evolve(const NonholonomicSystem& sys, const Vector& g,
                         const Vector& seed_element, const TolerancePolicy& tol = {});

// The discrete Chaplygin sleigh on SE(2).
NonholonomicSystem sleigh_system(const SleighParams& params);

// Cotangent SE(2) with source/target replaced by their D_c restrictions, for
// running the generic classification on restricted systems.
RealizationPtr restricted_cotangent_se2(const ConstraintDistribution& dc);

// S_(L,Mc) = dL(Mc) as a PARAMETRIZED equation on the restricted realization.
ImplicitEquation build_S_LMc(const NonholonomicSystem& sys);

} // namespace gflow
