#pragma once

#include "gflow/dynamics.hpp"
#include "gflow/se2.hpp"

namespace gflow {

// A discrete Lagrangian: a scalar function on the elements of a pair groupoid
// or of SE(2), differentiable through dual numbers.
struct DiscreteLagrangian {
    RealizationPtr realization;
    ScalarFieldPtr function;

    double value(const Vector& g) const;
    Vector gradient(const Vector& g) const;
};

// Cotangent groupoid realization matching a base realization's chart.
RealizationPtr cotangent_realization(const GroupoidRealization& G);

enum class LegendreSide { Minus, Plus };

// A point of A*G: base point plus fiber covector. For SE(2) the base is the
// single point (empty vector) and the covector lives in se(2)*.
struct LegendreValue {
    Vector base;
    Vector covector;
};

namespace detail {

// Fiber coordinates of the discrete Legendre transforms at scalar level S.
// Minus is the source projection of dL, Plus the target projection; for SE(2)
// they are the right/left translation derivatives of L.
template <class S>
std::vector<S> legendre_covector(const DiscreteLagrangian& L, std::span<const S> g,
                                 LegendreSide side) {
    auto grad = field_gradient<S>(*L.function, g);
    const auto& G = *L.realization;
    if (G.kind == GroupoidKind::PairGroupoid) {
        const std::size_t n = static_cast<std::size_t>(G.pair_n);
        std::vector<S> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = side == LegendreSide::Minus ? -grad[i] : grad[n + i];
        return out;
    }
    if (G.kind == GroupoidKind::SE2Group) {
        std::array<S, 3> gc{g[0], g[1], g[2]};
        std::vector<S> out(3);
        for (int j = 0; j < 3; ++j) {
            auto v = side == LegendreSide::Minus ? se2_right_basis_derivative(gc, j)
                                                 : se2_left_basis_derivative(gc, j);
            out[static_cast<std::size_t>(j)] = grad[0] * v[0] + grad[1] * v[1] + grad[2] * v[2];
        }
        return out;
    }
    throw std::logic_error("legendre: unsupported realization");
}

} // namespace detail

// dL(g) in the cotangent chart: element coordinates followed by the gradient.
Vector differential(const DiscreteLagrangian& L, const Vector& g);
VectorFieldPtr differential_field(const DiscreteLagrangian& L);

LegendreValue legendre(const DiscreteLagrangian& L, const Vector& g, LegendreSide side);

// F+L(g) - F-L(h) in fiber coordinates; zero exactly on solutions of the
// discrete Euler-Lagrange equations. Throws NotComposableError.
Vector del_residual(const DiscreteLagrangian& L, const Vector& g, const Vector& h);

struct EvolveResult {
    enum class Status { Ok, Singular, Failure };
    Status status = Status::Failure;
    Vector element;
    double residual_inf = std::numeric_limits<double>::infinity();
    double min_singular_value = 0.0;

    bool ok() const { return status == Status::Ok; }
};

// One step of the discrete Lagrangian evolution operator: solves the DEL
// equations for the successor of g, with the second-order condition built into
// the unknowns. Regularity of the Legendre map is checked at the seed.
EvolveResult evolve(const DiscreteLagrangian& L, const Vector& g, const TolerancePolicy& tol = {});

struct HamiltonianEvolveResult {
    EvolveResult::Status status = EvolveResult::Status::Failure;
    LegendreValue value;
    Vector element; // the recovered element (F-L)^{-1}(p)
    double residual_inf = std::numeric_limits<double>::infinity();
    double min_singular_value = 0.0;

    bool ok() const { return status == EvolveResult::Status::Ok; }
};

// Discrete Hamiltonian evolution operator F+L o (F-L)^{-1}, inverting the
// minus Legendre transform by Gauss-Newton from the supplied seed.
HamiltonianEvolveResult hamiltonian_evolution(const DiscreteLagrangian& L, const LegendreValue& p,
                                              const Vector& seed, const TolerancePolicy& tol = {});

// S_L = dL(G) as a PARAMETRIZED implicit difference equation on the cotangent
// groupoid, ready for classify_point.
ImplicitEquation build_SL(const DiscreteLagrangian& L);

struct HamiltonianSystem {
    int dof = 1;        // Q = R^dof, phase space R^{2 dof} with chart (q, p)
    ScalarFieldPtr hamiltonian;
    double step = 0.01; // default integration step hint

    Matrix symplectic_matrix() const; // [[0, I], [-I, 0]]
};

// Classical fourth-order one-step integration of zdot = Omega grad H.
std::vector<Vector> hamiltonian_flow(const HamiltonianSystem& HS, const Vector& z0, double t,
                                     int steps);

// Time-t Lagrangian set generated by the flow, sampled over a grid of (q, p)
// points: emits (q, psi1_t(q,p), -p, psi2_t(q,p)) in the cotangent pair chart.
std::vector<Vector> flow_lagrangian_set(const HamiltonianSystem& HS, double t,
                                        std::span<const Vector> grid, int steps);

} // namespace gflow
