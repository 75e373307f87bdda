#include "gflow/lagrangian.hpp"

namespace gflow {

namespace {

void check_kind(const GroupoidRealization& G, const char* what) {
    if (G.kind != GroupoidKind::PairGroupoid && G.kind != GroupoidKind::SE2Group)
        throw std::invalid_argument(std::string(what) +
                                    ": expected a pair groupoid or SE(2) realization");
}

int fiber_dim(const GroupoidRealization& G) {
    return G.kind == GroupoidKind::PairGroupoid ? G.pair_n : 3;
}

// Element of G from the evolution unknowns: on the pair groupoid h = (q1, u),
// so alpha(h) = beta(g) holds by construction; on SE(2) all pairs compose.
template <class S>
std::vector<S> assemble_successor(const GroupoidRealization& G, const Vector& g,
                                  std::span<const S> u) {
    if (G.kind == GroupoidKind::PairGroupoid) {
        const int n = G.pair_n;
        std::vector<S> h;
        h.reserve(static_cast<std::size_t>(2 * n));
        for (int i = 0; i < n; ++i) h.push_back(scalar_cast<S>(g[n + i]));
        for (int i = 0; i < n; ++i) h.push_back(u[static_cast<std::size_t>(i)]);
        return h;
    }
    return std::vector<S>(u.begin(), u.end());
}

template <class S>
std::vector<S> assemble_with_base(const Vector& base, std::span<const S> u) {
    std::vector<S> h;
    h.reserve(static_cast<std::size_t>(base.size()) + u.size());
    for (Eigen::Index i = 0; i < base.size(); ++i) h.push_back(scalar_cast<S>(base[i]));
    h.insert(h.end(), u.begin(), u.end());
    return h;
}

std::pair<double, double> singular_range(const VectorField& F, const Vector& at) {
    Matrix J = field_jacobian(F, at);
    Eigen::JacobiSVD<Matrix> svd(J);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0) return {0.0, 0.0};
    return {sv[sv.size() - 1], sv[0]};
}

} // namespace

double DiscreteLagrangian::value(const Vector& g) const {
    std::vector<double> p(g.data(), g.data() + g.size());
    return function->eval(std::span<const double>(p));
}

Vector DiscreteLagrangian::gradient(const Vector& g) const {
    return field_gradient(*function, g);
}

RealizationPtr cotangent_realization(const GroupoidRealization& G) {
    switch (G.kind) {
    case GroupoidKind::PairGroupoid: return make_cotangent_pair_groupoid(G.pair_n);
    case GroupoidKind::SE2Group: return make_cotangent_se2();
    default:
        throw std::invalid_argument("cotangent_realization: unsupported base realization");
    }
}

Vector differential(const DiscreteLagrangian& L, const Vector& g) {
    check_kind(*L.realization, "differential");
    Vector out(2 * g.size());
    out << g, L.gradient(g);
    return out;
}

VectorFieldPtr differential_field(const DiscreteLagrangian& L) {
    check_kind(*L.realization, "differential_field");
    const int ed = L.realization->element_dim;
    return make_vector_field<1>(ed, 2 * ed, [L](auto g) {
        using S = std::remove_cv_t<typename decltype(g)::element_type>;
        auto grad = field_gradient<S>(*L.function, g);
        std::vector<S> out(g.begin(), g.end());
        out.insert(out.end(), grad.begin(), grad.end());
        return out;
    });
}

LegendreValue legendre(const DiscreteLagrangian& L, const Vector& g, LegendreSide side) {
    check_kind(*L.realization, "legendre");
    std::vector<double> p(g.data(), g.data() + g.size());
    auto cov = detail::legendre_covector<double>(L, std::span<const double>(p), side);
    LegendreValue out;
    out.covector = to_vector(cov);
    const auto& G = *L.realization;
    if (G.kind == GroupoidKind::PairGroupoid)
        out.base = side == LegendreSide::Minus ? g.head(G.pair_n) : g.tail(G.pair_n);
    else
        out.base = Vector::Zero(0);
    return out;
}

Vector del_residual(const DiscreteLagrangian& L, const Vector& g, const Vector& h) {
    const auto& G = *L.realization;
    const double mismatch = G.composability_mismatch(g, h);
    if (!(mismatch < G.compose_tol)) throw NotComposableError(mismatch);
    return legendre(L, g, LegendreSide::Plus).covector -
           legendre(L, h, LegendreSide::Minus).covector;
}

EvolveResult evolve(const DiscreteLagrangian& L, const Vector& g, const TolerancePolicy& tol) {
    check_kind(*L.realization, "evolve");
    const auto& G = *L.realization;
    EvolveResult res;

    Vector seed;
    if (G.kind == GroupoidKind::PairGroupoid) {
        const int n = G.pair_n;
        seed = 2.0 * g.tail(n) - g.head(n); // constant-velocity warm start
    } else {
        seed = g;
    }

    auto minus_map = make_vector_field<1>(
        static_cast<int>(seed.size()), fiber_dim(G), [&L, &G, g](auto u) {
            using S = std::remove_cv_t<typename decltype(u)::element_type>;
            auto h = assemble_successor(G, g, u);
            return detail::legendre_covector<S>(L, std::span<const S>(h), LegendreSide::Minus);
        });

    auto [smin, smax] = singular_range(*minus_map, seed);
    res.min_singular_value = smin;
    if (smax == 0.0 || smin < tol.rank_rel_tol * smax) {
        res.status = EvolveResult::Status::Singular;
        return res;
    }

    const Vector plus_g = legendre(L, g, LegendreSide::Plus).covector;
    auto residual = make_vector_field<1>(
        static_cast<int>(seed.size()), static_cast<int>(plus_g.size()),
        [minus_map, plus_g](auto u) {
            using S = std::remove_cv_t<typename decltype(u)::element_type>;
            auto minus = minus_map->eval(u);
            std::vector<S> r(minus.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] = plus_g[static_cast<Eigen::Index>(i)] - minus[i];
            return r;
        });

    auto gn = gauss_newton(*residual, seed, tol);
    res.residual_inf = gn.residual_inf;
    if (!gn.ok) {
        res.status = EvolveResult::Status::Failure;
        return res;
    }
    std::vector<double> u(gn.x.data(), gn.x.data() + gn.x.size());
    res.element = to_vector(assemble_successor<double>(G, g, std::span<const double>(u)));
    res.status = EvolveResult::Status::Ok;
    return res;
}

HamiltonianEvolveResult hamiltonian_evolution(const DiscreteLagrangian& L, const LegendreValue& p,
                                              const Vector& seed, const TolerancePolicy& tol) {
    check_kind(*L.realization, "hamiltonian_evolution");
    HamiltonianEvolveResult res;
    const Vector base = p.base;

    auto minus_map = make_vector_field<1>(
        static_cast<int>(seed.size()), static_cast<int>(p.covector.size()),
        [&L, base](auto u) {
            using S = std::remove_cv_t<typename decltype(u)::element_type>;
            auto h = assemble_with_base(base, u);
            return detail::legendre_covector<S>(L, std::span<const S>(h), LegendreSide::Minus);
        });

    auto [smin, smax] = singular_range(*minus_map, seed);
    res.min_singular_value = smin;
    if (smax == 0.0 || smin < tol.rank_rel_tol * smax) {
        res.status = EvolveResult::Status::Singular;
        return res;
    }

    auto residual = make_vector_field<1>(
        static_cast<int>(seed.size()), static_cast<int>(p.covector.size()),
        [minus_map, target = p.covector](auto u) {
            using S = std::remove_cv_t<typename decltype(u)::element_type>;
            auto minus = minus_map->eval(u);
            std::vector<S> r(minus.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] = minus[i] - target[static_cast<Eigen::Index>(i)];
            return r;
        });

    auto gn = gauss_newton(*residual, seed, tol);
    res.residual_inf = gn.residual_inf;
    if (!gn.ok) {
        res.status = EvolveResult::Status::Failure;
        return res;
    }
    Vector element(base.size() + gn.x.size());
    element << base, gn.x;
    res.element = element;
    res.value = legendre(L, element, LegendreSide::Plus);
    res.status = EvolveResult::Status::Ok;
    return res;
}

ImplicitEquation build_SL(const DiscreteLagrangian& L) {
    check_kind(*L.realization, "build_SL");
    RealizationPtr CT = cotangent_realization(*L.realization);
    const int ed = L.realization->element_dim;

    ImplicitEquation::ParametrizedData data;
    data.psi = differential_field(L);
    data.membership = make_vector_field<1>(2 * ed, ed, [L, ed](auto z) {
        using S = std::remove_cv_t<typename decltype(z)::element_type>;
        std::span<const S> q(z.data(), static_cast<std::size_t>(ed));
        auto grad = field_gradient<S>(*L.function, q);
        std::vector<S> r(grad.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = z[static_cast<std::size_t>(ed) + i] - grad[i];
        return r;
    });
    data.chart_params = [ed](const Vector& z) { return Vector(z.head(ed)); };
    return ImplicitEquation::parametrized(std::move(CT), std::move(data));
}

Matrix HamiltonianSystem::symplectic_matrix() const {
    Matrix omega = Matrix::Zero(2 * dof, 2 * dof);
    omega.block(0, dof, dof, dof) = Matrix::Identity(dof, dof);
    omega.block(dof, 0, dof, dof) = -Matrix::Identity(dof, dof);
    return omega;
}

std::vector<Vector> hamiltonian_flow(const HamiltonianSystem& HS, const Vector& z0, double t,
                                     int steps) {
    if (steps < 1) throw std::invalid_argument("hamiltonian_flow: steps must be >= 1");
    if (z0.size() != 2 * HS.dof)
        throw std::invalid_argument("hamiltonian_flow: state dimension mismatch");
    const int n = HS.dof;
    auto rhs = [&](const Vector& z) {
        Vector dH = field_gradient(*HS.hamiltonian, z);
        Vector f(2 * n);
        f.head(n) = dH.tail(n);
        f.tail(n) = -dH.head(n);
        return f;
    };
    const double dt = t / steps;
    std::vector<Vector> traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(z0);
    Vector z = z0;
    for (int k = 0; k < steps; ++k) {
        Vector k1 = rhs(z);
        Vector k2 = rhs(z + 0.5 * dt * k1);
        Vector k3 = rhs(z + 0.5 * dt * k2);
        Vector k4 = rhs(z + dt * k3);
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.push_back(z);
    }
    return traj;
}

std::vector<Vector> flow_lagrangian_set(const HamiltonianSystem& HS, double t,
                                        std::span<const Vector> grid, int steps) {
    const int n = HS.dof;
    std::vector<Vector> points;
    points.reserve(grid.size());
    for (const Vector& z0 : grid) {
        if (z0.size() != 2 * n)
            throw std::invalid_argument("flow_lagrangian_set: grid point dimension mismatch");
        Vector zt = hamiltonian_flow(HS, z0, t, steps).back();
        Vector pt(4 * n);
        pt << z0.head(n), zt.head(n), -z0.tail(n), zt.tail(n);
        points.push_back(pt);
    }
    return points;
}

} // namespace gflow
