#include "gflow/nonholonomic.hpp"

#include <algorithm>
#include <numbers>

namespace gflow {

namespace {

constexpr double kMcMembershipTol = 1e-8;

Vector chart_params_of(const Vector& g) {
    // The sleigh chart is (theta, u) -> (theta, u, u tan(theta/2)), so the
    // parameters of an on-manifold element are its first two coordinates.
    Vector p(2);
    p << g[0], g[1];
    return p;
}

template <class S>
std::vector<S> project_to_dc(const Matrix& basis_t, const std::vector<S>& covector) {
    std::vector<S> out(static_cast<std::size_t>(basis_t.rows()), S(0));
    for (Eigen::Index i = 0; i < basis_t.rows(); ++i) {
        S acc = S(0);
        for (Eigen::Index j = 0; j < basis_t.cols(); ++j)
            acc = acc + basis_t(i, j) * covector[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

} // namespace

double constraint_residual(const NonholonomicSystem& sys, const Vector& g) {
    return inf_norm(field_value(*sys.constraint_manifold.residual, g));
}

Vector nh_legendre(const NonholonomicSystem& sys, const Vector& g, LegendreSide side) {
    const double res = constraint_residual(sys, g);
    if (!(res < kMcMembershipTol)) throw NotOnConstraintError(res);
    std::vector<double> p(g.data(), g.data() + g.size());
    auto cov = detail::legendre_covector<double>(sys.lagrangian, std::span<const double>(p), side);
    return to_vector(project_to_dc(Matrix(sys.distribution.dual_projection()), cov));
}

Vector nh_del_residual(const NonholonomicSystem& sys, const Vector& g, const Vector& h) {
    return nh_legendre(sys, g, LegendreSide::Plus) - nh_legendre(sys, h, LegendreSide::Minus);
}

NhEvolveResult nh_evolve(const NonholonomicSystem& sys, const Vector& g,
                         const Vector& seed_element, const TolerancePolicy& tol) {
    NhEvolveResult out;
    const Vector plus_g = nh_legendre(sys, g, LegendreSide::Plus);
    const Matrix basis_t = sys.distribution.dual_projection();
    const int k = sys.constraint_manifold.chart_dim;

    auto residual = make_vector_field<1>(
        k, static_cast<int>(plus_g.size()),
        [&sys, plus_g, basis_t](auto u) {
            using S = std::remove_cv_t<typename decltype(u)::element_type>;
            auto h = sys.constraint_manifold.chart->eval(u);
            auto minus = detail::legendre_covector<S>(sys.lagrangian, std::span<const S>(h),
                                                      LegendreSide::Minus);
            auto proj = project_to_dc(basis_t, minus);
            std::vector<S> r(proj.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] = plus_g[static_cast<Eigen::Index>(i)] - proj[i];
            return r;
        });

    const Vector seed = chart_params_of(seed_element);
    // The restricted equations admit branch pairs (e.g. matching sines), so a
    // reflected seed and two angle perturbations are tried as well.
    std::vector<Vector> seeds{seed};
    Vector flipped = seed;
    flipped[0] = wrap_angle(std::numbers::pi - seed[0]);
    seeds.push_back(flipped);
    for (double d : {0.4, -0.4}) {
        Vector s = seed;
        s[0] = wrap_angle(s[0] + d);
        seeds.push_back(s);
    }

    std::vector<Vector> roots;
    for (const Vector& s : seeds) {
        auto gn = gauss_newton(*residual, s, tol);
        if (!gn.ok) continue;
        const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const Vector& r) {
            return inf_norm(Vector(r - gn.x)) < 1e-6;
        });
        if (!duplicate) roots.push_back(gn.x);
    }
    if (roots.empty()) return out;

    std::stable_sort(roots.begin(), roots.end(), [&](const Vector& a, const Vector& b) {
        return inf_norm(Vector(a - seed)) < inf_norm(Vector(b - seed));
    });
    out.ok = true;
    out.roots = roots;
    out.multiple_roots = roots.size() > 1;
    out.chart_params = roots.front();
    out.element = field_value(*sys.constraint_manifold.chart, roots.front());
    out.residual_inf = inf_norm(Vector(plus_g - nh_legendre(sys, out.element, LegendreSide::Minus)));
    return out;
}

NonholonomicSystem sleigh_system(const SleighParams& params) {
    params.validate();
    const double m = params.m, a = params.a, b = params.b, J = params.J;

    NonholonomicSystem sys;
    sys.lagrangian.realization = make_se2_group();
    sys.lagrangian.function = make_scalar_field(3, [m, a, b, J](auto g) {
        const auto& th = g[0];
        const auto& x = g[1];
        const auto& y = g[2];
        return (m * a * x + m * b * y - m * a * a - m * b * b - J) * cos(th) +
               m * (a * y - b * x) * sin(th) +
               0.5 * m * ((x - a) * (x - a) + (y - b) * (y - b)) + 0.5 * (J - m);
    });

    sys.constraint_manifold.chart_dim = 2;
    sys.constraint_manifold.residual = make_vector_field(3, 1, [](auto g) {
        using S = std::remove_cv_t<typename decltype(g)::element_type>;
        return std::vector<S>{(1.0 - cos(g[0])) * g[1] - g[2] * sin(g[0])};
    });
    sys.constraint_manifold.chart = make_vector_field(2, 3, [](auto u) {
        using S = std::remove_cv_t<typename decltype(u)::element_type>;
        return std::vector<S>{u[0], u[1], u[1] * tan(u[0] * 0.5)};
    });

    Matrix basis(3, 2); // span{e, e1}
    basis << 1.0, 0.0,
             0.0, 1.0,
             0.0, 0.0;
    sys.distribution.basis = basis;
    return sys;
}

RealizationPtr restricted_cotangent_se2(const ConstraintDistribution& dc) {
    RealizationPtr ct = make_cotangent_se2();
    auto G = std::make_shared<GroupoidRealization>(*ct);
    G->kind = GroupoidKind::Restricted;
    G->base_dim = dc.dim();
    G->is_affine = false;
    const Matrix basis_t = dc.dual_projection();
    G->source = make_vector_field(6, dc.dim(), [ct, basis_t](auto z) {
        auto full = ct->source->eval(z);
        return project_to_dc(basis_t, full);
    });
    G->target = make_vector_field(6, dc.dim(), [ct, basis_t](auto z) {
        auto full = ct->target->eval(z);
        return project_to_dc(basis_t, full);
    });
    return G;
}

ImplicitEquation build_S_LMc(const NonholonomicSystem& sys) {
    RealizationPtr R = restricted_cotangent_se2(sys.distribution);
    const int k = sys.constraint_manifold.chart_dim;

    ImplicitEquation::ParametrizedData data;
    data.psi = make_vector_field<1>(k, 6, [sys](auto u) {
        using S = std::remove_cv_t<typename decltype(u)::element_type>;
        auto g = sys.constraint_manifold.chart->eval(u);
        auto grad = field_gradient<S>(*sys.lagrangian.function, std::span<const S>(g));
        std::vector<S> out(g.begin(), g.end());
        out.insert(out.end(), grad.begin(), grad.end());
        return out;
    });
    data.membership = make_vector_field<1>(6, 4, [sys](auto z) {
        using S = std::remove_cv_t<typename decltype(z)::element_type>;
        std::span<const S> g(z.data(), 3);
        auto mc = sys.constraint_manifold.residual->eval(g);
        auto grad = field_gradient<S>(*sys.lagrangian.function, g);
        std::vector<S> r(mc.begin(), mc.end());
        for (std::size_t i = 0; i < 3; ++i) r.push_back(z[3 + i] - grad[i]);
        return r;
    });
    data.chart_params = [](const Vector& z) {
        Vector p(2);
        p << z[0], z[1];
        return p;
    };
    return ImplicitEquation::parametrized(std::move(R), std::move(data));
}

} // namespace gflow
