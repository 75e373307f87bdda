#include "doctest.h"

#include <numbers>

#include "gflow/nonholonomic.hpp"
#include "test_helpers.hpp"

using namespace gflow;
using namespace gftest;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// The two displayed discrete Euler-Poincare-Suslov equations, coded verbatim
// as an oracle: returns (lhs - rhs) for the e1* and e* components.
Vector eps_equations(const SleighParams& P, const Vector& g1, const Vector& g2) {
    const double m = P.m, a = P.a, b = P.b, J = P.J;
    const double th1 = g1[0], x1 = g1[1], y1 = g1[2];
    const double th2 = g2[0], x2 = g2[1], y2 = g2[2];
    Vector r(2);
    r[0] = (-m * a * std::cos(th1) - m * b * std::sin(th1) + m * a + m * x1 * std::cos(th1) +
            m * y1 * std::sin(th1)) -
           (m * x2 + m * a * std::cos(th2) - m * b * std::sin(th2) - m * a);
    r[1] = (m * (a * y1 - b * x1) * std::cos(th1) - m * (a * x1 + b * y1) * std::sin(th1) +
            (m * a * a + m * b * b + J) * std::sin(th1)) -
           (m * a * y2 - m * b * x2 + (m * a * a + m * b * b + J) * std::sin(th2));
    return r;
}

// Closed-form restricted projections from the displayed formulas.
Vector alpha_dc_closed(const Vector& g, const Vector& p) {
    return vec({p[0] - g[2] * p[1] + g[1] * p[2], p[1]});
}
Vector beta_dc_closed(const Vector& g, const Vector& p) {
    return vec({p[0], p[1] * std::cos(g[0]) + p[2] * std::sin(g[0])});
}

Vector mc_point(const NonholonomicSystem& sys, double theta, double u) {
    return field_value(*sys.constraint_manifold.chart, vec({theta, u}));
}

} // namespace

TEST_SUITE_BEGIN("nonholonomic");

TEST_CASE("sleigh Lagrangian: coordinate formula equals the trace formula") {
    SleighParams P{1.3, 0.4, -0.2, 0.8};
    auto sys = sleigh_system(P);
    Matrix JJ(3, 3);
    JJ << P.J / 2 + P.m * P.a * P.a, P.m * P.a * P.b, P.m * P.a,
          P.m * P.a * P.b, P.J / 2 + P.m * P.b * P.b, P.m * P.b,
          P.m * P.a, P.m * P.b, P.m;
    auto rng = make_rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        Vector g = random_vector(rng, 3);
        Matrix A = se2_homogeneous(SE2Element(g[0], g[1], g[2]));
        const double trace_form = 0.5 * (A * JJ * A.transpose()).trace() - (A * JJ).trace();
        CHECK(sys.lagrangian.value(g) == doctest::Approx(trace_form).epsilon(1e-10));
    }
    // both evaluations at the identity as a smoke check
    Vector e = vec({0.0, 0.0, 0.0});
    Matrix Ae = se2_homogeneous(SE2Element(0, 0, 0));
    CHECK(sys.lagrangian.value(e) ==
          doctest::Approx(0.5 * (Ae * JJ * Ae.transpose()).trace() - (Ae * JJ).trace()));
}

TEST_CASE("constraint manifold chart satisfies the membership identity") {
    auto sys = sleigh_system({1, 0, 0, 1});
    auto rng = make_rng(73);
    std::uniform_real_distribution<double> ang(-kPi + 0.05, kPi - 0.05);
    std::uniform_real_distribution<double> off(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vector g = mc_point(sys, ang(rng), off(rng));
        CHECK(constraint_residual(sys, g) < 1e-12);
    }
    // theta -> 0 limit of the chart hits the (0, x, 0) branch
    Vector g0 = mc_point(sys, 0.0, 1.7);
    CHECK(g0[1] == doctest::Approx(1.7));
    CHECK(g0[2] == doctest::Approx(0.0));
}

TEST_CASE("nh_legendre restriction at a flat point matches hand arithmetic") {
    // alpha~_Dc of the covector (3, 4, 5) at (0, 1, 2): (3 - 2*4 + 1*5, 4) = (0, 4).
    // The point (0, 1, 2) satisfies the displayed membership residual
    // (1 - cos 0) x - y sin 0 = 0 identically.
    auto sys = sleigh_system({1, 0, 0, 1});
    Vector g = vec({0.0, 1.0, 2.0});
    Vector p = vec({3.0, 4.0, 5.0});
    CHECK(inf_norm(Vector(alpha_dc_closed(g, p) - vec({0.0, 4.0}))) == 0.0);
    CHECK(inf_norm(Vector(beta_dc_closed(g, p) - vec({3.0, 4.0}))) == 0.0); // theta = 0

    // nh_legendre goes through dL: evaluate both routes at the same element.
    Vector grad = sys.lagrangian.gradient(g);
    Vector minus = nh_legendre(sys, g, LegendreSide::Minus);
    Vector plus = nh_legendre(sys, g, LegendreSide::Plus);
    CHECK(inf_norm(Vector(minus - alpha_dc_closed(g, grad))) < 1e-12);
    CHECK(inf_norm(Vector(plus - beta_dc_closed(g, grad))) < 1e-12);
}

TEST_CASE("nh_legendre rejects off-manifold points; identity element is two-sided") {
    auto sys = sleigh_system({1, 0.3, 0.1, 2.0});
    CHECK_THROWS_AS(nh_legendre(sys, vec({0.8, 1.0, 5.0}), LegendreSide::Minus),
                    NotOnConstraintError);
    // At the identity both restricted transforms reduce to the restricted dL.
    Vector e = vec({0.0, 0.0, 0.0});
    Vector minus = nh_legendre(sys, e, LegendreSide::Minus);
    Vector plus = nh_legendre(sys, e, LegendreSide::Plus);
    CHECK(inf_norm(Vector(minus - plus)) < 1e-12);
    Vector grad = sys.lagrangian.gradient(e);
    CHECK(minus[0] == doctest::Approx(grad[0]));
    CHECK(minus[1] == doctest::Approx(grad[1]));
}

TEST_CASE("restricted maps computed by AD equal the closed forms at random covectors") {
    auto sys = sleigh_system({1.7, 0.5, -0.3, 1.2});
    auto R = restricted_cotangent_se2(sys.distribution);
    auto rng = make_rng(79);
    for (int trial = 0; trial < 100; ++trial) {
        Vector z = random_vector(rng, 6);
        Vector g = z.head(3);
        Vector p = z.tail(3);
        Vector src = field_value(*R->source, z);
        Vector tgt = field_value(*R->target, z);
        CHECK(inf_norm(Vector(src - alpha_dc_closed(g, p))) < 1e-10);
        CHECK(inf_norm(Vector(tgt - beta_dc_closed(g, p))) < 1e-10);
    }
}

TEST_CASE("SE(2) legendre AD values match the displayed sleigh momenta") {
    SleighParams P{1.2, 0.35, -0.15, 0.9};
    auto sys = sleigh_system(P);
    auto rng = make_rng(81);
    const double m = P.m, a = P.a, b = P.b, J = P.J;
    for (int trial = 0; trial < 10; ++trial) {
        Vector g = random_vector(rng, 3);
        const double th = g[0], x = g[1], y = g[2];
        // displayed momenta of dL
        Vector p = vec({m * (a * y - b * x) * std::cos(th) +
                            (m * a * a + m * b * b + J - m * a * x - m * b * y) * std::sin(th),
                        m * a * std::cos(th) - m * b * std::sin(th) + m * (x - a),
                        m * b * std::cos(th) + m * a * std::sin(th) + m * (y - b)});
        auto minus = legendre(sys.lagrangian, g, LegendreSide::Minus);
        auto plus = legendre(sys.lagrangian, g, LegendreSide::Plus);
        // right/left pullbacks of the displayed momenta in closed form
        Vector minus_cf = vec({p[0] - y * p[1] + x * p[2], p[1], p[2]});
        Vector plus_cf = vec({p[0], p[1] * std::cos(th) + p[2] * std::sin(th),
                              -p[1] * std::sin(th) + p[2] * std::cos(th)});
        CHECK(inf_norm(Vector(minus.covector - minus_cf)) < 1e-10);
        CHECK(inf_norm(Vector(plus.covector - plus_cf)) < 1e-10);
    }
}

TEST_CASE("Rel identity: nh_legendre equals projection after full legendre") {
    auto sys = sleigh_system({2.0, 0.25, 0.4, 1.5});
    auto rng = make_rng(83);
    std::uniform_real_distribution<double> ang(-2.5, 2.5);
    std::uniform_real_distribution<double> off(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector g = mc_point(sys, ang(rng), off(rng));
        for (auto side : {LegendreSide::Minus, LegendreSide::Plus}) {
            Vector restricted = nh_legendre(sys, g, side);
            Vector full = legendre(sys.lagrangian, g, side).covector;
            Vector projected = sys.distribution.dual_projection() * full;
            CHECK(inf_norm(Vector(restricted - projected)) < 1e-12);
        }
    }
}

TEST_CASE("nh_del_residual matches the displayed Euler-Poincare-Suslov equations") {
    SleighParams P{1.4, 0.6, -0.25, 2.2};
    auto sys = sleigh_system(P);
    auto rng = make_rng(89);
    std::uniform_real_distribution<double> ang(-2.8, 2.8);
    std::uniform_real_distribution<double> off(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vector g = mc_point(sys, ang(rng), off(rng));
        Vector h = mc_point(sys, ang(rng), off(rng));
        Vector r = nh_del_residual(sys, g, h);
        Vector oracle = eps_equations(P, g, h);
        // components: residual = (e*, e1*), oracle rows = (e1*, e*)
        CHECK(r[0] == doctest::Approx(oracle[1]).epsilon(1e-9));
        CHECK(r[1] == doctest::Approx(oracle[0]).epsilon(1e-9));
    }
}

TEST_CASE("a=b=0 reduction: hand-solved fixed point and knife edge") {
    auto sys = sleigh_system({1, 0, 0, 1});
    // (pi/2, 1, 1) is its own successor: sin th2 = sin th1 and
    // x2 = x1 cos th1 + y1 sin th1 = 1.
    Vector g = vec({kPi / 2, 1.0, 1.0});
    CHECK(constraint_residual(sys, g) < 1e-12);
    CHECK(inf_norm(nh_del_residual(sys, g, g)) < 1e-10);
    auto step = nh_evolve(sys, g, g);
    REQUIRE(step.ok);
    CHECK(inf_norm(Vector(step.element - g)) < 1e-9);

    // knife edge: theta frozen at 0, straight-line motion
    Vector k = vec({0.0, 0.7, 0.0});
    auto stepk = nh_evolve(sys, k, k);
    REQUIRE(stepk.ok);
    CHECK(inf_norm(Vector(stepk.element - k)) < 1e-9);

    // a generic non-solution pair has a visible residual
    Vector h = mc_point(sys, 0.9, -0.4);
    CHECK(inf_norm(nh_del_residual(sys, g, h)) > 1e-3);
}

TEST_CASE("nh_evolve satisfies the displayed equations for generic parameters") {
    SleighParams P{1.0, 0.5, 0.0, 1.0};
    auto sys = sleigh_system(P);
    Vector g = mc_point(sys, 0.6, 0.8);
    auto step = nh_evolve(sys, g, g);
    REQUIRE(step.ok);
    CHECK(constraint_residual(sys, step.element) < 1e-10);
    CHECK(inf_norm(eps_equations(P, g, step.element)) < 1e-9);
    CHECK(inf_norm(nh_del_residual(sys, g, step.element)) < 1e-9);

    // short trajectory: every step stays on Mc and solves the equations
    Vector cur = step.element;
    for (int k = 0; k < 5; ++k) {
        auto s = nh_evolve(sys, cur, cur);
        REQUIRE(s.ok);
        CHECK(constraint_residual(sys, s.element) < 1e-10);
        CHECK(inf_norm(eps_equations(P, cur, s.element)) < 1e-9);
        cur = s.element;
    }
}

TEST_CASE("branch pairs are reported as multiple roots") {
    auto sys = sleigh_system({1, 0, 0, 1});
    // sin th2 = sin th1 has the genuine branch pair {th1, pi - th1} away from
    // the fixed points of the reflection.
    Vector g = mc_point(sys, 0.3, 0.5);
    auto step = nh_evolve(sys, g, g);
    REQUIRE(step.ok);
    CHECK(step.multiple_roots);
    CHECK(step.roots.size() >= 2);
    // nearest-to-seed root wins: theta stays near 0.3
    CHECK(step.chart_params[0] == doctest::Approx(0.3).epsilon(1e-6));
    bool found_flip = false;
    for (const auto& r : step.roots)
        if (std::abs(r[0] - (kPi - 0.3)) < 1e-6) found_flip = true;
    CHECK(found_flip);
}

TEST_CASE("restricted classification marks nh-evolvable points") {
    SleighParams P{1.0, 0.5, 0.0, 1.0};
    auto sys = sleigh_system(P);
    auto S = build_S_LMc(sys);
    auto rng = make_rng(97);
    std::uniform_real_distribution<double> ang(-1.2, 1.2);
    std::uniform_real_distribution<double> off(-1.0, 1.0);
    ClassifyOptions opts;
    opts.depth = 1;
    opts.seeds = 8;
    opts.rng_seed = 5;
    for (int trial = 0; trial < 8; ++trial) {
        Vector u = vec({ang(rng), off(rng)});
        Vector g = field_value(*sys.constraint_manifold.chart, u);
        auto evolved = nh_evolve(sys, g, g);
        if (!evolved.ok) continue;
        Vector z = field_value(*S.parametrization().psi, u);
        REQUIRE(S.member(z));
        auto r = classify_point(S, z, opts);
        CHECK(r.forward_depth >= 1);
        if (r.forward_depth >= 1) {
            // the witness successor solves the restricted DEL equations
            Vector zh = r.forward_chain[0];
            Vector hg = zh.head(3);
            CHECK(inf_norm(nh_del_residual(sys, g, hg)) < 1e-8);
        }
    }
}

TEST_CASE("sleigh parameters validate") {
    CHECK_THROWS_AS(sleigh_system({-1.0, 0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(sleigh_system({1.0, 0, 0, 0.0}), std::invalid_argument);
}

TEST_SUITE_END();
