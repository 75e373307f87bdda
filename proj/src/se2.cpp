#include "gflow/se2.hpp"

#include <cmath>
#include <numbers>

namespace gflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_angle(double theta) {
    double r = std::fmod(theta + kPi, 2.0 * kPi);
    if (r <= 0.0) r += 2.0 * kPi;
    return r - kPi;
}

SE2Element::SE2Element(double theta_, double x_, double y_)
    : theta(wrap_angle(theta_)), x(x_), y(y_) {
    if (!std::isfinite(theta) || !std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("SE2Element: non-finite coordinates");
}

Vector SE2Element::coords() const {
    Vector v(3);
    v << theta, x, y;
    return v;
}

SE2Element SE2Element::from_coords(const Vector& v) {
    if (v.size() != 3) throw std::invalid_argument("SE2Element: expected 3 coordinates");
    return SE2Element(v[0], v[1], v[2]);
}

SE2Element se2_exp(const se2Vector& xi) {
    auto g = se2_exp_coords<double>({xi.omega, xi.v1, xi.v2});
    return SE2Element(g[0], g[1], g[2]);
}

se2Vector se2_log(const SE2Element& g) {
    if (g.theta == kPi) throw Se2DomainError("se2_log: theta = pi is outside the chart");
    if (std::abs(g.theta) < kSe2SmallAngle) return {g.theta, g.x, g.y};
    // Invert V = s I + t J with s = sin(th)/th, t = (1-cos(th))/th.
    const double s = std::sin(g.theta) / g.theta;
    const double t = (1.0 - std::cos(g.theta)) / g.theta;
    const double den = s * s + t * t;
    return {g.theta, (s * g.x + t * g.y) / den, (-t * g.x + s * g.y) / den};
}

SE2Element se2_multiply(const SE2Element& g, const SE2Element& h) {
    auto p = se2_multiply_coords<double>({g.theta, g.x, g.y}, {h.theta, h.x, h.y});
    return SE2Element(p[0], p[1], p[2]);
}

SE2Element se2_inverse(const SE2Element& g) {
    auto p = se2_inverse_coords<double>({g.theta, g.x, g.y});
    return SE2Element(p[0], p[1], p[2]);
}

Matrix se2_homogeneous(const SE2Element& g) {
    Matrix m(3, 3);
    m << std::cos(g.theta), -std::sin(g.theta), g.x,
         std::sin(g.theta),  std::cos(g.theta), g.y,
         0.0, 0.0, 1.0;
    return m;
}

Matrix se2_algebra_matrix(const se2Vector& xi) {
    Matrix m(3, 3);
    m << 0.0, -xi.omega, xi.v1,
         xi.omega, 0.0, xi.v2,
         0.0, 0.0, 0.0;
    return m;
}

} // namespace gflow
