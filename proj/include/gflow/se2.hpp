#pragma once

#include <array>
#include <stdexcept>

#include "gflow/dual.hpp"
#include "gflow/linalg.hpp"

namespace gflow {

// Chart convention for SE(2): elements are (theta, x, y) with theta in (-pi, pi],
// wrapped after every multiplication. The Lie algebra basis is {e, e1, e2} with
// [e,e1]=e2, [e,e2]=-e1, [e1,e2]=0; covectors use the dual basis.
struct SE2Element {
    double theta = 0.0, x = 0.0, y = 0.0;

    SE2Element() = default;
    SE2Element(double theta_, double x_, double y_);
    Vector coords() const;
    static SE2Element from_coords(const Vector& v);
};

struct se2Vector {
    double omega = 0.0, v1 = 0.0, v2 = 0.0;
};

struct se2Covector {
    double e = 0.0, e1 = 0.0, e2 = 0.0;
};

struct Se2DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

inline constexpr double kSe2SmallAngle = 1e-8;

double wrap_angle(double theta); // into (-pi, pi]

// Wrap for dual-valued angles: the shift is constant, so derivatives pass through.
template <class T>
T wrap_angle_like(const T& theta) {
    if constexpr (std::is_same_v<T, double>) {
        return wrap_angle(theta);
    } else {
        const double shift = wrap_angle(value_of(theta)) - value_of(theta);
        return theta + shift;
    }
}

// Group operations in coordinates, generic over the scalar so that structural
// maps can be differentiated through them.
template <class T>
std::array<T, 3> se2_multiply_coords(const std::array<T, 3>& g, const std::array<T, 3>& h) {
    using gflow::cos;
    using gflow::sin;
    T c = cos(g[0]), s = sin(g[0]);
    return {wrap_angle_like(g[0] + h[0]),
            g[1] + c * h[1] - s * h[2],
            g[2] + s * h[1] + c * h[2]};
}

template <class T>
std::array<T, 3> se2_inverse_coords(const std::array<T, 3>& g) {
    using gflow::cos;
    using gflow::sin;
    T c = cos(g[0]), s = sin(g[0]);
    return {wrap_angle_like(-g[0]),
            -(c * g[1] + s * g[2]),
            s * g[1] - c * g[2]};
}

// exp: se(2) -> SE(2). Near omega = 0 the removable singularity is replaced by
// the limit values sin(w)/w -> 1, (cos(w)-1)/w -> 0.
template <class T>
std::array<T, 3> se2_exp_coords(const std::array<T, 3>& xi) {
    using gflow::cos;
    using gflow::sin;
    const T& w = xi[0];
    if (abs(value_of(w)) < kSe2SmallAngle) return {w, xi[1], xi[2]};
    T sw = sin(w) / w;
    T cw = (cos(w) - 1.0) / w;
    return {w, xi[1] * sw + xi[2] * cw, -xi[1] * cw + xi[2] * sw};
}

// d/dt at t = 0 of t -> exp(t e_j) * g (right) and t -> g * exp(t e_j) (left),
// for the algebra basis e_0 = e, e_1, e_2; these pull covectors back to se(2)*.
template <class T>
std::array<T, 3> se2_right_basis_derivative(const std::array<T, 3>& g, int j) {
    Dual<T> t = Dual<T>::variable(T(0), 1, 0);
    std::array<Dual<T>, 3> xi{Dual<T>(T(0)), Dual<T>(T(0)), Dual<T>(T(0))};
    xi[static_cast<std::size_t>(j)] = t;
    std::array<Dual<T>, 3> gd{Dual<T>(g[0]), Dual<T>(g[1]), Dual<T>(g[2])};
    auto curve = se2_multiply_coords(se2_exp_coords(xi), gd);
    return {curve[0].partial(0), curve[1].partial(0), curve[2].partial(0)};
}

template <class T>
std::array<T, 3> se2_left_basis_derivative(const std::array<T, 3>& g, int j) {
    Dual<T> t = Dual<T>::variable(T(0), 1, 0);
    std::array<Dual<T>, 3> xi{Dual<T>(T(0)), Dual<T>(T(0)), Dual<T>(T(0))};
    xi[static_cast<std::size_t>(j)] = t;
    std::array<Dual<T>, 3> gd{Dual<T>(g[0]), Dual<T>(g[1]), Dual<T>(g[2])};
    auto curve = se2_multiply_coords(gd, se2_exp_coords(xi));
    return {curve[0].partial(0), curve[1].partial(0), curve[2].partial(0)};
}

SE2Element se2_exp(const se2Vector& xi);
se2Vector se2_log(const SE2Element& g); // throws Se2DomainError at theta = pi

SE2Element se2_multiply(const SE2Element& g, const SE2Element& h);
SE2Element se2_inverse(const SE2Element& g);

Matrix se2_homogeneous(const SE2Element& g); // 3x3 matrix representation
Matrix se2_algebra_matrix(const se2Vector& xi);

} // namespace gflow
