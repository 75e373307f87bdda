#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace gflow {

// Forward-mode dual number with a vector of partials. Nestable: Dual<Dual<double>>
// carries second derivatives. An empty partials vector denotes a constant and is
// treated as a zero vector of whatever seed dimension the other operand carries;
// comparisons use the (recursively extracted) value only.
template <class T>
class Dual {
public:
    Dual() : v_{} {}
    Dual(T value) : v_(std::move(value)) {}
    Dual(T value, std::vector<T> partials) : v_(std::move(value)), d_(std::move(partials)) {}

    static Dual variable(T value, std::size_t dim, std::size_t index) {
        std::vector<T> d(dim, T{});
        d[index] = T(1);
        return Dual(std::move(value), std::move(d));
    }

    const T& value() const { return v_; }
    const std::vector<T>& partials() const { return d_; }
    std::size_t seed_dim() const { return d_.size(); }
    T partial(std::size_t i) const { return i < d_.size() ? d_[i] : T{}; }

private:
    T v_;
    std::vector<T> d_;
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.value()); }

// Construct a (nested) scalar from a plain double.
template <class S>
S scalar_cast(double x) {
    if constexpr (std::is_same_v<S, double>) {
        return x;
    } else {
        return S(scalar_cast<typename std::decay_t<decltype(std::declval<S>().value())>>(x));
    }
}

namespace detail {

template <class T, class Combine>
std::vector<T> combine_partials(const std::vector<T>& a, const std::vector<T>& b, Combine c) {
    const std::size_t n = std::max(a.size(), b.size());
    if (!a.empty() && !b.empty() && a.size() != b.size())
        throw std::logic_error("Dual: mismatched seed dimensions");
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = c(i < a.size() ? a[i] : T{}, i < b.size() ? b[i] : T{});
    return out;
}

} // namespace detail

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return Dual<T>(a.value() + b.value(),
                   detail::combine_partials(a.partials(), b.partials(),
                                            [](const T& x, const T& y) { return x + y; }));
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return Dual<T>(a.value() - b.value(),
                   detail::combine_partials(a.partials(), b.partials(),
                                            [](const T& x, const T& y) { return x - y; }));
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return Dual<T>(a.value() * b.value(),
                   detail::combine_partials(a.partials(), b.partials(),
                                            [&](const T& x, const T& y) {
                                                return x * b.value() + a.value() * y;
                                            }));
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    const T inv = T(1) / b.value();
    return Dual<T>(a.value() * inv,
                   detail::combine_partials(a.partials(), b.partials(),
                                            [&](const T& x, const T& y) {
                                                return (x - a.value() * inv * y) * inv;
                                            }));
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
    std::vector<T> d(a.partials().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -a.partials()[i];
    return Dual<T>(-a.value(), std::move(d));
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return a + Dual<T>(scalar_cast<T>(b)); }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return Dual<T>(scalar_cast<T>(a)) + b; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return a - Dual<T>(scalar_cast<T>(b)); }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return Dual<T>(scalar_cast<T>(a)) - b; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return a * Dual<T>(scalar_cast<T>(b)); }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return Dual<T>(scalar_cast<T>(a)) * b; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return a / Dual<T>(scalar_cast<T>(b)); }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(scalar_cast<T>(a)) / b; }

template <class T, class U>
bool operator<(const Dual<T>& a, const U& b) { return value_of(a) < value_of(b); }
template <class T>
bool operator<(double a, const Dual<T>& b) { return a < value_of(b); }
template <class T, class U>
bool operator>(const Dual<T>& a, const U& b) { return value_of(a) > value_of(b); }
template <class T>
bool operator>(double a, const Dual<T>& b) { return a > value_of(b); }
template <class T, class U>
bool operator<=(const Dual<T>& a, const U& b) { return value_of(a) <= value_of(b); }
template <class T, class U>
bool operator>=(const Dual<T>& a, const U& b) { return value_of(a) >= value_of(b); }
template <class T, class U>
bool operator==(const Dual<T>& a, const U& b) { return value_of(a) == value_of(b); }

// f(x) with known value and derivative at x.value(): one chain-rule application.
template <class T>
Dual<T> dual_chain(const Dual<T>& x, T fx, const T& dfx) {
    std::vector<T> d(x.partials().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = dfx * x.partials()[i];
    return Dual<T>(std::move(fx), std::move(d));
}

inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double pow(double x, double y) { return std::pow(x, y); }

template <class T> Dual<T> sin(const Dual<T>& x) { return dual_chain(x, sin(x.value()), cos(x.value())); }
template <class T> Dual<T> cos(const Dual<T>& x) { return dual_chain(x, cos(x.value()), T(-1) * sin(x.value())); }
template <class T> Dual<T> tan(const Dual<T>& x) {
    T t = tan(x.value());
    return dual_chain(x, t, T(1) + t * t);
}
template <class T> Dual<T> exp(const Dual<T>& x) {
    T e = exp(x.value());
    return dual_chain(x, e, e);
}
template <class T> Dual<T> log(const Dual<T>& x) { return dual_chain(x, log(x.value()), T(1) / x.value()); }
template <class T> Dual<T> sqrt(const Dual<T>& x) {
    T s = sqrt(x.value());
    return dual_chain(x, s, T(1) / (T(2) * s));
}

template <class T>
Dual<T> pow(const Dual<T>& x, const Dual<T>& y) {
    if (y.partials().empty()) {
        // Constant exponent: valid for negative bases with integral exponents.
        T fx = pow(x.value(), y.value());
        T dfx = y.value() * pow(x.value(), y.value() - T(1));
        return dual_chain(x, std::move(fx), dfx);
    }
    T fx = pow(x.value(), y.value());
    T lx = log(x.value());
    return Dual<T>(fx, detail::combine_partials(
                           x.partials(), y.partials(), [&](const T& dx, const T& dy) {
                               return fx * (y.value() / x.value() * dx + lx * dy);
                           }));
}
template <class T> Dual<T> pow(const Dual<T>& x, double y) { return pow(x, Dual<T>(scalar_cast<T>(y))); }

template <class T>
Dual<T> abs(const Dual<T>& x) { return value_of(x) < 0.0 ? -x : x; }
inline double abs(double x) { return std::fabs(x); }

// Identity-seeded duals over a point: the building block for gradients.
template <class T>
std::vector<Dual<T>> seed_variables(const std::vector<T>& x) {
    std::vector<Dual<T>> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out.push_back(Dual<T>::variable(x[i], x.size(), i));
    return out;
}

} // namespace gflow
