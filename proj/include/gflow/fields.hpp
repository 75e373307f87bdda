#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "gflow/dual.hpp"
#include "gflow/linalg.hpp"

namespace gflow {

// Scalar function on R^n, evaluable over plain reals and over dual numbers up
// to second order. Implementations whose body already consumes one AD level
// (e.g. gradients of another field) cap the supported level and throw beyond it.
class ScalarField {
public:
    virtual ~ScalarField() = default;
    virtual int arity() const = 0;
    virtual double eval(std::span<const double> x) const = 0;
    virtual Dual1 eval(std::span<const Dual1> x) const = 0;
    virtual Dual2 eval(std::span<const Dual2> x) const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const ScalarField>;

// Map R^in -> R^out under the same evaluation contract.
class VectorField {
public:
    virtual ~VectorField() = default;
    virtual int in_dim() const = 0;
    virtual int out_dim() const = 0;
    virtual std::vector<double> eval(std::span<const double> x) const = 0;
    virtual std::vector<Dual1> eval(std::span<const Dual1> x) const = 0;
    virtual std::vector<Dual2> eval(std::span<const Dual2> x) const = 0;
};

using VectorFieldPtr = std::shared_ptr<const VectorField>;

namespace detail {

template <int MaxLevel, class F>
class ScalarFieldImpl final : public ScalarField {
public:
    ScalarFieldImpl(int arity, F f) : arity_(arity), f_(std::move(f)) {}
    int arity() const override { return arity_; }
    double eval(std::span<const double> x) const override { return f_(x); }
    Dual1 eval(std::span<const Dual1> x) const override {
        if constexpr (MaxLevel >= 1) return f_(x);
        else throw std::logic_error("ScalarField: first-order AD not supported here");
    }
    Dual2 eval(std::span<const Dual2> x) const override {
        if constexpr (MaxLevel >= 2) return f_(x);
        else throw std::logic_error("ScalarField: second-order AD not supported here");
    }

private:
    int arity_;
    F f_;
};

template <int MaxLevel, class F>
class VectorFieldImpl final : public VectorField {
public:
    VectorFieldImpl(int in, int out, F f) : in_(in), out_(out), f_(std::move(f)) {}
    int in_dim() const override { return in_; }
    int out_dim() const override { return out_; }
    std::vector<double> eval(std::span<const double> x) const override { return f_(x); }
    std::vector<Dual1> eval(std::span<const Dual1> x) const override {
        if constexpr (MaxLevel >= 1) return f_(x);
        else throw std::logic_error("VectorField: first-order AD not supported here");
    }
    std::vector<Dual2> eval(std::span<const Dual2> x) const override {
        if constexpr (MaxLevel >= 2) return f_(x);
        else throw std::logic_error("VectorField: second-order AD not supported here");
    }

private:
    int in_, out_;
    F f_;
};

} // namespace detail

template <int MaxLevel = 2, class F>
ScalarFieldPtr make_scalar_field(int arity, F f) {
    return std::make_shared<detail::ScalarFieldImpl<MaxLevel, F>>(arity, std::move(f));
}

template <int MaxLevel = 2, class F>
VectorFieldPtr make_vector_field(int in, int out, F f) {
    return std::make_shared<detail::VectorFieldImpl<MaxLevel, F>>(in, out, std::move(f));
}

// Gradient via identity-seeded duals one level above T (T = double or Dual1).
template <class T>
std::vector<T> field_gradient(const ScalarField& f, std::span<const T> x) {
    static_assert(std::is_same_v<T, double> || std::is_same_v<T, Dual1>,
                  "gradients are available at plain and first-order level only");
    std::vector<T> point(x.begin(), x.end());
    auto seeded = seed_variables(point);
    auto y = f.eval(std::span<const Dual<T>>(seeded));
    std::vector<T> g(point.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = y.partial(i);
    return g;
}

Vector field_gradient(const ScalarField& f, const Vector& x);
Matrix field_jacobian(const VectorField& F, const Vector& x);
Vector field_value(const VectorField& F, const Vector& x);

} // namespace gflow
