#include "gflow/fields.hpp"

namespace gflow {

Vector field_gradient(const ScalarField& f, const Vector& x) {
    std::vector<double> p(x.data(), x.data() + x.size());
    auto g = field_gradient<double>(f, std::span<const double>(p));
    return to_vector(g);
}

Matrix field_jacobian(const VectorField& F, const Vector& x) {
    std::vector<double> p(x.data(), x.data() + x.size());
    std::vector<Dual1> seeded = seed_variables(p);
    auto y = F.eval(std::span<const Dual1>(seeded));
    Matrix J(static_cast<Eigen::Index>(y.size()), x.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        for (Eigen::Index j = 0; j < x.size(); ++j)
            J(static_cast<Eigen::Index>(i), j) = y[i].partial(static_cast<std::size_t>(j));
    return J;
}

Vector field_value(const VectorField& F, const Vector& x) {
    std::vector<double> p(x.data(), x.data() + x.size());
    auto y = F.eval(std::span<const double>(p));
    return to_vector(y);
}

} // namespace gflow
