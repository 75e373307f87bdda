#include "gflow/linalg.hpp"

#include <stdexcept>

namespace gflow {

bool is_finite(const Matrix& m) { return m.allFinite(); }
bool is_finite(const Vector& v) { return v.allFinite(); }

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

Vector to_vector(std::span<const double> x) {
    Vector v(static_cast<Eigen::Index>(x.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = x[static_cast<std::size_t>(i)];
    return v;
}

std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

RankFactor rank_factor(const Matrix& M, const TolerancePolicy& tol) {
    require_finite(M, "rank_factor");
    tol.validate();
    const Eigen::Index m = M.rows(), n = M.cols();
    RankFactor out;
    if (m == 0 || n == 0) {
        out.rank = 0;
        out.row_space = Matrix::Zero(n, 0);
        out.null_space = Matrix::Identity(n, n);
        out.left_null_space = Matrix::Identity(m, m);
        out.singular_values = Vector::Zero(std::min(m, n));
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv[i] >= tol.rank_rel_tol * smax) ++r;
    out.rank = r;
    out.singular_values = sv;
    out.row_space = svd.matrixV().leftCols(r);
    out.null_space = svd.matrixV().rightCols(n - r);
    out.left_null_space = svd.matrixU().rightCols(m - r).transpose();
    return out;
}

Matrix pseudo_inverse(const Matrix& M, const TolerancePolicy& tol) {
    require_finite(M, "pseudo_inverse");
    if (M.rows() == 0 || M.cols() == 0) return Matrix::Zero(M.cols(), M.rows());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    Vector inv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv[i] >= tol.rank_rel_tol * smax) inv[i] = 1.0 / sv[i];
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

} // namespace gflow
