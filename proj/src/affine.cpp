#include "gflow/affine.hpp"

#include <limits>
#include <stdexcept>

namespace gflow {

namespace {

void check_same_ambient(const AffineSubspace& a, const AffineSubspace& b, const char* op) {
    if (a.ambient_dim() != b.ambient_dim())
        throw std::invalid_argument(std::string(op) + ": ambient dimension mismatch");
}

} // namespace

AffineSubspace AffineSubspace::from_constraints(const Matrix& M, const Vector& c,
                                                const TolerancePolicy& tol) {
    require_finite(M, "AffineSubspace constraints");
    require_finite(c, "AffineSubspace offset");
    if (M.rows() != c.size())
        throw std::invalid_argument("AffineSubspace: constraint row count != offset size");

    AffineSubspace s;
    s.ambient_ = static_cast<int>(M.cols());

    if (M.rows() == 0) {
        s.constraints_ = Matrix::Zero(0, s.ambient_);
        s.offset_ = Vector::Zero(0);
        s.base_ = Vector::Zero(s.ambient_);
        s.dirs_ = Matrix::Identity(s.ambient_, s.ambient_);
        return s;
    }

    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv[i] >= tol.rank_rel_tol * smax) ++r;

    // Consistency: c must lie in the range of M up to set tolerance.
    Vector proj = svd.matrixU().leftCols(r) * (svd.matrixU().leftCols(r).transpose() * c);
    const double feas = inf_norm(Vector(c - proj));
    if (feas > tol.set_eq_tol * std::max(1.0, inf_norm(c))) return make_empty(s.ambient_);

    Vector chat(r);
    for (int i = 0; i < r; ++i) chat[i] = svd.matrixU().col(i).dot(c) / sv[i];

    s.constraints_ = svd.matrixV().leftCols(r).transpose();
    s.offset_ = chat;
    s.base_ = svd.matrixV().leftCols(r) * chat;
    s.dirs_ = svd.matrixV().rightCols(s.ambient_ - r);
    return s;
}

AffineSubspace AffineSubspace::from_generators(const Vector& base, const Matrix& directions,
                                               const TolerancePolicy& tol) {
    require_finite(base, "AffineSubspace base point");
    require_finite(directions, "AffineSubspace directions");
    if (directions.rows() != base.size())
        throw std::invalid_argument("AffineSubspace: direction rows != ambient dim");

    const int n = static_cast<int>(base.size());
    AffineSubspace s;
    s.ambient_ = n;

    if (directions.cols() == 0) {
        s.constraints_ = Matrix::Identity(n, n);
        s.offset_ = base;
        s.base_ = base;
        s.dirs_ = Matrix::Zero(n, 0);
        return s;
    }

    // Span may be rank-deficient: orthonormalize through the SVD; the left
    // null space of the direction span provides the constraint rows.
    Eigen::JacobiSVD<Matrix> svd(directions, Eigen::ComputeFullU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv[i] >= tol.rank_rel_tol * smax) ++r;

    s.dirs_ = svd.matrixU().leftCols(r);
    s.constraints_ = svd.matrixU().rightCols(n - r).transpose();
    s.offset_ = s.constraints_ * base;
    s.base_ = s.constraints_.transpose() * s.offset_; // minimum-norm representative
    return s;
}

AffineSubspace AffineSubspace::full(int ambient_dim) {
    return from_constraints(Matrix::Zero(0, ambient_dim), Vector::Zero(0));
}

AffineSubspace AffineSubspace::point(const Vector& p) {
    return from_generators(p, Matrix::Zero(p.size(), 0));
}

AffineSubspace AffineSubspace::make_empty(int ambient_dim) {
    AffineSubspace s;
    s.ambient_ = ambient_dim;
    s.empty_ = true;
    s.constraints_ = Matrix::Zero(0, ambient_dim);
    s.offset_ = Vector::Zero(0);
    s.base_ = Vector::Zero(ambient_dim);
    s.dirs_ = Matrix::Zero(ambient_dim, 0);
    return s;
}

const Vector& AffineSubspace::base_point() const {
    if (empty_) throw std::logic_error("AffineSubspace: base point of EMPTY set");
    return base_;
}

const Matrix& AffineSubspace::directions() const {
    if (empty_) throw std::logic_error("AffineSubspace: directions of EMPTY set");
    return dirs_;
}

double AffineSubspace::residual_inf(const Vector& x) const {
    if (empty_) return std::numeric_limits<double>::infinity();
    if (x.size() != ambient_) throw std::invalid_argument("AffineSubspace: point dimension mismatch");
    return inf_norm(Vector(constraints_ * x - offset_));
}

bool AffineSubspace::contains(const Vector& x, double tol) const {
    return !empty_ && residual_inf(x) < tol;
}

Vector AffineSubspace::project(const Vector& x) const {
    if (empty_) throw std::logic_error("AffineSubspace: projection onto EMPTY set");
    return base_ + dirs_ * (dirs_.transpose() * (x - base_));
}

Vector AffineSubspace::sample(std::mt19937_64& rng, double radius) const {
    if (empty_) throw std::logic_error("AffineSubspace: sampling EMPTY set");
    std::uniform_real_distribution<double> u(-radius, radius);
    Vector lambda(dirs_.cols());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = u(rng);
    return base_ + dirs_ * lambda;
}

AffineSubspace affine_intersect(const AffineSubspace& a, const AffineSubspace& b,
                                const TolerancePolicy& tol) {
    check_same_ambient(a, b, "affine_intersect");
    if (a.is_empty() || b.is_empty()) return AffineSubspace::make_empty(a.ambient_dim());
    Matrix M(a.constraint_matrix().rows() + b.constraint_matrix().rows(), a.ambient_dim());
    M << a.constraint_matrix(), b.constraint_matrix();
    Vector c(a.offset().size() + b.offset().size());
    c << a.offset(), b.offset();
    return AffineSubspace::from_constraints(M, c, tol);
}

AffineSubspace affine_image(const AffineSubspace& s, const AffineMap& map,
                            const TolerancePolicy& tol) {
    if (map.in_dim() != s.ambient_dim())
        throw std::invalid_argument("affine_image: map domain != ambient dim");
    if (s.is_empty()) return AffineSubspace::make_empty(map.out_dim());
    return AffineSubspace::from_generators(map(s.base_point()), map.A * s.directions(), tol);
}

AffineSubspace affine_preimage(const AffineSubspace& s, const AffineMap& map,
                               const TolerancePolicy& tol) {
    if (map.out_dim() != s.ambient_dim())
        throw std::invalid_argument("affine_preimage: map codomain != ambient dim");
    if (s.is_empty()) return AffineSubspace::make_empty(map.in_dim());
    // M (A x + t) = c  ->  (M A) x = c - M t
    return AffineSubspace::from_constraints(s.constraint_matrix() * map.A,
                                            s.offset() - s.constraint_matrix() * map.t, tol);
}

bool affine_equal(const AffineSubspace& a, const AffineSubspace& b, const TolerancePolicy& tol) {
    check_same_ambient(a, b, "affine_equal");
    if (a.is_empty() || b.is_empty()) return a.is_empty() == b.is_empty();
    if (a.dim() != b.dim()) return false;
    if (a.residual_inf(b.base_point()) >= tol.set_eq_tol) return false;
    if (b.residual_inf(a.base_point()) >= tol.set_eq_tol) return false;
    // Direction spans agree when each basis projects onto the other without loss.
    const Matrix& Da = a.directions();
    const Matrix& Db = b.directions();
    if (inf_norm(Matrix(Da - Db * (Db.transpose() * Da))) >= tol.set_eq_tol) return false;
    if (inf_norm(Matrix(Db - Da * (Da.transpose() * Db))) >= tol.set_eq_tol) return false;
    return true;
}

bool affine_subset(const AffineSubspace& a, const AffineSubspace& b, const TolerancePolicy& tol) {
    check_same_ambient(a, b, "affine_subset");
    if (a.is_empty()) return true;
    if (b.is_empty()) return false;
    if (b.residual_inf(a.base_point()) >= tol.set_eq_tol) return false;
    return inf_norm(Matrix(b.constraint_matrix() * a.directions())) < tol.set_eq_tol;
}

} // namespace gflow
