#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "gflow/tolerance.hpp"

namespace gflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool is_finite(const Matrix& m);
bool is_finite(const Vector& v);
void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
inline double inf_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Vector to_vector(std::span<const double> x);
std::vector<double> to_std(const Vector& v);

// Rank-revealing orthogonal decomposition of a dense matrix. Bases are
// orthonormal: row_space and null_space hold column vectors in the domain,
// left_null_space holds row vectors in the codomain. Rank counts singular
// values >= rank_rel_tol * sigma_max.
struct RankFactor {
    int rank = 0;
    Matrix row_space;       // n x r
    Matrix null_space;      // n x (n - r)
    Matrix left_null_space; // (m - r) x m
    Vector singular_values;
};

RankFactor rank_factor(const Matrix& M, const TolerancePolicy& tol = {});

Matrix pseudo_inverse(const Matrix& M, const TolerancePolicy& tol = {});

} // namespace gflow
