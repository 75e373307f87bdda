#pragma once

#include <optional>
#include <random>

#include "gflow/linalg.hpp"
#include "gflow/tolerance.hpp"

namespace gflow {

// An affine map x -> A x + t.
struct AffineMap {
    Matrix A;
    Vector t;

    int in_dim() const { return static_cast<int>(A.cols()); }
    int out_dim() const { return static_cast<int>(A.rows()); }
    Vector operator()(const Vector& x) const { return A * x + t; }
};

// Affine subspace {x in R^n : M x = c} kept in canonical form (orthonormal
// constraint rows) together with the generator form (base point + orthonormal
// direction basis), both produced by one rank-revealing decomposition.
// EMPTY is a first-class state: the algorithms legitimately produce it.
class AffineSubspace {
public:
    static AffineSubspace from_constraints(const Matrix& M, const Vector& c,
                                           const TolerancePolicy& tol = {});
    static AffineSubspace from_generators(const Vector& base, const Matrix& directions,
                                          const TolerancePolicy& tol = {});
    static AffineSubspace full(int ambient_dim);
    static AffineSubspace point(const Vector& p);
    static AffineSubspace make_empty(int ambient_dim);

    bool is_empty() const { return empty_; }
    int ambient_dim() const { return ambient_; }
    // Dimension of the solution set; -1 for EMPTY.
    int dim() const { return empty_ ? -1 : ambient_ - static_cast<int>(constraints_.rows()); }

    const Matrix& constraint_matrix() const { return constraints_; }
    const Vector& offset() const { return offset_; }
    const Vector& base_point() const;
    const Matrix& directions() const;

    double residual_inf(const Vector& x) const;
    bool contains(const Vector& x, double tol) const;
    Vector project(const Vector& x) const; // least-squares projection onto the set
    Vector sample(std::mt19937_64& rng, double radius = 1.0) const;

private:
    AffineSubspace() = default;

    int ambient_ = 0;
    bool empty_ = false;
    Matrix constraints_; // r x n, orthonormal rows
    Vector offset_;      // r
    Vector base_;        // n, minimum-norm solution
    Matrix dirs_;        // n x (n - r), orthonormal columns
};

AffineSubspace affine_intersect(const AffineSubspace& a, const AffineSubspace& b,
                                const TolerancePolicy& tol = {});
AffineSubspace affine_image(const AffineSubspace& s, const AffineMap& map,
                            const TolerancePolicy& tol = {});
AffineSubspace affine_preimage(const AffineSubspace& s, const AffineMap& map,
                               const TolerancePolicy& tol = {});
bool affine_equal(const AffineSubspace& a, const AffineSubspace& b,
                  const TolerancePolicy& tol = {});
// True when a is contained in b.
bool affine_subset(const AffineSubspace& a, const AffineSubspace& b,
                   const TolerancePolicy& tol = {});

} // namespace gflow
