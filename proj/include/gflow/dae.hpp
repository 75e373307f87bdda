#pragma once

#include <functional>

#include "gflow/dynamics.hpp"

namespace gflow {

struct InconsistentInitError : std::runtime_error {
    InconsistentInitError() : std::runtime_error("DAE constraint set at t0 is empty") {}
};

// Time-dependent linear DAE A(t) xdot + B(t) x = b(t), discretized by the
// constrained explicit Euler scheme on the grid t_k = t0 + k h.
struct LinearDAE {
    int n = 0;
    std::function<Matrix(double)> A;
    std::function<Matrix(double)> B;
    std::function<Vector(double)> b;
    double t0 = 0.0;
    double h = 0.1;

    double time(int k) const { return t0 + k * h; }
};

// Orthogonal projector onto the left null space of A: Q = I - A A^+, so that
// Q A = 0 and ker Q = im A.
Matrix left_annihilator(const Matrix& A, const TolerancePolicy& tol = {});

// The hidden constraint { x : Q_k B_k x = Q_k b_k } at grid index k.
AffineSubspace constraint_set(const LinearDAE& dae, int k, const TolerancePolicy& tol = {});

struct DAEStepReport {
    enum class Status { Ok, HigherIndex };
    int k = 0;
    Status status = Status::HigherIndex;
    Matrix Q;                     // annihilator at index k
    AffineSubspace constraint = AffineSubspace::make_empty(0); // constraint set at index k
    bool regular = false;         // A_k + Q_{k+1} B_{k+1} regular
    Vector x_next;                // valid when status == Ok
    double euler_residual = 0.0;  // Euler equation residual projected onto im(A_k)
    double constraint_residual = 0.0; // constraint residual at k+1
    int combined_rank = 0;
    Vector combined_singular_values;

    bool ok() const { return status == Status::Ok; }
};

// One constrained Euler step: solve (A_k + Q_{k+1}B_{k+1}) x_{k+1} =
// (A_k - h B_k) x_k + h b_k + Q_{k+1} b_{k+1}, reporting HIGHER_INDEX when the
// combined matrix is rank-deficient.
DAEStepReport euler_step(const LinearDAE& dae, int k, const Vector& x_k,
                         const TolerancePolicy& tol = {});

// Least-squares projection of the guess onto the constraint set at t0.
// Throws InconsistentInitError when that set is empty.
Vector consistent_initialize(const LinearDAE& dae, const Vector& x_guess,
                             const TolerancePolicy& tol = {});

struct DAETrajectory {
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<DAEStepReport> reports;
    bool completed = false;
};

DAETrajectory integrate(const LinearDAE& dae, const Vector& x_guess, int steps,
                        const TolerancePolicy& tol = {});

// The scheme as a family of affine implicit difference equations
// E_k = {(x, y) : A_k (y - x)/h + B_k x = b_k} on the pair groupoid of R^n.
EquationSequence as_sequence(const LinearDAE& dae, const TolerancePolicy& tol = {});

} // namespace gflow
