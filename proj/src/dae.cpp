#include "gflow/dae.hpp"

namespace gflow {

namespace {

void check_system(const LinearDAE& dae) {
    if (dae.n <= 0) throw std::invalid_argument("LinearDAE: dimension must be positive");
    if (!dae.A || !dae.B || !dae.b) throw std::invalid_argument("LinearDAE: missing coefficients");
    if (!(dae.h > 0.0)) throw std::invalid_argument("LinearDAE: step size must be positive");
}

Matrix eval_A(const LinearDAE& dae, int k) {
    Matrix A = dae.A(dae.time(k));
    require_finite(A, "LinearDAE A(t)");
    if (A.rows() != dae.n || A.cols() != dae.n)
        throw std::invalid_argument("LinearDAE: A(t) has wrong shape");
    return A;
}

Matrix eval_B(const LinearDAE& dae, int k) {
    Matrix B = dae.B(dae.time(k));
    require_finite(B, "LinearDAE B(t)");
    if (B.rows() != dae.n || B.cols() != dae.n)
        throw std::invalid_argument("LinearDAE: B(t) has wrong shape");
    return B;
}

Vector eval_b(const LinearDAE& dae, int k) {
    Vector b = dae.b(dae.time(k));
    require_finite(b, "LinearDAE b(t)");
    if (b.size() != dae.n) throw std::invalid_argument("LinearDAE: b(t) has wrong size");
    return b;
}

} // namespace

Matrix left_annihilator(const Matrix& A, const TolerancePolicy& tol) {
    require_finite(A, "left_annihilator");
    if (A.rows() != A.cols()) throw std::invalid_argument("left_annihilator: matrix must be square");
    return Matrix::Identity(A.rows(), A.rows()) - A * pseudo_inverse(A, tol);
}

AffineSubspace constraint_set(const LinearDAE& dae, int k, const TolerancePolicy& tol) {
    check_system(dae);
    Matrix Q = left_annihilator(eval_A(dae, k), tol);
    return AffineSubspace::from_constraints(Q * eval_B(dae, k), Q * eval_b(dae, k), tol);
}

DAEStepReport euler_step(const LinearDAE& dae, int k, const Vector& x_k,
                         const TolerancePolicy& tol) {
    check_system(dae);
    require_finite(x_k, "euler_step state");

    Matrix A_k = eval_A(dae, k);
    Matrix B_k = eval_B(dae, k);
    Vector b_k = eval_b(dae, k);
    Matrix B_next = eval_B(dae, k + 1);
    Vector b_next = eval_b(dae, k + 1);
    Matrix Q_k = left_annihilator(A_k, tol);
    Matrix Q_next = left_annihilator(eval_A(dae, k + 1), tol);

    DAEStepReport rep;
    rep.k = k;
    rep.Q = Q_k;
    rep.constraint = AffineSubspace::from_constraints(Q_k * B_k, Q_k * b_k, tol);

    Matrix combined = A_k + Q_next * B_next;
    auto rf = rank_factor(combined, tol);
    rep.combined_rank = rf.rank;
    rep.combined_singular_values = rf.singular_values;
    rep.regular = rf.rank == dae.n;
    if (!rep.regular) return rep; // HIGHER_INDEX

    Vector rhs = (A_k - dae.h * B_k) * x_k + dae.h * b_k + Q_next * b_next;
    Vector x_next = combined.partialPivLu().solve(rhs);

    // The step must satisfy the Euler equation on im(A_k) and the hidden
    // constraint at k+1.
    Vector euler = A_k * (x_next - x_k) / dae.h + B_k * x_k - b_k;
    rep.euler_residual = inf_norm(Vector(euler - Q_k * euler));
    rep.constraint_residual = inf_norm(Vector(Q_next * B_next * x_next - Q_next * b_next));
    rep.x_next = x_next;
    rep.status = DAEStepReport::Status::Ok;
    return rep;
}

Vector consistent_initialize(const LinearDAE& dae, const Vector& x_guess,
                             const TolerancePolicy& tol) {
    check_system(dae);
    require_finite(x_guess, "consistent_initialize guess");
    AffineSubspace c0 = constraint_set(dae, 0, tol);
    if (c0.is_empty()) throw InconsistentInitError();
    return c0.project(x_guess);
}

DAETrajectory integrate(const LinearDAE& dae, const Vector& x_guess, int steps,
                        const TolerancePolicy& tol) {
    if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
    DAETrajectory traj;
    Vector x = consistent_initialize(dae, x_guess, tol);
    traj.t.push_back(dae.time(0));
    traj.x.push_back(x);
    for (int k = 0; k < steps; ++k) {
        DAEStepReport rep = euler_step(dae, k, x, tol);
        traj.reports.push_back(rep);
        if (!rep.ok()) return traj; // abort at the first higher-index step
        x = rep.x_next;
        traj.t.push_back(dae.time(k + 1));
        traj.x.push_back(x);
    }
    traj.completed = true;
    return traj;
}

EquationSequence as_sequence(const LinearDAE& dae, const TolerancePolicy& tol) {
    check_system(dae);
    EquationSequence seq;
    seq.realization = make_pair_groupoid(dae.n);
    seq.at = [dae, tol, G = seq.realization](int k) {
        Matrix A_k = dae.A(dae.time(k));
        Matrix B_k = dae.B(dae.time(k));
        Vector b_k = dae.b(dae.time(k));
        // A_k (y - x)/h + B_k x = b_k as rows over (x, y).
        Matrix M(dae.n, 2 * dae.n);
        M.leftCols(dae.n) = B_k - A_k / dae.h;
        M.rightCols(dae.n) = A_k / dae.h;
        return ImplicitEquation::affine(G, AffineSubspace::from_constraints(M, b_k, tol));
    };
    return seq;
}

} // namespace gflow
