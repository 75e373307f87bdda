#include "gflow/gauss_newton.hpp"

namespace gflow {

GaussNewtonResult gauss_newton(const VectorField& F, const Vector& x0,
                               const TolerancePolicy& tol) {
    tol.validate();
    require_finite(x0, "gauss_newton start");

    GaussNewtonResult res;
    Vector x = x0;
    Vector r = field_value(F, x);
    if (!r.allFinite()) return res;

    for (int it = 0; it < tol.newton_max_iter; ++it) {
        res.iterations = it;
        res.residual_inf = inf_norm(r);
        res.x = x;
        if (res.residual_inf < tol.newton_tol) {
            res.ok = true;
            return res;
        }

        Matrix J = field_jacobian(F, x);
        if (!J.allFinite()) return res;
        Vector step = -(pseudo_inverse(J, tol) * r);
        if (inf_norm(step) < 1e-16 * (1.0 + inf_norm(x))) return res; // stalled

        const double merit = r.norm();
        double lambda = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            Vector xt = x + lambda * step;
            Vector rt = field_value(F, xt);
            if (rt.allFinite() && rt.norm() < merit) {
                x = xt;
                r = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) return res; // line search exhausted
    }
    res.residual_inf = inf_norm(r);
    res.x = x;
    res.ok = res.residual_inf < tol.newton_tol;
    return res;
}

} // namespace gflow
