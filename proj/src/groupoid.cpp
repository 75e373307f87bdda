#include "gflow/groupoid.hpp"

#include "gflow/se2.hpp"

namespace gflow {

namespace {

template <class S>
std::vector<S> slice(std::span<const S> x, std::size_t begin, std::size_t len) {
    return std::vector<S>(x.begin() + begin, x.begin() + begin + len);
}

template <class S>
std::array<S, 3> triple(std::span<const S> x, std::size_t begin) {
    return {x[begin], x[begin + 1], x[begin + 2]};
}

template <class S>
std::vector<S> cotangent_se2_source_impl(std::span<const S> z) {
    auto g = triple(z, 0);
    std::vector<S> out(3, S(0));
    for (int j = 0; j < 3; ++j) {
        auto v = se2_right_basis_derivative(g, j);
        out[static_cast<std::size_t>(j)] = z[3] * v[0] + z[4] * v[1] + z[5] * v[2];
    }
    return out;
}

template <class S>
std::vector<S> cotangent_se2_target_impl(std::span<const S> z) {
    auto g = triple(z, 0);
    std::vector<S> out(3, S(0));
    for (int j = 0; j < 3; ++j) {
        auto v = se2_left_basis_derivative(g, j);
        out[static_cast<std::size_t>(j)] = z[3] * v[0] + z[4] * v[1] + z[5] * v[2];
    }
    return out;
}

// Transpose-Jacobian pullback of the covector p through the map z -> f(z) at z0.
template <class S, class F>
std::array<S, 3> pullback3(const std::array<S, 3>& z0, const std::array<S, 3>& p, F f) {
    std::array<Dual<S>, 3> seeded{Dual<S>::variable(z0[0], 3, 0),
                                  Dual<S>::variable(z0[1], 3, 1),
                                  Dual<S>::variable(z0[2], 3, 2)};
    auto y = f(seeded);
    std::array<S, 3> out;
    for (std::size_t k = 0; k < 3; ++k)
        out[k] = p[0] * y[0].partial(k) + p[1] * y[1].partial(k) + p[2] * y[2].partial(k);
    return out;
}

} // namespace

double GroupoidRealization::composability_mismatch(const Vector& g, const Vector& h) const {
    Vector tg = field_value(*target, g);
    Vector sh = field_value(*source, h);
    return inf_norm(Vector(tg - sh));
}

bool GroupoidRealization::composable(const Vector& g, const Vector& h) const {
    return composability_mismatch(g, h) < compose_tol;
}

Vector compose(const GroupoidRealization& G, const Vector& g, const Vector& h) {
    const double mismatch = G.composability_mismatch(g, h);
    if (!(mismatch < G.compose_tol)) throw NotComposableError(mismatch);
    Vector gh(g.size() + h.size());
    gh << g, h;
    return field_value(*G.multiply, gh);
}

std::pair<Vector, Vector> cotangent_source_target(const GroupoidRealization& CT, const Vector& z) {
    return {field_value(*CT.source, z), field_value(*CT.target, z)};
}

RealizationPtr make_pair_groupoid(int n) {
    auto G = std::make_shared<GroupoidRealization>();
    G->kind = GroupoidKind::PairGroupoid;
    G->element_dim = 2 * n;
    G->base_dim = n;
    G->is_affine = true;
    G->pair_n = n;

    const std::size_t un = static_cast<std::size_t>(n);
    G->source = make_vector_field(2 * n, n, [un](auto g) {
        return slice(g, 0, un);
    });
    G->target = make_vector_field(2 * n, n, [un](auto g) {
        return slice(g, un, un);
    });
    G->multiply = make_vector_field(4 * n, 2 * n, [un](auto gh) {
        auto out = slice(gh, 0, un);
        auto z = slice(gh, 3 * un, un);
        out.insert(out.end(), z.begin(), z.end());
        return out;
    });
    G->identity = make_vector_field(n, 2 * n, [un](auto x) {
        auto out = slice(x, 0, un);
        out.insert(out.end(), x.begin(), x.end());
        return out;
    });
    G->inverse = make_vector_field(2 * n, 2 * n, [un](auto g) {
        auto out = slice(g, un, un);
        auto first = slice(g, 0, un);
        out.insert(out.end(), first.begin(), first.end());
        return out;
    });

    Matrix A1 = Matrix::Zero(n, 2 * n);
    A1.leftCols(n) = Matrix::Identity(n, n);
    Matrix A2 = Matrix::Zero(n, 2 * n);
    A2.rightCols(n) = Matrix::Identity(n, n);
    G->source_affine = AffineMap{A1, Vector::Zero(n)};
    G->target_affine = AffineMap{A2, Vector::Zero(n)};
    return G;
}

RealizationPtr make_se2_group() {
    auto G = std::make_shared<GroupoidRealization>();
    G->kind = GroupoidKind::SE2Group;
    G->element_dim = 3;
    G->base_dim = 0;
    G->is_affine = true; // base is a point: source and target are (trivially) affine

    G->source = make_vector_field(3, 0, [](auto g) {
        using S = std::remove_cv_t<typename decltype(g)::element_type>;
        (void)g;
        return std::vector<S>{};
    });
    G->target = G->source;
    G->multiply = make_vector_field(6, 3, [](auto gh) {
        auto p = se2_multiply_coords(triple(gh, 0), triple(gh, 3));
        return std::vector(p.begin(), p.end());
    });
    G->identity = make_vector_field(0, 3, [](auto x) {
        using S = std::remove_cv_t<typename decltype(x)::element_type>;
        (void)x;
        return std::vector<S>{S(0), S(0), S(0)};
    });
    G->inverse = make_vector_field(3, 3, [](auto g) {
        auto p = se2_inverse_coords(triple(g, 0));
        return std::vector(p.begin(), p.end());
    });

    G->source_affine = AffineMap{Matrix::Zero(0, 3), Vector::Zero(0)};
    G->target_affine = AffineMap{Matrix::Zero(0, 3), Vector::Zero(0)};
    return G;
}

RealizationPtr make_cotangent_pair_groupoid(int n) {
    auto G = std::make_shared<GroupoidRealization>();
    G->kind = GroupoidKind::CotangentPair;
    G->element_dim = 4 * n;
    G->base_dim = 2 * n;
    G->is_affine = true;
    G->pair_n = n;

    const std::size_t un = static_cast<std::size_t>(n);
    // Elements (q0, q1, p0, p1); base T*Q with coordinates (q, p).
    G->source = make_vector_field(4 * n, 2 * n, [un](auto z) {
        auto out = slice(z, 0, un);
        for (std::size_t i = 0; i < un; ++i) out.push_back(-z[2 * un + i]);
        return out;
    });
    G->target = make_vector_field(4 * n, 2 * n, [un](auto z) {
        auto out = slice(z, un, un);
        auto p1 = slice(z, 3 * un, un);
        out.insert(out.end(), p1.begin(), p1.end());
        return out;
    });
    G->multiply = make_vector_field(8 * n, 4 * n, [un](auto zw) {
        // ((q0,q1,p0,p1),(q1,q2,-p1,p2)) -> (q0,q2,p0,p2)
        auto out = slice(zw, 0, un);
        auto q2 = slice(zw, 4 * un + un, un);
        auto p0 = slice(zw, 2 * un, un);
        auto p2 = slice(zw, 4 * un + 3 * un, un);
        out.insert(out.end(), q2.begin(), q2.end());
        out.insert(out.end(), p0.begin(), p0.end());
        out.insert(out.end(), p2.begin(), p2.end());
        return out;
    });
    G->identity = make_vector_field(2 * n, 4 * n, [un](auto qp) {
        // (q, p) -> (q, q, -p, p)
        auto out = slice(qp, 0, un);
        auto q = slice(qp, 0, un);
        out.insert(out.end(), q.begin(), q.end());
        for (std::size_t i = 0; i < un; ++i) out.push_back(-qp[un + i]);
        for (std::size_t i = 0; i < un; ++i) out.push_back(qp[un + i]);
        return out;
    });
    G->inverse = make_vector_field(4 * n, 4 * n, [un](auto z) {
        // (q0,q1,p0,p1) -> (q1,q0,-p1,-p0)
        auto out = slice(z, un, un);
        auto q0 = slice(z, 0, un);
        out.insert(out.end(), q0.begin(), q0.end());
        for (std::size_t i = 0; i < un; ++i) out.push_back(-z[3 * un + i]);
        for (std::size_t i = 0; i < un; ++i) out.push_back(-z[2 * un + i]);
        return out;
    });

    Matrix As = Matrix::Zero(2 * n, 4 * n);
    As.block(0, 0, n, n) = Matrix::Identity(n, n);
    As.block(n, 2 * n, n, n) = -Matrix::Identity(n, n);
    Matrix At = Matrix::Zero(2 * n, 4 * n);
    At.block(0, n, n, n) = Matrix::Identity(n, n);
    At.block(n, 3 * n, n, n) = Matrix::Identity(n, n);
    G->source_affine = AffineMap{As, Vector::Zero(2 * n)};
    G->target_affine = AffineMap{At, Vector::Zero(2 * n)};
    return G;
}

RealizationPtr make_cotangent_se2() {
    auto G = std::make_shared<GroupoidRealization>();
    G->kind = GroupoidKind::CotangentSE2;
    G->element_dim = 6;
    G->base_dim = 3;
    G->is_affine = false;

    // Source and target are the pullbacks by right and left translations,
    // computed by differentiating through exp and the group product.
    G->source = make_vector_field(6, 3, [](auto z) {
        return cotangent_se2_source_impl(z);
    });
    G->target = make_vector_field(6, 3, [](auto z) {
        return cotangent_se2_target_impl(z);
    });
    G->multiply = make_vector_field(12, 6, [](auto zw) {
        using S = std::remove_cv_t<typename decltype(zw)::element_type>;
        auto g = triple(zw, 0);
        auto p = triple(zw, 3);
        auto h = triple(zw, 6);
        auto gh = se2_multiply_coords(g, h);
        // Product covector: pull p back through z -> z * h^{-1} at gh.
        auto hinv = se2_inverse_coords(h);
        auto w = pullback3(gh, p, [&](const std::array<Dual<S>, 3>& zz) {
            std::array<Dual<S>, 3> hh{Dual<S>(hinv[0]), Dual<S>(hinv[1]), Dual<S>(hinv[2])};
            return se2_multiply_coords(zz, hh);
        });
        return std::vector<S>{gh[0], gh[1], gh[2], w[0], w[1], w[2]};
    });
    G->identity = make_vector_field(3, 6, [](auto b) {
        using S = std::remove_cv_t<typename decltype(b)::element_type>;
        return std::vector<S>{S(0), S(0), S(0), b[0], b[1], b[2]};
    });
    G->inverse = make_vector_field(6, 6, [](auto z) {
        using S = std::remove_cv_t<typename decltype(z)::element_type>;
        auto g = triple(z, 0);
        auto p = triple(z, 3);
        auto ginv = se2_inverse_coords(g);
        auto w = pullback3(ginv, p, [](const std::array<Dual<S>, 3>& zz) {
            return se2_inverse_coords(zz);
        });
        return std::vector<S>{ginv[0], ginv[1], ginv[2], -w[0], -w[1], -w[2]};
    });
    return G;
}

} // namespace gflow
