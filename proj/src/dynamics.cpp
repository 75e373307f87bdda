#include "gflow/dynamics.hpp"

#include <algorithm>

#include "gflow/csv.hpp"

namespace gflow {

namespace {

const AffineMap& source_map(const GroupoidRealization& G) {
    if (!G.source_affine) throw std::logic_error("realization has no affine source map");
    return *G.source_affine;
}

const AffineMap& target_map(const GroupoidRealization& G) {
    if (!G.target_affine) throw std::logic_error("realization has no affine target map");
    return *G.target_affine;
}

} // namespace

ImplicitEquation ImplicitEquation::affine(RealizationPtr G, AffineSubspace set) {
    if (!G->is_affine)
        throw std::invalid_argument("ImplicitEquation: AFFINE requires an affine realization");
    if (set.ambient_dim() != G->element_dim)
        throw std::invalid_argument("ImplicitEquation: set ambient dim != element dim");
    ImplicitEquation E;
    E.realization_ = std::move(G);
    E.rep_ = Rep::Affine;
    E.affine_ = std::move(set);
    return E;
}

ImplicitEquation ImplicitEquation::constraint_map(RealizationPtr G, VectorFieldPtr phi) {
    if (phi->in_dim() != G->element_dim)
        throw std::invalid_argument("ImplicitEquation: constraint map domain != element dim");
    ImplicitEquation E;
    E.realization_ = std::move(G);
    E.rep_ = Rep::ConstraintMap;
    E.constraint_ = std::move(phi);
    return E;
}

ImplicitEquation ImplicitEquation::parametrized(RealizationPtr G, ParametrizedData data) {
    if (data.psi->out_dim() != G->element_dim)
        throw std::invalid_argument("ImplicitEquation: parametrization target != element dim");
    ImplicitEquation E;
    E.realization_ = std::move(G);
    E.rep_ = Rep::Parametrized;
    E.param_ = std::move(data);
    return E;
}

const AffineSubspace& ImplicitEquation::affine_set() const {
    if (rep_ != Rep::Affine) throw std::logic_error("ImplicitEquation: not AFFINE");
    return *affine_;
}

const VectorField& ImplicitEquation::constraint() const {
    if (rep_ != Rep::ConstraintMap) throw std::logic_error("ImplicitEquation: not CONSTRAINT_MAP");
    return *constraint_;
}

const ImplicitEquation::ParametrizedData& ImplicitEquation::parametrization() const {
    if (rep_ != Rep::Parametrized) throw std::logic_error("ImplicitEquation: not PARAMETRIZED");
    return *param_;
}

double ImplicitEquation::membership_residual(const Vector& g, const TolerancePolicy& tol) const {
    switch (rep_) {
    case Rep::Affine:
        return affine_->residual_inf(g);
    case Rep::ConstraintMap:
        return inf_norm(field_value(*constraint_, g));
    case Rep::Parametrized: {
        if (param_->membership) return inf_norm(field_value(*param_->membership, g));
        // No residual supplied: invert the parametrization in least squares.
        const int d = param_->psi->in_dim();
        auto fit = make_vector_field<1>(
            d, realization_->element_dim, [psi = param_->psi, g](auto u) {
                auto z = psi->eval(u);
                for (Eigen::Index i = 0; i < g.size(); ++i)
                    z[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] - g[i];
                return z;
            });
        Vector u0 = param_->chart_params ? param_->chart_params(g) : Vector::Zero(d);
        auto r = gauss_newton(*fit, u0, tol);
        return r.residual_inf;
    }
    }
    return std::numeric_limits<double>::infinity();
}

bool ImplicitEquation::member(const Vector& g, const TolerancePolicy& tol) const {
    const double r = membership_residual(g, tol);
    return r < (rep_ == Rep::Affine ? tol.set_eq_tol : tol.newton_tol);
}

bool is_admissible(const AdmissibleSequence& seq, double tol) {
    if (seq.elements.empty()) throw std::invalid_argument("is_admissible: empty sequence");
    for (std::size_t i = 0; i + 1 < seq.elements.size(); ++i) {
        if (seq.realization->composability_mismatch(seq.elements[i], seq.elements[i + 1]) >= tol)
            return false;
    }
    return true;
}

bool is_solution(const AdmissibleSequence& seq, const ImplicitEquation& E,
                 const TolerancePolicy& tol) {
    if (!is_admissible(seq)) return false;
    return std::all_of(seq.elements.begin(), seq.elements.end(),
                       [&](const Vector& g) { return E.member(g, tol); });
}

bool inclusion_test(const ImplicitEquation& E, Direction dir, const TolerancePolicy& tol) {
    const auto& G = E.realization();
    const auto& set = E.affine_set();
    const AffineMap& fwd = dir == Direction::Forward ? source_map(G) : target_map(G);
    const AffineMap& bwd = dir == Direction::Forward ? target_map(G) : source_map(G);
    // Forward: E <= beta^{-1}(alpha(E)); backward swaps the two projections.
    AffineSubspace image = affine_image(set, fwd, tol);
    AffineSubspace pre = affine_preimage(image, bwd, tol);
    return affine_subset(set, pre, tol);
}

ChainReport extract_affine(const ImplicitEquation& E, ExtractMode mode, int max_iter,
                           const TolerancePolicy& tol) {
    const auto& G = E.realization();
    const AffineSubspace& set = E.affine_set();
    if (max_iter < 0) max_iter = set.ambient_dim() + 1;
    if (max_iter < 1) max_iter = 1;

    const AffineMap& alpha = source_map(G);
    const AffineMap& beta = target_map(G);

    ChainReport report;
    report.mode = mode;
    report.equation_chain.push_back(set);

    const bool track_alpha = mode != ExtractMode::Backward;
    const bool track_beta = mode != ExtractMode::Forward;
    if (track_alpha) report.alpha_chain.push_back(affine_image(set, alpha, tol));
    if (track_beta) report.beta_chain.push_back(affine_image(set, beta, tol));

    for (int k = 1; k <= max_iter; ++k) {
        AffineSubspace next = set;
        if (track_alpha)
            next = affine_intersect(next, affine_preimage(report.alpha_chain[k - 1], beta, tol), tol);
        if (track_beta)
            next = affine_intersect(next, affine_preimage(report.beta_chain[k - 1], alpha, tol), tol);

        report.equation_chain.push_back(next);
        if (track_alpha) report.alpha_chain.push_back(affine_image(next, alpha, tol));
        if (track_beta) report.beta_chain.push_back(affine_image(next, beta, tol));

        if (affine_equal(next, report.equation_chain[k - 1], tol)) {
            report.stabilized_at = k - 1;
            report.extracted = next;
            return report;
        }
    }
    return report; // NOT_STABILIZED; cannot occur for affine data with the default budget
}

std::vector<SequenceChainReport> sequence_extract(const EquationSequence& seq, int k0, int depth,
                                                  const TolerancePolicy& tol) {
    if (depth < 1) throw std::invalid_argument("sequence_extract: depth must be >= 1");
    const auto& G = *seq.realization;
    const AffineMap& alpha = source_map(G);
    const AffineMap& beta = target_map(G);

    const int count = depth + 1;
    std::vector<AffineSubspace> equations;
    equations.reserve(count);
    for (int j = 0; j < count; ++j) {
        ImplicitEquation E = seq.at(k0 + j);
        if (E.rep() != ImplicitEquation::Rep::Affine)
            throw std::invalid_argument("sequence_extract: every E_k must be AFFINE");
        equations.push_back(E.affine_set());
    }

    std::vector<SequenceChainReport> reports(count);
    // table[j][i] = [C_{k0+j}]^i; level i at index j needs level i-1 at index j+1.
    std::vector<std::vector<AffineSubspace>> C(count);
    for (int j = 0; j < count; ++j) {
        reports[j].k = k0 + j;
        C[j].push_back(affine_image(equations[j], alpha, tol));
        reports[j].equation_chain.push_back(equations[j]);
    }
    for (int i = 1; i <= depth; ++i) {
        for (int j = 0; j + i < count; ++j) {
            AffineSubspace cut =
                affine_intersect(equations[j], affine_preimage(C[j + 1][i - 1], beta, tol), tol);
            C[j].push_back(affine_image(cut, alpha, tol));
            reports[j].equation_chain.push_back(cut);
        }
    }
    for (int j = 0; j < count; ++j) {
        reports[j].base_chain = C[j];
        for (std::size_t i = 1; i < C[j].size(); ++i) {
            if (affine_equal(C[j][i], C[j][i - 1], tol)) {
                reports[j].stabilized_at = static_cast<int>(i);
                break;
            }
        }
    }
    return reports;
}

namespace {

struct Neighbor {
    Vector element;
    Vector params; // unknown vector that produced it
};

struct NeighborSearch {
    std::vector<Neighbor> roots;
    double best_failed_residual = std::numeric_limits<double>::infinity();
};

// Successor (forward) or predecessor (backward) feasibility: solve the
// matching equations over the representation's unknowns from multiple seeds.
NeighborSearch find_neighbors(const ImplicitEquation& E, const Vector& g, Direction dir,
                              const std::optional<Vector>& params_hint,
                              const ClassifyOptions& opts, std::mt19937_64& rng,
                              const TolerancePolicy& tol) {
    const auto& G = E.realization();
    const Vector anchor = dir == Direction::Forward ? field_value(*G.target, g)
                                                    : field_value(*G.source, g);
    const VectorFieldPtr match = dir == Direction::Forward ? G.source : G.target;

    VectorFieldPtr residual;
    int unknown_dim = 0;
    const bool parametrized = E.rep() == ImplicitEquation::Rep::Parametrized;
    if (parametrized) {
        const auto& P = E.parametrization();
        unknown_dim = P.psi->in_dim();
        residual = make_vector_field<1>(
            unknown_dim, G.base_dim, [psi = P.psi, match, anchor](auto u) {
                using S = std::remove_cv_t<typename decltype(u)::element_type>;
                auto h = psi->eval(u);
                auto m = match->eval(std::span<const S>(h));
                for (Eigen::Index i = 0; i < anchor.size(); ++i)
                    m[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] - anchor[i];
                return m;
            });
    } else if (E.rep() == ImplicitEquation::Rep::ConstraintMap) {
        unknown_dim = G.element_dim;
        residual = make_vector_field<1>(
            unknown_dim, E.constraint().out_dim() + G.base_dim, [&E, match, anchor](auto h) {
                auto r = E.constraint().eval(h);
                auto m = match->eval(h);
                for (Eigen::Index i = 0; i < anchor.size(); ++i)
                    r.push_back(m[static_cast<std::size_t>(i)] - anchor[i]);
                return r;
            });
    } else {
        throw std::logic_error("find_neighbors: affine equations use the exact route");
    }

    Vector lo = opts.box_lo.size() == unknown_dim ? opts.box_lo
                                                  : Vector::Constant(unknown_dim, -2.0);
    Vector hi = opts.box_hi.size() == unknown_dim ? opts.box_hi
                                                  : Vector::Constant(unknown_dim, 2.0);

    std::vector<Vector> seeds;
    if (params_hint && params_hint->size() == unknown_dim) seeds.push_back(*params_hint);
    if (!parametrized) seeds.push_back(g);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int random_seeds = std::max(1, opts.seeds - static_cast<int>(seeds.size()));
    for (int s = 0; s < random_seeds; ++s) {
        Vector p(unknown_dim);
        for (int i = 0; i < unknown_dim; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * u01(rng);
        seeds.push_back(p);
    }

    NeighborSearch out;
    for (const Vector& s : seeds) {
        auto r = gauss_newton(*residual, s, tol);
        if (!r.ok) {
            out.best_failed_residual = std::min(out.best_failed_residual, r.residual_inf);
            continue;
        }
        Vector element = parametrized ? field_value(*E.parametrization().psi, r.x) : r.x;
        if (!parametrized && !E.member(element, tol)) continue;
        const bool duplicate =
            std::any_of(out.roots.begin(), out.roots.end(), [&](const Neighbor& n) {
                return inf_norm(Vector(n.element - element)) < 1e-6;
            });
        if (!duplicate) out.roots.push_back({element, r.x});
        if (static_cast<int>(out.roots.size()) >= opts.max_roots) break;
    }
    return out;
}

struct DirectionOutcome {
    int depth = 0;
    bool inconclusive = false;
    std::vector<Vector> chain;
};

DirectionOutcome classify_direction(const ImplicitEquation& E, const Vector& g,
                                    const std::optional<Vector>& params_hint, int depth,
                                    Direction dir, const ClassifyOptions& opts,
                                    std::mt19937_64& rng, const TolerancePolicy& tol) {
    DirectionOutcome best;
    if (depth <= 0) return best;
    NeighborSearch search = find_neighbors(E, g, dir, params_hint, opts, rng, tol);
    if (search.roots.empty()) {
        best.inconclusive = search.best_failed_residual < 1e-4;
        return best;
    }
    for (const Neighbor& n : search.roots) {
        DirectionOutcome sub =
            classify_direction(E, n.element, n.params, depth - 1, dir, opts, rng, tol);
        if (1 + sub.depth > best.depth) {
            best.depth = 1 + sub.depth;
            best.inconclusive = sub.inconclusive;
            best.chain.clear();
            best.chain.push_back(n.element);
            best.chain.insert(best.chain.end(), sub.chain.begin(), sub.chain.end());
        }
        if (best.depth == depth) {
            best.inconclusive = false;
            break;
        }
    }
    return best;
}

// Exact route for AFFINE sets: g has k successors iff g lies in E^k of the
// forward chain, and lies in the extracted part iff the depth is unbounded.
DirectionOutcome classify_affine_direction(const ImplicitEquation& E, const Vector& g, int depth,
                                           Direction dir, const TolerancePolicy& tol) {
    ExtractMode mode = dir == Direction::Forward ? ExtractMode::Forward : ExtractMode::Backward;
    ChainReport chain = extract_affine(E, mode, -1, tol);
    DirectionOutcome out;
    if (chain.stabilized() && chain.extracted->contains(g, tol.set_eq_tol)) {
        out.depth = depth;
    } else {
        int d = 0;
        for (std::size_t k = 1; k < chain.equation_chain.size(); ++k) {
            if (!chain.equation_chain[k].is_empty() &&
                chain.equation_chain[k].contains(g, tol.set_eq_tol))
                d = static_cast<int>(k);
        }
        out.depth = std::min(d, depth);
    }
    // Witness chain by walking the matching sets.
    const auto& G = E.realization();
    const AffineMap& alpha = source_map(G);
    const AffineMap& beta = target_map(G);
    Vector cur = g;
    for (int i = 0; i < out.depth; ++i) {
        const AffineMap& match = dir == Direction::Forward ? alpha : beta;
        const AffineMap& emit = dir == Direction::Forward ? beta : alpha;
        AffineSubspace fiber = affine_preimage(AffineSubspace::point(emit(cur)), match, tol);
        // Prefer the deepest chain member that still meets the fiber.
        Vector next;
        bool found = false;
        for (std::size_t k = chain.equation_chain.size(); k-- > 0 && !found;) {
            AffineSubspace cut = affine_intersect(chain.equation_chain[k], fiber, tol);
            if (!cut.is_empty()) {
                next = cut.base_point();
                found = true;
            }
        }
        if (!found) break;
        out.chain.push_back(next);
        cur = next;
    }
    return out;
}

} // namespace

ClassifyResult classify_point(const ImplicitEquation& E, const Vector& g,
                              const ClassifyOptions& opts, const TolerancePolicy& tol) {
    if (!E.member(g, tol))
        throw std::invalid_argument("classify_point: point is not a member of E (residual " +
                                    std::to_string(E.membership_residual(g, tol)) + ")");
    if (opts.seeds < 1) throw std::invalid_argument("classify_point: seeds must be >= 1");

    ClassifyResult result;
    if (E.rep() == ImplicitEquation::Rep::Affine) {
        auto fwd = classify_affine_direction(E, g, opts.depth, Direction::Forward, tol);
        auto bwd = classify_affine_direction(E, g, opts.depth, Direction::Backward, tol);
        result.forward_depth = fwd.depth;
        result.backward_depth = bwd.depth;
        result.forward_chain = std::move(fwd.chain);
        result.backward_chain = std::move(bwd.chain);
        return result;
    }

    std::optional<Vector> hint = opts.params_hint;
    if (!hint && E.rep() == ImplicitEquation::Rep::Parametrized &&
        E.parametrization().chart_params)
        hint = E.parametrization().chart_params(g);

    std::mt19937_64 rng(opts.rng_seed);
    auto fwd = classify_direction(E, g, hint, opts.depth, Direction::Forward, opts, rng, tol);
    auto bwd = classify_direction(E, g, hint, opts.depth, Direction::Backward, opts, rng, tol);
    result.forward_depth = fwd.depth;
    result.backward_depth = bwd.depth;
    result.forward_inconclusive = fwd.inconclusive;
    result.backward_inconclusive = bwd.inconclusive;
    result.forward_chain = std::move(fwd.chain);
    result.backward_chain = std::move(bwd.chain);
    return result;
}

namespace {

std::string mode_name(ExtractMode mode) {
    switch (mode) {
    case ExtractMode::Forward: return "FORWARD";
    case ExtractMode::Backward: return "BACKWARD";
    case ExtractMode::Full: return "FULL";
    }
    return "?";
}

std::string dim_text(const AffineSubspace& s) {
    return s.is_empty() ? std::string("EMPTY") : std::to_string(s.dim());
}

} // namespace

std::string ChainReport::to_text() const {
    std::string out = "mode " + mode_name(mode) + "\n";
    for (std::size_t k = 0; k < equation_chain.size(); ++k) {
        out += "k=" + std::to_string(k);
        if (k < alpha_chain.size()) out += " dim C=" + dim_text(alpha_chain[k]);
        if (k < beta_chain.size()) out += " dim D=" + dim_text(beta_chain[k]);
        out += " dim E=" + dim_text(equation_chain[k]) + "\n";
    }
    if (stabilized_at)
        out += "stabilized k=" + std::to_string(*stabilized_at) +
               " extracted dim=" + dim_text(*extracted) + "\n";
    else
        out += "NOT_STABILIZED\n";
    return out;
}

std::string ChainReport::to_csv() const {
    std::string out = csv_header("extract");
    out += "mode,k,dim_base,dim_E,stabilized\n";
    const auto& base = mode == ExtractMode::Backward ? beta_chain : alpha_chain;
    for (std::size_t k = 0; k < equation_chain.size(); ++k) {
        const bool fixed = stabilized_at && static_cast<int>(k) >= *stabilized_at;
        out += csv_row({mode_name(mode), std::to_string(k),
                        k < base.size() ? dim_text(base[k]) : std::string("-"),
                        dim_text(equation_chain[k]), fixed ? "1" : "0"});
    }
    return out;
}

} // namespace gflow
