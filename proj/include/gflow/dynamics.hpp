#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gflow/gauss_newton.hpp"
#include "gflow/groupoid.hpp"

namespace gflow {

// A submanifold E of a groupoid realization, in one of three representations.
// The exact set algorithms operate on AFFINE; the other two support pointwise
// membership and bounded-depth feasibility search.
class ImplicitEquation {
public:
    enum class Rep { Affine, ConstraintMap, Parametrized };

    struct ParametrizedData {
        VectorFieldPtr psi;                                // R^d -> element chart
        VectorFieldPtr membership;                         // optional residual, element -> R^m
        std::function<Vector(const Vector&)> chart_params; // optional parameter recovery
    };

    static ImplicitEquation affine(RealizationPtr G, AffineSubspace set);
    static ImplicitEquation constraint_map(RealizationPtr G, VectorFieldPtr phi);
    static ImplicitEquation parametrized(RealizationPtr G, ParametrizedData data);

    Rep rep() const { return rep_; }
    const GroupoidRealization& realization() const { return *realization_; }
    RealizationPtr realization_ptr() const { return realization_; }
    const AffineSubspace& affine_set() const;
    const VectorField& constraint() const;
    const ParametrizedData& parametrization() const;

    bool member(const Vector& g, const TolerancePolicy& tol = {}) const;
    double membership_residual(const Vector& g, const TolerancePolicy& tol = {}) const;

private:
    ImplicitEquation() = default;
    RealizationPtr realization_;
    Rep rep_ = Rep::Affine;
    std::optional<AffineSubspace> affine_;
    VectorFieldPtr constraint_;
    std::optional<ParametrizedData> param_;
};

struct AdmissibleSequence {
    RealizationPtr realization;
    std::vector<Vector> elements;
};

bool is_admissible(const AdmissibleSequence& seq, double tol = 1e-10);
bool is_solution(const AdmissibleSequence& seq, const ImplicitEquation& E,
                 const TolerancePolicy& tol = {});

enum class ExtractMode { Forward, Backward, Full };
enum class Direction { Forward, Backward };

// Exact subset test E <= beta^{-1}(alpha(E)) (forward) or E <= alpha^{-1}(beta(E)).
bool inclusion_test(const ImplicitEquation& E, Direction dir, const TolerancePolicy& tol = {});

// The constraint chains of one extraction run. The stabilization index is the
// smallest k with E^{k+1} = E^k (so the extracted part equals E^k); one extra
// confirming iterate is kept in the lists.
struct ChainReport {
    ExtractMode mode = ExtractMode::Forward;
    std::vector<AffineSubspace> alpha_chain; // C^k (Forward, Full)
    std::vector<AffineSubspace> beta_chain;  // D^k (Backward, Full)
    std::vector<AffineSubspace> equation_chain;
    std::optional<int> stabilized_at;
    std::optional<AffineSubspace> extracted;

    bool stabilized() const { return stabilized_at.has_value(); }
    std::string to_text() const;
    std::string to_csv() const;
};

// Iterates the constraint-chain recursion on an AFFINE equation. max_iter < 0
// selects the default ambient_dim + 1; dimensions strictly decrease until the
// fixed point, so the guard cannot fire on affine data.
ChainReport extract_affine(const ImplicitEquation& E, ExtractMode mode, int max_iter = -1,
                           const TolerancePolicy& tol = {});

struct EquationSequence {
    RealizationPtr realization;
    std::function<ImplicitEquation(int)> at;
};

struct SequenceChainReport {
    int k = 0;
    std::vector<AffineSubspace> base_chain;     // [C_k]^i, i = 0..available depth
    std::vector<AffineSubspace> equation_chain; // [E_k]^i
    std::optional<int> stabilized_at;           // smallest i >= 1 with [C_k]^i = [C_k]^{i-1}
};

// Time-indexed variant: computes [C_k]^i = alpha(E_k cap beta^{-1}([C_{k+1}]^{i-1}))
// for k0 <= k <= k0 + depth; index k0 + j only supports depth - j iterations.
std::vector<SequenceChainReport> sequence_extract(const EquationSequence& seq, int k0, int depth,
                                                  const TolerancePolicy& tol = {});

struct ClassifyOptions {
    int depth = 3;
    int seeds = 8;
    Vector box_lo, box_hi; // seed box for feasibility solves; default [-2, 2]^d
    std::optional<Vector> params_hint;
    std::uint64_t rng_seed = 0;
    int max_roots = 4;
};

struct ClassifyResult {
    int forward_depth = 0;
    int backward_depth = 0;
    bool forward_inconclusive = false;
    bool backward_inconclusive = false;
    std::vector<Vector> forward_chain; // witness successors, innermost first
    std::vector<Vector> backward_chain;
};

// Bounded-depth integrability certificate at a point of E. Depths count strict
// successors/predecessors; a failure with all seeds stalling below 1e-4
// residual is reported as inconclusive rather than asserted.
ClassifyResult classify_point(const ImplicitEquation& E, const Vector& g,
                              const ClassifyOptions& opts, const TolerancePolicy& tol = {});

} // namespace gflow
