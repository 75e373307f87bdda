#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "gflow/affine.hpp"
#include "gflow/fields.hpp"

namespace gflow {

enum class GroupoidKind { PairGroupoid, SE2Group, CotangentPair, CotangentSE2, Restricted };

struct NotComposableError : std::runtime_error {
    explicit NotComposableError(double mismatch_)
        : std::runtime_error("elements are not composable (source/target mismatch " +
                             std::to_string(mismatch_) + ")"),
          mismatch(mismatch_) {}
    double mismatch;
};

// A concrete groupoid in a fixed chart: elements and base points are plain
// coordinate vectors, and the five structural maps are pure functions on them.
// When is_affine holds, source and target are also exposed as affine maps so
// the exact set algorithms can use them.
struct GroupoidRealization {
    GroupoidKind kind = GroupoidKind::Restricted;
    int element_dim = 0;
    int base_dim = 0;
    bool is_affine = false;
    double compose_tol = 1e-10;
    int pair_n = 0; // for the pair-groupoid family: base = R^pair_n

    VectorFieldPtr source;   // element -> base
    VectorFieldPtr target;   // element -> base
    VectorFieldPtr multiply; // (g, h) concatenated -> element
    VectorFieldPtr identity; // base -> element
    VectorFieldPtr inverse;  // element -> element

    std::optional<AffineMap> source_affine;
    std::optional<AffineMap> target_affine;

    double composability_mismatch(const Vector& g, const Vector& h) const;
    bool composable(const Vector& g, const Vector& h) const;
};

using RealizationPtr = std::shared_ptr<const GroupoidRealization>;

RealizationPtr make_pair_groupoid(int n);
RealizationPtr make_se2_group();
RealizationPtr make_cotangent_pair_groupoid(int n);
RealizationPtr make_cotangent_se2();

// Composition with the composability check; throws NotComposableError.
Vector compose(const GroupoidRealization& G, const Vector& g, const Vector& h);

// (source covector, target covector) of a cotangent-groupoid element.
std::pair<Vector, Vector> cotangent_source_target(const GroupoidRealization& CT, const Vector& z);

} // namespace gflow
