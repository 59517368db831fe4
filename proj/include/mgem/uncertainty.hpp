#pragma once

#include <vector>

#include "mgem/polytope.hpp"
#include "mgem/scenario.hpp"

namespace mgem {

/// Vertices of the renewable uncertainty set restricted to the slots
/// [first_slot, last_slot]. A vertex stacks W_i^t facility-major:
/// coordinate i * length() + (t - first_slot).
struct VertexBlock {
  int first_slot = 0;
  int last_slot = 0;
  int facilities = 0;
  VertexList<double> vertices;

  int length() const { return last_slot - first_slot + 1; }

  /// Per-slot totals sum_i W_i^t, one row per vertex.
  Matrix totals() const;
  /// Vertex k reshaped to facilities x length().
  Matrix unstack(Index k) const;
};

/// The joint model yields one block per sub-horizon (the inner maximization
/// separates across them). The per-facility model yields a single block over
/// the whole horizon holding the product of every (facility, sub-horizon)
/// list.
struct UncertaintySet {
  UncertaintyKind kind = UncertaintyKind::Joint;
  int slots = 0;
  int facilities = 0;
  std::vector<VertexBlock> blocks;

  Index vertex_count() const;
};

UncertaintySet uncertainty_vertices(const UncertaintyModel& u, int slots,
                                    const EnumerationOptions& opt = {});

/// The box-budget polytope of one joint sub-horizon in the stacked layout.
BoxBudgetPolytope<double> joint_block_polytope(const UncertaintyModel& u, const BudgetBlock& b);

}  // namespace mgem
