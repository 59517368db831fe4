#pragma once

#include <vector>

#include "mgem/scenario.hpp"
#include "mgem/uncertainty.hpp"

namespace mgem {

/// delta = (alpha - beta) / 2, gamma = (alpha + beta) / 2.
struct PriceTransform {
  Vector delta;
  Vector gamma;

  static PriceTransform from(const Market& m);
  Vector alpha() const { return gamma + delta; }
  Vector beta() const { return gamma - delta; }
};

struct WorstCaseResult {
  double cost = 0.0;
  Matrix worst_w;      // facilities x slots, a vertex of the uncertainty set
  Vector worst_total;  // sum over facilities
};

/// Worst-case evaluator over a fixed vertex set. The objective only depends on
/// per-slot totals, so each block keeps its distinct total vectors with the
/// first vertex producing each. For the joint model the totals are further
/// restricted to vertices of the projected box-budget polytope, which holds
/// every maximizer of a convex function of the totals.
class WorstCase {
 public:
  struct Block {
    int first_slot = 0;
    int last_slot = 0;
    Matrix totals;              // candidates x length
    std::vector<Index> source;  // vertex index in the block list
  };

  /// Pruning needs the box and budget data of `model`; pass prune = false to
  /// keep every distinct total.
  WorstCase(const UncertaintyModel& model, UncertaintySet set, bool prune = true);
  /// Enumerates the vertices of `model` itself.
  WorstCase(const UncertaintyModel& model, int slots, const EnumerationOptions& opt = {});

  const UncertaintySet& set() const { return set_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int slots() const { return set_.slots; }
  Index candidate_count() const;

  /// max over vertices of sum_t delta|p - s| + gamma (p - s), summed over
  /// sub-horizons. Ties keep the earliest candidate.
  WorstCaseResult evaluate(const Vector& p_tilde, const PriceTransform& prices) const;

 private:
  UncertaintySet set_;
  std::vector<Block> blocks_;
};

WorstCaseResult worst_case_cost(const Vector& p_tilde, const WorstCase& wc,
                                const PriceTransform& prices);

/// G~(p) = G(p) - nu'p.
double modified_cost(const Vector& p_tilde, const Vector& nu, const WorstCase& wc,
                     const PriceTransform& prices);

/// alpha - nu where p >= the worst-case total, else beta - nu.
Vector danskin_subgradient(const Vector& p_tilde, const Vector& nu, const WorstCaseResult& worst,
                           const PriceTransform& prices);

}  // namespace mgem
