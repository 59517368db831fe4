#pragma once

#include <cstddef>

#include "mgem/coordinator.hpp"

namespace mgem {

struct OracleOptions {
  /// Add vertex constraints on demand instead of all at once.
  bool lazy = true;
  /// Guard on instantiated auxiliary (epigraph) variables.
  std::size_t max_aux_variables = 200'000;
  QpOptions qp{1e-9, 300};
  /// A vertex whose cost exceeds its epigraph variable by more than this
  /// (relative) is added in the next round.
  double cut_tolerance = 1e-9;
};

struct OracleResult {
  Schedule schedule;
  double objective = 0.0;  // net cost of the schedule, exact G
  double qp_objective = 0.0;
  CostBreakdown costs;
  std::size_t vertex_constraints = 0;
  int rounds = 0;
};

/// Exact solve of the transformed problem: G is replaced by one epigraph
/// variable per sub-horizon bounded below by every vertex's transaction cost,
/// written with |.| splits  u >= +-(P~ - s).
OracleResult centralized_solve(const Instance& inst, const OracleOptions& opt = {});

struct CertifyReport {
  double distributed_objective = 0.0;
  double oracle_objective = 0.0;
  double relative_gap = 0.0;  // |distributed - oracle| / max(1, |oracle|)
  // Largest per-slot deviation of each aggregate between the two schedules.
  double dev_p_g = 0.0;
  double dev_p_d = 0.0;
  double dev_p_e = 0.0;
  double dev_p_b = 0.0;
  double dev_p_r = 0.0;
  double dev_p_tilde_r = 0.0;
  bool passed = false;
};

CertifyReport certify(const Instance& inst, const Schedule& distributed, const OracleResult& oracle,
                      double rel_tol);

}  // namespace mgem
