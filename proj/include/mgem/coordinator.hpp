#pragma once

#include <optional>
#include <vector>

#include "mgem/subproblems.hpp"

namespace mgem {

/// A validated scenario with its price transform and worst-case evaluator.
/// The vertex set is enumerated once here, before any optimization.
struct Instance {
  Scenario scenario;
  PriceTransform prices;
  WorstCase worst_case;

  explicit Instance(Scenario s, const EnumerationOptions& opt = {});
};

struct Subgradients {
  Vector mu;      // SR - sum (P_max - P_G)
  Vector lambda;  // balance residual
  Vector nu;      // transformation residual
};

/// mu <- [mu + a g_mu]^+, lambda <- lambda + a g_lambda, nu <- nu + a g_nu.
Multipliers dual_step(const Multipliers& z, const Subgradients& g, double stepsize);

Subgradients compute_subgradients(const Scenario& s, const Schedule& x);

/// x_avg(k) = (1/k) x(k-1) + ((k-1)/k) x_avg(k-1); storage levels are
/// rebuilt from the averaged charging powers.
Schedule primal_average(const Schedule& average, const Schedule& iterate, int k,
                        const Scenario& s);
Schedule primal_average(const std::vector<Schedule>& history, const Scenario& s);

struct CostBreakdown {
  double generation = 0.0;
  double class1_utility = 0.0;
  double class2_utility = 0.0;
  double holding = 0.0;
  double transaction = 0.0;  // worst-case G
  double total = 0.0;        // generation - utilities + holding + transaction
  Vector worst_total;
  Matrix worst_w;
};

/// Constraint violations above `tol`. Coupling constraints (reserve, balance,
/// transformation) are checked only when asked for.
std::vector<Violation> schedule_violations(const Scenario& s, const Schedule& x, double tol,
                                           bool coupling = true);

/// Net cost of x. Throws ValidationError listing violations when x is
/// infeasible beyond `tol`.
CostBreakdown evaluate_net_cost(const Instance& inst, const Schedule& x, double tol = 1e-6,
                                bool coupling = true);

/// What a local controller reports back to the coordinator each iteration:
/// only aggregates and the renewable pair cross this interface.
struct LocalReport {
  Vector sum_p_g;
  Vector sum_p_d;
  Vector sum_p_e;
  Vector sum_p_b;
  Vector p_r;
  Vector p_tilde_r;
  double local_objective = 0.0;
};

struct CoordinatorParams {
  /// Explicit stepsize; when unset, a = stepsize_scale * max(alpha) / max(L).
  std::optional<double> stepsize;
  double stepsize_scale = 0.05;
  int max_iters = 5000;
  double tol_residual = 1e-2;
  double tol_gap = 1e-2;
  BundleParams<double> bundle;
  QpOptions qp;
  /// Keep every averaged schedule in the log (memory heavy).
  bool record_schedules = false;
};

double default_stepsize(const Scenario& s, double scale);

struct IterationRecord {
  int k = 0;
  Multipliers z;               // multipliers the iterate was computed at
  Subgradients g;              // subgradients of that iterate
  double residual_balance = 0.0;    // |g_lambda(x_avg)|_inf
  double residual_transform = 0.0;  // |g_nu(x_avg)|_inf
  double residual_reserve = 0.0;    // max(0, g_mu(x_avg))
  double dual_value = 0.0;
  double best_dual = 0.0;
  double recovered_cost = 0.0;
  double gap = 0.0;
  std::optional<Schedule> average;
};

struct RunResult {
  Schedule average;    // running mean of the iterates
  Schedule recovered;  // average with P_R shifted to close the balance
  Schedule last;
  Multipliers z;
  std::vector<IterationRecord> log;
  int iterations = 0;
  bool converged = false;
  bool recovered_feasible = false;
  double stepsize = 0.0;
  double best_dual = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  CostBreakdown average_cost;
  CostBreakdown recovered_cost;
};

/// Shift P_R within its box so the balance closes, absorbing any remainder
/// in the class-1 loads, then rebuild P~_R. Returns false when the boxes or
/// the reserve prevent exact feasibility.
bool recover_feasible(const Scenario& s, Schedule& x, double tol = 1e-9);

/// One pass over every local controller at the multipliers z.
Schedule solve_local(const Instance& inst, const Multipliers& z, const CoordinatorParams& p,
                     LocalReport* report = nullptr);

/// Dual subgradient method with primal averaging. Stops when the averaged
/// residual is below tol_residual and the certified gap below tol_gap.
RunResult run(const Instance& inst, const CoordinatorParams& params = {});

}  // namespace mgem
