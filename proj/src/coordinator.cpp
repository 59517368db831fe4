#include "mgem/coordinator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mgem {

Instance::Instance(Scenario s, const EnumerationOptions& opt)
    : scenario((require_valid(s), std::move(s))),
      prices(PriceTransform::from(scenario.market)),
      worst_case(scenario.uncertainty, scenario.slots(), opt) {}

Multipliers dual_step(const Multipliers& z, const Subgradients& g, double stepsize) {
  return {(z.mu + stepsize * g.mu).cwiseMax(0.0), z.lambda + stepsize * g.lambda,
          z.nu + stepsize * g.nu};
}

namespace {

double total_capacity(const Scenario& s) {
  double c = 0.0;
  for (const auto& g : s.generators) c += g.p_max;
  return c;
}

Subgradients from_aggregates(const Scenario& s, const LocalReport& r) {
  const auto& m = s.market;
  Subgradients g;
  g.mu = (m.spinning_reserve.array() - (total_capacity(s) - r.sum_p_g.array())).matrix();
  g.lambda = m.fixed_load + r.sum_p_d + r.sum_p_e - r.sum_p_g - r.p_r;
  g.nu = r.p_r + r.sum_p_b - r.p_tilde_r;
  return g;
}

LocalReport aggregate(const Schedule& x) {
  return {x.p_g.colwise().sum().transpose(), x.p_d.colwise().sum().transpose(),
          x.p_e.colwise().sum().transpose(), x.p_b.colwise().sum().transpose(),
          x.p_r, x.p_tilde_r, 0.0};
}

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Subgradients compute_subgradients(const Scenario& s, const Schedule& x) {
  return from_aggregates(s, aggregate(x));
}

Schedule primal_average(const Schedule& average, const Schedule& iterate, int k,
                        const Scenario& s) {
  const double w_new = 1.0 / k;
  const double w_old = (k - 1.0) / k;
  Schedule out;
  out.p_g = w_new * iterate.p_g + w_old * average.p_g;
  out.p_d = w_new * iterate.p_d + w_old * average.p_d;
  out.p_e = w_new * iterate.p_e + w_old * average.p_e;
  out.p_b = w_new * iterate.p_b + w_old * average.p_b;
  out.p_r = w_new * iterate.p_r + w_old * average.p_r;
  out.p_tilde_r = w_new * iterate.p_tilde_r + w_old * average.p_tilde_r;
  out.b.resize(out.p_b.rows(), out.p_b.cols());
  for (Index j = 0; j < out.p_b.rows(); ++j) {
    out.b.row(j) = storage_levels(s.storage[j], out.p_b.row(j).transpose()).transpose();
  }
  return out;
}

Schedule primal_average(const std::vector<Schedule>& history, const Scenario& s) {
  if (history.empty()) throw std::invalid_argument("primal_average: empty history");
  Schedule avg = history.front();
  for (std::size_t k = 1; k < history.size(); ++k) {
    avg = primal_average(avg, history[k], static_cast<int>(k + 1), s);
  }
  return primal_average(avg, avg, 1, s);  // rebuild storage levels
}

std::vector<Violation> schedule_violations(const Scenario& s, const Schedule& x, double tol,
                                           bool coupling) {
  std::vector<Violation> out;
  const int T = s.slots();
  auto fail = [&](const char* code, const std::string& what, Index unit, Index t) {
    std::ostringstream msg;
    msg << what << " (unit " << unit + 1 << ", slot " << t + 1 << ")";
    out.push_back({code, msg.str()});
  };
  for (std::size_t m = 0; m < s.generators.size(); ++m) {
    const auto& g = s.generators[m];
    for (int t = 0; t < T; ++t) {
      const double p = x.p_g(m, t);
      if (p < g.p_min - tol || p > g.p_max + tol) fail("generator-bounds", "output out of range", m, t);
      const std::optional<double> prev =
          t > 0 ? std::optional<double>(x.p_g(m, t - 1)) : g.initial_output;
      if (prev && (p - *prev > g.ramp_up + tol || *prev - p > g.ramp_down + tol)) {
        fail("generator-ramp", "ramp limit exceeded", m, t);
      }
    }
  }
  for (std::size_t n = 0; n < s.class1.size(); ++n) {
    for (int t = 0; t < T; ++t) {
      const double p = x.p_d(n, t);
      if (p < s.class1[n].p_min - tol || p > s.class1[n].p_max + tol) {
        fail("class1-bounds", "class-1 load out of range", n, t);
      }
    }
  }
  for (std::size_t q = 0; q < s.class2.size(); ++q) {
    const auto& e = s.class2[q];
    for (int t = 0; t < T; ++t) {
      const double p = x.p_e(q, t);
      if (p < -tol || p > e.p_max_per_slot[t] + tol) fail("class2-bounds", "class-2 load out of range", q, t);
    }
    if (std::abs(x.p_e.row(q).sum() - e.energy_total) > tol) {
      fail("class2-energy", "energy requirement not met", q, T - 1);
    }
  }
  for (std::size_t j = 0; j < s.storage.size(); ++j) {
    const auto& u = s.storage[j];
    double prev = u.b_initial;
    for (int t = 0; t < T; ++t) {
      const double p = x.p_b(j, t);
      const double b = x.b(j, t);
      if (p < u.p_chg_min - tol || p > u.p_chg_max + tol) fail("storage-power", "charging out of range", j, t);
      if (b < -tol || b > u.b_max + tol) fail("storage-level", "stored energy out of range", j, t);
      if (std::abs(b - (prev + p)) > tol) fail("storage-dynamics", "dynamics violated", j, t);
      if (p + u.efficiency * prev < -tol) fail("storage-discharge", "discharge exceeds efficiency limit", j, t);
      prev = b;
    }
    if (T > 0 && x.b(j, T - 1) < u.b_min_final - tol) {
      fail("storage-final", "final stored energy below minimum", j, T - 1);
    }
  }
  for (int t = 0; t < T; ++t) {
    if (x.p_r[t] < s.market.p_r_min - tol || x.p_r[t] > s.market.p_r_max + tol) {
      fail("grid-bounds", "P_R out of range", 0, t);
    }
  }
  if (coupling) {
    const Subgradients g = compute_subgradients(s, x);
    for (int t = 0; t < T; ++t) {
      if (g.mu[t] > tol) fail("reserve", "spinning reserve not met", 0, t);
      if (std::abs(g.lambda[t]) > tol) fail("balance", "power balance violated", 0, t);
      if (std::abs(g.nu[t]) > tol) fail("transformation", "P~_R != P_R + sum P_B", 0, t);
    }
  }
  return out;
}

CostBreakdown evaluate_net_cost(const Instance& inst, const Schedule& x, double tol,
                                bool coupling) {
  const Scenario& s = inst.scenario;
  auto v = schedule_violations(s, x, tol, coupling);
  if (!v.empty()) throw ValidationError(std::move(v));
  const int T = s.slots();
  CostBreakdown c;
  for (std::size_t m = 0; m < s.generators.size(); ++m) {
    for (int t = 0; t < T; ++t) c.generation += s.generators[m].cost(x.p_g(m, t));
  }
  for (std::size_t n = 0; n < s.class1.size(); ++n) {
    for (int t = 0; t < T; ++t) c.class1_utility += s.class1[n].utility(x.p_d(n, t));
  }
  for (std::size_t q = 0; q < s.class2.size(); ++q) {
    c.class2_utility += s.class2[q].util_weights.dot(x.p_e.row(q).transpose());
  }
  for (std::size_t j = 0; j < s.storage.size(); ++j) {
    for (int t = 0; t < T; ++t) c.holding += s.storage[j].holding_cost(t, x.b(j, t));
  }
  const auto worst = inst.worst_case.evaluate(x.p_tilde_r, inst.prices);
  c.transaction = worst.cost;
  c.worst_total = worst.worst_total;
  c.worst_w = worst.worst_w;
  c.total = c.generation - c.class1_utility - c.class2_utility + c.holding + c.transaction;
  return c;
}

double default_stepsize(const Scenario& s, double scale) {
  const double price = s.market.purchase_price.size() ? s.market.purchase_price.maxCoeff() : 1.0;
  const double load = std::max(1.0, inf_norm(s.market.fixed_load));
  return scale * std::max(price, 1e-12) / load;
}

bool recover_feasible(const Scenario& s, Schedule& x, double tol) {
  const Subgradients g = compute_subgradients(s, x);
  bool ok = (g.mu.array() <= tol).all();
  for (Index t = 0; t < x.p_r.size(); ++t) {
    const double needed = x.p_r[t] + g.lambda[t];
    x.p_r[t] = std::clamp(needed, s.market.p_r_min, s.market.p_r_max);
    // Whatever the box refuses goes to the class-1 loads, which have box
    // constraints only; the shift is split in proportion to their room.
    const double rest = needed - x.p_r[t];
    double room = 0.0;
    for (std::size_t n = 0; n < s.class1.size(); ++n) {
      const auto& d = s.class1[n];
      room += rest > 0.0 ? x.p_d(n, t) - d.p_min : d.p_max - x.p_d(n, t);
    }
    const double share = room > 0.0 ? std::min(1.0, std::abs(rest) / room) : 0.0;
    for (std::size_t n = 0; n < s.class1.size(); ++n) {
      const auto& d = s.class1[n];
      x.p_d(n, t) = rest > 0.0 ? x.p_d(n, t) - share * (x.p_d(n, t) - d.p_min)
                               : x.p_d(n, t) + share * (d.p_max - x.p_d(n, t));
    }
    if (std::abs(rest) > room + tol) ok = false;
  }
  x.p_tilde_r = x.p_r + x.p_b.colwise().sum().transpose();
  return ok;
}

Schedule solve_local(const Instance& inst, const Multipliers& z, const CoordinatorParams& p,
                     LocalReport* report) {
  const Scenario& s = inst.scenario;
  Schedule x = Schedule::zeros(s);
  double objective = 0.0;
  for (std::size_t m = 0; m < s.generators.size(); ++m) {
    const Vector pg = solve_dg(s.generators[m], z, p.qp);
    objective += dg_objective(s.generators[m], z, pg);
    x.p_g.row(m) = pg.transpose();
  }
  for (std::size_t n = 0; n < s.class1.size(); ++n) {
    const Vector pd = solve_class1(s.class1[n], z);
    objective += class1_objective(s.class1[n], z, pd);
    x.p_d.row(n) = pd.transpose();
  }
  for (std::size_t q = 0; q < s.class2.size(); ++q) {
    const Vector pe = solve_class2(s.class2[q], z);
    objective += class2_objective(s.class2[q], z, pe);
    x.p_e.row(q) = pe.transpose();
  }
  for (std::size_t j = 0; j < s.storage.size(); ++j) {
    const auto st = solve_storage(s.storage[j], z, p.qp);
    objective += storage_objective(s.storage[j], z, st.p_b);
    x.p_b.row(j) = st.p_b.transpose();
    x.b.row(j) = st.b.transpose();
  }
  const auto ren = solve_renewable(s, inst.prices, inst.worst_case, z, p.bundle);
  x.p_r = ren.p_r;
  x.p_tilde_r = ren.p_tilde_r;
  objective += (z.nu - z.lambda).dot(ren.p_r) + ren.modified_cost;

  if (report) {
    *report = aggregate(x);
    report->local_objective = objective;
  }
  return x;
}

RunResult run(const Instance& inst, const CoordinatorParams& params) {
  const Scenario& s = inst.scenario;
  const int T = s.slots();
  RunResult out;
  out.stepsize = params.stepsize ? *params.stepsize : default_stepsize(s, params.stepsize_scale);
  if (!(out.stepsize > 0.0)) throw std::invalid_argument("stepsize must be positive");

  const double capacity = total_capacity(s);
  Multipliers z = Multipliers::zeros(T);
  out.best_dual = -std::numeric_limits<double>::infinity();
  out.gap = std::numeric_limits<double>::infinity();

  for (int k = 0; k < params.max_iters; ++k) {
    LocalReport report;
    Schedule x = solve_local(inst, z, params, &report);
    const Subgradients g = from_aggregates(s, report);

    // Dual function: local optima plus the constant terms of the Lagrangian.
    const double dual = report.local_objective +
                        z.mu.dot((s.market.spinning_reserve.array() - capacity).matrix()) +
                        z.lambda.dot(s.market.fixed_load);
    out.best_dual = std::max(out.best_dual, dual);

    out.average = k == 0 ? primal_average(x, x, 1, s) : primal_average(out.average, x, k + 1, s);
    out.last = std::move(x);

    const Subgradients ga = compute_subgradients(s, out.average);
    IterationRecord rec;
    rec.k = k;
    rec.z = z;
    rec.g = g;
    rec.residual_balance = inf_norm(ga.lambda);
    rec.residual_transform = inf_norm(ga.nu);
    rec.residual_reserve = std::max(0.0, ga.mu.size() ? ga.mu.maxCoeff() : 0.0);
    rec.dual_value = dual;
    rec.best_dual = out.best_dual;

    Schedule rec_x = out.average;
    const bool feasible = recover_feasible(s, rec_x);
    const auto rc = evaluate_net_cost(inst, rec_x, 1e-6, false);
    rec.recovered_cost = rc.total;
    rec.gap = feasible ? (rc.total - out.best_dual) / std::max(1.0, std::abs(rc.total))
                       : std::numeric_limits<double>::infinity();
    if (params.record_schedules) rec.average = out.average;

    out.residual = std::max({rec.residual_balance, rec.residual_transform, rec.residual_reserve});
    out.gap = rec.gap;
    out.recovered = std::move(rec_x);
    out.recovered_feasible = feasible;
    out.log.push_back(std::move(rec));
    out.iterations = k + 1;

    z = dual_step(z, g, out.stepsize);
    if (out.residual <= params.tol_residual && out.gap <= params.tol_gap) {
      out.converged = true;
      break;
    }
  }
  out.z = z;
  out.average_cost = evaluate_net_cost(inst, out.average, 1e-6, false);
  out.recovered_cost = evaluate_net_cost(inst, out.recovered, 1e-6, false);
  return out;
}

}  // namespace mgem
