#include "mgem/subproblems.hpp"

#include <algorithm>
#include <numeric>

namespace mgem {

Schedule Schedule::zeros(const Scenario& s) {
  const int T = s.slots();
  const auto count = [](const auto& v) { return static_cast<Index>(v.size()); };
  return {Matrix::Zero(count(s.generators), T), Matrix::Zero(count(s.class1), T),
          Matrix::Zero(count(s.class2), T),     Matrix::Zero(count(s.storage), T),
          Matrix::Zero(count(s.storage), T),    Vector::Zero(T),
          Vector::Zero(T)};
}

Vector storage_levels(const StorageUnit& unit, const Vector& p_b) {
  Vector b(p_b.size());
  double level = unit.b_initial;
  for (Index t = 0; t < p_b.size(); ++t) {
    level += p_b[t];
    b[t] = level;
  }
  return b;
}

double dg_objective(const Generator& g, const Multipliers& z, const Vector& p) {
  double v = 0.0;
  for (Index t = 0; t < p.size(); ++t) v += g.cost(p[t]) + (z.mu[t] - z.lambda[t]) * p[t];
  return v;
}

double class1_objective(const Class1Load& d, const Multipliers& z, const Vector& p) {
  double v = 0.0;
  for (Index t = 0; t < p.size(); ++t) v += z.lambda[t] * p[t] - d.utility(p[t]);
  return v;
}

double class2_objective(const Class2Load& e, const Multipliers& z, const Vector& p) {
  return (z.lambda - e.util_weights).dot(p);
}

double storage_objective(const StorageUnit& u, const Multipliers& z, const Vector& p_b) {
  const Vector b = storage_levels(u, p_b);
  double v = z.nu.dot(p_b);
  for (Index t = 0; t < b.size(); ++t) v += u.holding_cost(static_cast<int>(t), b[t]);
  return v;
}

double renewable_objective(const Multipliers& z, const Vector& p_r, const Vector& p_tilde,
                           double worst_case_cost) {
  return (z.nu - z.lambda).dot(p_r) + worst_case_cost - z.nu.dot(p_tilde);
}

QuadraticProgram<double> dg_program(const Generator& g, const Multipliers& z) {
  const Index T = z.lambda.size();
  QuadraticProgram<double> qp(T);
  qp.H.diagonal().setConstant(2.0 * g.cost_a);
  qp.c = (g.cost_b + z.mu.array() - z.lambda.array()).matrix();
  for (Index t = 0; t < T; ++t) qp.add_bounds(t, g.p_min, g.p_max);
  for (Index t = 1; t < T; ++t) {
    Vector row = Vector::Zero(T);
    row[t] = 1.0;
    row[t - 1] = -1.0;
    qp.add_inequality(row, g.ramp_up);
    qp.add_inequality(-row, g.ramp_down);
  }
  if (g.initial_output && T > 0) {
    qp.add_inequality(Vector::Unit(T, 0), g.ramp_up + *g.initial_output);
    qp.add_inequality(-Vector::Unit(T, 0), g.ramp_down - *g.initial_output);
  }
  return qp;
}

QuadraticProgram<double> class2_program(const Class2Load& e, const Multipliers& z) {
  const Index T = z.lambda.size();
  QuadraticProgram<double> qp(T);
  qp.c = z.lambda - e.util_weights;
  for (Index t = 0; t < T; ++t) qp.add_bounds(t, 0.0, e.p_max_per_slot[t]);
  qp.add_equality(Vector::Ones(T), e.energy_total);
  return qp;
}

QuadraticProgram<double> storage_program(const StorageUnit& u, const Multipliers& z) {
  const Index T = z.nu.size();
  QuadraticProgram<double> qp(T);
  // H^t(b^t) contributes -psi^t to every p^tau with tau <= t.
  double tail = 0.0;
  for (Index t = T; t-- > 0;) {
    tail += u.cost_weights[t];
    qp.c[t] = z.nu[t] - tail;
  }
  for (Index t = 0; t < T; ++t) qp.add_bounds(t, u.p_chg_min, u.p_chg_max);
  for (Index t = 0; t < T; ++t) {
    Vector prefix = Vector::Zero(T);
    prefix.head(t + 1).setOnes();
    qp.add_inequality(prefix, u.b_max - u.b_initial);  // b^t <= B^max
    qp.add_inequality(-prefix, u.b_initial);           // b^t >= 0
    Vector floor = Vector::Zero(T);                    // p^t >= -eta b^{t-1}
    floor.head(t).setConstant(-u.efficiency);
    floor[t] = -1.0;
    qp.add_inequality(floor, u.efficiency * u.b_initial);
  }
  if (T > 0) qp.add_inequality(-Vector::Ones(T), u.b_initial - u.b_min_final);
  return qp;
}

namespace {

bool ramps_hold(const Generator& g, const Vector& p) {
  constexpr double tol = 1e-12;
  if (g.initial_output && p.size() > 0) {
    const double d = p[0] - *g.initial_output;
    if (d > g.ramp_up + tol || -d > g.ramp_down + tol) return false;
  }
  for (Index t = 1; t < p.size(); ++t) {
    const double d = p[t] - p[t - 1];
    if (d > g.ramp_up + tol || -d > g.ramp_down + tol) return false;
  }
  return true;
}

Vector clip(const Vector& v, double lo, double hi) { return v.cwiseMax(lo).cwiseMin(hi); }

}  // namespace

Vector solve_dg(const Generator& g, const Multipliers& z, const QpOptions& opt) {
  const Index T = z.lambda.size();
  const Vector k = (z.lambda.array() - z.mu.array() - g.cost_b).matrix();
  Vector p(T);
  if (g.cost_a > 0.0) {
    p = clip(k / (2.0 * g.cost_a), g.p_min, g.p_max);
  } else {
    for (Index t = 0; t < T; ++t) p[t] = k[t] > 0.0 ? g.p_max : g.p_min;
  }
  if (ramps_hold(g, p)) return p;

  const auto qp = dg_program(g, z);
  const auto res = g.cost_a > 0.0 ? solve_qp(qp, opt) : solve_lp_min_norm(qp, opt);
  return clip(res.x, g.p_min, g.p_max);
}

Vector solve_class1(const Class1Load& d, const Multipliers& z) {
  const Index T = z.lambda.size();
  Vector p(T);
  for (Index t = 0; t < T; ++t) {
    const double lam = z.lambda[t];
    if (d.util_c < 0.0) {
      p[t] = std::clamp((lam - d.util_d) / (2.0 * d.util_c), d.p_min, d.p_max);
    } else {
      p[t] = lam < d.util_d ? d.p_max : d.p_min;
    }
  }
  return p;
}

Vector solve_class2(const Class2Load& e, const Multipliers& z) {
  const Index T = z.lambda.size();
  Vector p = Vector::Zero(T);
  std::vector<int> order;
  for (int t = e.start_slot; t <= e.stop_slot; ++t) order.push_back(t);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return z.lambda[a] - e.util_weights[a] < z.lambda[b] - e.util_weights[b];
  });
  double remaining = e.energy_total;
  for (int t : order) {
    if (remaining <= 0.0) break;
    p[t] = std::min(e.p_max_per_slot[t], remaining);
    remaining -= p[t];
  }
  return p;
}

StorageSolution solve_storage(const StorageUnit& u, const Multipliers& z, const QpOptions& opt) {
  const auto res = solve_lp_min_norm(storage_program(u, z), opt);
  StorageSolution out;
  out.p_b = clip(res.x, u.p_chg_min, u.p_chg_max);
  out.b = storage_levels(u, out.p_b);
  return out;
}

std::pair<Vector, Vector> p_tilde_box(const Scenario& s) {
  double lo = s.market.p_r_min;
  double hi = s.market.p_r_max;
  for (const auto& u : s.storage) {
    lo += u.p_chg_min;
    hi += u.p_chg_max;
  }
  return {Vector::Constant(s.slots(), lo), Vector::Constant(s.slots(), hi)};
}

RenewableSolution solve_renewable(const Scenario& s, const PriceTransform& prices,
                                  const WorstCase& wc, const Multipliers& z,
                                  const BundleParams<double>& params) {
  const int T = s.slots();
  RenewableSolution out;
  out.p_r.resize(T);
  for (int t = 0; t < T; ++t) {
    out.p_r[t] = z.nu[t] >= z.lambda[t] ? s.market.p_r_min : s.market.p_r_max;
  }

  const auto [lo, hi] = p_tilde_box(s);
  const Vector alpha = prices.alpha();
  const Vector beta = prices.beta();
  // Any weight above the largest slope of G~ makes the penalty exact.
  const Vector weight = (1.0 + (alpha - z.nu).array().abs() + (beta - z.nu).array().abs()).matrix();

  auto oracle = [&](const Vector& p) {
    const auto worst = wc.evaluate(p, prices);
    double value = worst.cost - z.nu.dot(p);
    Vector g = danskin_subgradient(p, z.nu, worst, prices);
    for (int t = 0; t < T; ++t) {
      if (p[t] > hi[t]) {
        value += weight[t] * (p[t] - hi[t]);
        g[t] += weight[t];
      } else if (p[t] < lo[t]) {
        value += weight[t] * (lo[t] - p[t]);
        g[t] -= weight[t];
      }
    }
    return std::make_pair(value, g);
  };

  Vector start = Vector::Zero(T);
  const auto& u = s.uncertainty;
  if (u.facilities() > 0) start = ((u.lower + u.upper).colwise().sum() / 2.0).transpose();
  start = start.cwiseMax(lo).cwiseMin(hi);

  const auto res = bundle_minimize<double>(oracle, start, params);
  out.p_tilde_r = res.point.cwiseMax(lo).cwiseMin(hi);
  out.modified_cost = modified_cost(out.p_tilde_r, z.nu, wc, prices);
  out.eta = res.eta;
  out.bundle_iterations = res.iterations;
  out.converged = res.converged;
  const double slack = 1e-9 * (1.0 + hi.cwiseAbs().maxCoeff());
  out.at_box_bound = ((out.p_tilde_r - lo).array() <= slack).any() ||
                     ((hi - out.p_tilde_r).array() <= slack).any();
  return out;
}

}  // namespace mgem
