#include "mgem/oracle.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace mgem {
namespace {

struct Layout {
  Index p_g, p_d, p_e, p_b, p_r, p_tilde, r, u, n;
  int T;
  Index g(Index m, int t) const { return p_g + m * T + t; }
  Index d(Index k, int t) const { return p_d + k * T + t; }
  Index e(Index q, int t) const { return p_e + q * T + t; }
  Index b(Index j, int t) const { return p_b + j * T + t; }
};

// One epigraph piece: candidate `row` of block `block`.
using Piece = std::pair<std::size_t, Index>;

struct RawBlock {
  int first = 0;
  int len = 0;
  Matrix totals;
};

/// Transaction cost of one total vector in the [.]^+ / [.]^- form, independent
/// of the |.| form used by the worst-case evaluator.
double piece_cost(const RawBlock& blk, Index row, const Vector& p, const Vector& alpha,
                  const Vector& beta) {
  double v = 0.0;
  for (int k = 0; k < blk.len; ++k) {
    const int t = blk.first + k;
    const double x = p[t] - blk.totals(row, k);
    v += alpha[t] * std::max(x, 0.0) - beta[t] * std::max(-x, 0.0);
  }
  return v;
}

Index block_argmax(const RawBlock& blk, const Vector& p, const Vector& alpha, const Vector& beta,
                   double* value) {
  Index best = 0;
  double best_v = piece_cost(blk, 0, p, alpha, beta);
  for (Index r = 1; r < blk.totals.rows(); ++r) {
    const double v = piece_cost(blk, r, p, alpha, beta);
    if (v > best_v) {
      best_v = v;
      best = r;
    }
  }
  if (value) *value = best_v;
  return best;
}

QuadraticProgram<double> build(const Scenario& s, const PriceTransform& prices,
                               const std::vector<RawBlock>& blocks,
                               const std::vector<Piece>& pieces, Layout& L, double* constant) {
  const int T = s.slots();
  const Index M = static_cast<Index>(s.generators.size());
  const Index N = static_cast<Index>(s.class1.size());
  const Index Q = static_cast<Index>(s.class2.size());
  const Index J = static_cast<Index>(s.storage.size());
  L.T = T;
  L.p_g = 0;
  L.p_d = L.p_g + M * T;
  L.p_e = L.p_d + N * T;
  L.p_b = L.p_e + Q * T;
  L.p_r = L.p_b + J * T;
  L.p_tilde = L.p_r + T;
  L.r = L.p_tilde + T;
  L.u = L.r + static_cast<Index>(blocks.size());
  Index n_u = 0;
  for (const auto& pc : pieces) n_u += blocks[pc.first].len;
  L.n = L.u + n_u;

  QuadraticProgram<double> qp(L.n);
  *constant = 0.0;
  const double capacity = [&] {
    double c = 0.0;
    for (const auto& g : s.generators) c += g.p_max;
    return c;
  }();

  for (Index m = 0; m < M; ++m) {
    const auto& g = s.generators[m];
    for (int t = 0; t < T; ++t) {
      qp.H(L.g(m, t), L.g(m, t)) = 2.0 * g.cost_a;
      qp.c[L.g(m, t)] = g.cost_b;
      qp.add_bounds(L.g(m, t), g.p_min, g.p_max);
      std::optional<Index> prev;
      double offset = 0.0;
      if (t > 0) {
        prev = L.g(m, t - 1);
      } else if (g.initial_output) {
        offset = *g.initial_output;
      } else {
        continue;
      }
      Vector row = Vector::Zero(L.n);
      row[L.g(m, t)] = 1.0;
      if (prev) row[*prev] = -1.0;
      qp.add_inequality(row, g.ramp_up + offset);
      qp.add_inequality(-row, g.ramp_down - offset);
    }
  }
  for (int t = 0; t < T; ++t) {
    Vector row = Vector::Zero(L.n);
    for (Index m = 0; m < M; ++m) row[L.g(m, t)] = 1.0;
    qp.add_inequality(row, capacity - s.market.spinning_reserve[t]);
  }
  for (Index k = 0; k < N; ++k) {
    const auto& d = s.class1[k];
    for (int t = 0; t < T; ++t) {
      qp.H(L.d(k, t), L.d(k, t)) = -2.0 * d.util_c;
      qp.c[L.d(k, t)] = -d.util_d;
      qp.add_bounds(L.d(k, t), d.p_min, d.p_max);
    }
  }
  for (Index q = 0; q < Q; ++q) {
    const auto& e = s.class2[q];
    Vector row = Vector::Zero(L.n);
    for (int t = 0; t < T; ++t) {
      qp.c[L.e(q, t)] = -e.util_weights[t];
      qp.add_bounds(L.e(q, t), 0.0, e.p_max_per_slot[t]);
      row[L.e(q, t)] = 1.0;
    }
    qp.add_equality(row, e.energy_total);
  }
  for (Index j = 0; j < J; ++j) {
    const auto& u = s.storage[j];
    double tail = 0.0;
    for (int t = T; t-- > 0;) {
      tail += u.cost_weights[t];
      qp.c[L.b(j, t)] = -tail;
      *constant += u.cost_weights[t] * ((1.0 - u.dod) * u.b_max - u.b_initial);
    }
    for (int t = 0; t < T; ++t) {
      qp.add_bounds(L.b(j, t), u.p_chg_min, u.p_chg_max);
      Vector prefix = Vector::Zero(L.n);
      for (int k = 0; k <= t; ++k) prefix[L.b(j, k)] = 1.0;
      qp.add_inequality(prefix, u.b_max - u.b_initial);
      qp.add_inequality(-prefix, u.b_initial);
      Vector floor = Vector::Zero(L.n);
      for (int k = 0; k < t; ++k) floor[L.b(j, k)] = -u.efficiency;
      floor[L.b(j, t)] = -1.0;
      qp.add_inequality(floor, u.efficiency * u.b_initial);
      if (t == T - 1) qp.add_inequality(-prefix, u.b_initial - u.b_min_final);
    }
  }
  for (int t = 0; t < T; ++t) {
    qp.add_bounds(L.p_r + t, s.market.p_r_min, s.market.p_r_max);
    Vector balance = Vector::Zero(L.n);
    for (Index m = 0; m < M; ++m) balance[L.g(m, t)] = 1.0;
    for (Index k = 0; k < N; ++k) balance[L.d(k, t)] = -1.0;
    for (Index q = 0; q < Q; ++q) balance[L.e(q, t)] = -1.0;
    balance[L.p_r + t] = 1.0;
    qp.add_equality(balance, s.market.fixed_load[t]);
    Vector transform = Vector::Zero(L.n);
    transform[L.p_r + t] = 1.0;
    for (Index j = 0; j < J; ++j) transform[L.b(j, t)] = 1.0;
    transform[L.p_tilde + t] = -1.0;
    qp.add_equality(transform, 0.0);
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) qp.c[L.r + static_cast<Index>(b)] = 1.0;
  Index u_at = L.u;
  for (const auto& [b, row] : pieces) {
    const auto& blk = blocks[b];
    Vector epi = Vector::Zero(L.n);
    double rhs = 0.0;
    for (int k = 0; k < blk.len; ++k) {
      const int t = blk.first + k;
      const double st = blk.totals(row, k);
      const Index u = u_at + k;
      Vector up = Vector::Zero(L.n);  // P~ - u <= s
      up[L.p_tilde + t] = 1.0;
      up[u] = -1.0;
      qp.add_inequality(up, st);
      Vector dn = Vector::Zero(L.n);  // -P~ - u <= -s
      dn[L.p_tilde + t] = -1.0;
      dn[u] = -1.0;
      qp.add_inequality(dn, -st);
      epi[u] = prices.delta[t];
      epi[L.p_tilde + t] = prices.gamma[t];
      rhs += prices.gamma[t] * st;
    }
    epi[L.r + static_cast<Index>(b)] = -1.0;
    qp.add_inequality(epi, rhs);
    u_at += blk.len;
  }
  return qp;
}

Schedule extract(const Scenario& s, const Layout& L, const Vector& x) {
  Schedule out = Schedule::zeros(s);
  const int T = s.slots();
  for (Index m = 0; m < out.p_g.rows(); ++m)
    for (int t = 0; t < T; ++t) out.p_g(m, t) = x[L.g(m, t)];
  for (Index k = 0; k < out.p_d.rows(); ++k)
    for (int t = 0; t < T; ++t) out.p_d(k, t) = x[L.d(k, t)];
  for (Index q = 0; q < out.p_e.rows(); ++q)
    for (int t = 0; t < T; ++t) out.p_e(q, t) = x[L.e(q, t)];
  for (Index j = 0; j < out.p_b.rows(); ++j) {
    for (int t = 0; t < T; ++t) out.p_b(j, t) = x[L.b(j, t)];
    out.b.row(j) = storage_levels(s.storage[j], out.p_b.row(j).transpose()).transpose();
  }
  out.p_r = x.segment(L.p_r, T);
  out.p_tilde_r = x.segment(L.p_tilde, T);
  return out;
}

}  // namespace

OracleResult centralized_solve(const Instance& inst, const OracleOptions& opt) {
  const Scenario& s = inst.scenario;
  const Vector alpha = inst.prices.alpha();
  const Vector beta = inst.prices.beta();

  std::vector<RawBlock> blocks;
  for (const auto& vb : inst.worst_case.set().blocks) {
    blocks.push_back({vb.first_slot, vb.length(), vb.totals()});
  }

  std::vector<Piece> pieces;
  std::set<Piece> have;
  std::size_t aux = 0;
  auto add = [&](std::size_t b, Index row) {
    if (!have.insert({b, row}).second) return false;
    aux += static_cast<std::size_t>(blocks[b].len);
    if (aux > opt.max_aux_variables) {
      throw std::length_error("centralized_solve: epigraph needs more than " +
                              std::to_string(opt.max_aux_variables) + " auxiliary variables");
    }
    pieces.emplace_back(b, row);
    return true;
  };

  if (opt.lazy) {
    const auto [lo, hi] = p_tilde_box(s);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (const Vector& p : {lo, hi, Vector((lo + hi) / 2.0)}) {
        add(b, block_argmax(blocks[b], p, alpha, beta, nullptr));
      }
    }
  } else {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (Index r = 0; r < blocks[b].totals.rows(); ++r) add(b, r);
    }
  }

  OracleResult out;
  for (int round = 1;; ++round) {
    Layout L{};
    double constant = 0.0;
    const auto qp = build(s, inst.prices, blocks, pieces, L, &constant);
    const auto res = solve_qp(qp, opt.qp);
    out.rounds = round;
    out.qp_objective = res.objective + constant;
    out.schedule = extract(s, L, res.x);

    bool added = false;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      double worst = 0.0;
      const Index row = block_argmax(blocks[b], out.schedule.p_tilde_r, alpha, beta, &worst);
      const double r = res.x[L.r + static_cast<Index>(b)];
      if (worst > r + opt.cut_tolerance * std::max(1.0, std::abs(worst))) added |= add(b, row);
    }
    if (!added) break;
  }
  out.vertex_constraints = pieces.size();
  out.costs = evaluate_net_cost(inst, out.schedule, 1e-6, true);
  out.objective = out.costs.total;
  return out;
}

CertifyReport certify(const Instance& inst, const Schedule& distributed, const OracleResult& oracle,
                      double rel_tol) {
  CertifyReport rep;
  rep.distributed_objective = evaluate_net_cost(inst, distributed, 1e-6, false).total;
  rep.oracle_objective = oracle.objective;
  rep.relative_gap = std::abs(rep.distributed_objective - rep.oracle_objective) /
                     std::max(1.0, std::abs(rep.oracle_objective));
  auto dev = [](const Matrix& a, const Matrix& b) {
    if (a.size() == 0) return 0.0;
    return (a.colwise().sum() - b.colwise().sum()).cwiseAbs().maxCoeff();
  };
  const Schedule& o = oracle.schedule;
  rep.dev_p_g = dev(distributed.p_g, o.p_g);
  rep.dev_p_d = dev(distributed.p_d, o.p_d);
  rep.dev_p_e = dev(distributed.p_e, o.p_e);
  rep.dev_p_b = dev(distributed.p_b, o.p_b);
  rep.dev_p_r = (distributed.p_r - o.p_r).cwiseAbs().maxCoeff();
  rep.dev_p_tilde_r = (distributed.p_tilde_r - o.p_tilde_r).cwiseAbs().maxCoeff();
  rep.passed = rep.relative_gap <= rel_tol;
  return rep;
}

}  // namespace mgem
