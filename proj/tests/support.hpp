#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls the code under test except where noted (the epigraph builders feed
// the library's QP solver, which is tested separately).

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mgem/oracle.hpp"
#include "mgem/qp.hpp"

namespace mgem::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector uniform_vector(Rng& rng, Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

inline bool same_point(const Vector& a, const Vector& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

/// Vertices by brute force: every choice of n constraints from the 2n box
/// rows and 2 budget rows, kept when the system is nonsingular and its
/// solution feasible.
inline std::vector<Vector> active_row_vertices(const BoxBudgetPolytope<double>& p,
                                               double tol = 1e-9) {
  const Index n = p.dim();
  const Index m = 2 * n + 2;
  Matrix rows = Matrix::Zero(m, n);
  Vector rhs(m);
  for (Index i = 0; i < n; ++i) {
    rows(2 * i, i) = 1.0;
    rhs[2 * i] = p.lower[i];
    rows(2 * i + 1, i) = 1.0;
    rhs[2 * i + 1] = p.upper[i];
  }
  rows.row(2 * n).setOnes();
  rhs[2 * n] = p.sum_min;
  rows.row(2 * n + 1).setOnes();
  rhs[2 * n + 1] = p.sum_max;

  std::vector<Vector> out;
  std::vector<bool> pick(static_cast<std::size_t>(m), false);
  std::fill(pick.begin(), pick.begin() + n, true);
  std::sort(pick.begin(), pick.end());
  do {
    Matrix a(n, n);
    Vector b(n);
    Index r = 0;
    for (Index k = 0; k < m; ++k) {
      if (!pick[static_cast<std::size_t>(k)]) continue;
      a.row(r) = rows.row(k);
      b[r] = rhs[k];
      ++r;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < n) continue;
    const Vector v = lu.solve(b);
    const double s = v.sum();
    const bool feasible = (v.array() >= p.lower.array() - tol).all() &&
                          (v.array() <= p.upper.array() + tol).all() && s >= p.sum_min - tol &&
                          s <= p.sum_max + tol;
    if (!feasible) continue;
    if (std::none_of(out.begin(), out.end(), [&](const Vector& w) { return same_point(v, w, 1e-9); })) {
      out.push_back(v);
    }
  } while (std::next_permutation(pick.begin(), pick.end()));
  return out;
}

/// A random nonempty box-budget polytope of dimension n.
inline BoxBudgetPolytope<double> random_polytope(Rng& rng, Index n) {
  BoxBudgetPolytope<double> p;
  p.lower = uniform_vector(rng, n, -2.0, 2.0);
  p.upper = p.lower + uniform_vector(rng, n, 0.0, 3.0);
  // Occasionally degenerate coordinates, which stress the deduplication.
  for (Index i = 0; i < n; ++i) {
    if (uniform(rng, 0.0, 1.0) < 0.1) p.upper[i] = p.lower[i];
  }
  const double lo = p.lower.sum();
  const double hi = p.upper.sum();
  double a = uniform(rng, lo - 1.0, hi);
  double b = uniform(rng, lo, hi + 1.0);
  if (a > b) std::swap(a, b);
  p.sum_min = a;
  p.sum_max = b;
  return p;
}

/// Transaction cost in the purchase/sale form: alpha [x]^+ - beta [x]^-.
inline double purchase_sale_cost(const Vector& alpha, const Vector& beta, const Vector& x) {
  double c = 0.0;
  for (Index t = 0; t < x.size(); ++t) {
    c += x[t] >= 0.0 ? alpha[t] * x[t] : beta[t] * x[t];
  }
  return c;
}

/// G by exhaustive evaluation of every vertex of every block, no pruning.
inline double brute_force_g(const UncertaintySet& set, const Vector& alpha, const Vector& beta,
                            const Vector& p_tilde) {
  double total = 0.0;
  for (const auto& blk : set.blocks) {
    const Matrix tot = blk.totals();
    const Index len = blk.length();
    double best = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < tot.rows(); ++k) {
      const Vector x = p_tilde.segment(blk.first_slot, len) - tot.row(k).transpose();
      best = std::max(best, purchase_sale_cost(alpha.segment(blk.first_slot, len),
                                               beta.segment(blk.first_slot, len), x));
    }
    total += best;
  }
  return total;
}

/// min over p in [lo, hi] of G(p) - nu'p as an epigraph LP over every vertex:
/// variables (p, r_s, u_{k,t}). Returns the optimal value.
inline double epigraph_min_modified_cost(const UncertaintySet& set, const Vector& alpha,
                                         const Vector& beta, const Vector& nu, const Vector& lo,
                                         const Vector& hi) {
  const Index T = nu.size();
  const Index S = static_cast<Index>(set.blocks.size());
  Index aux = 0;
  for (const auto& blk : set.blocks) aux += blk.vertices.size() * blk.length();
  const Index n = T + S + aux;
  QuadraticProgram<double> qp(n);
  qp.c.head(T) = -nu;
  qp.c.segment(T, S).setOnes();
  for (Index t = 0; t < T; ++t) qp.add_bounds(t, lo[t], hi[t]);
  const Vector delta = (alpha - beta) / 2.0;
  const Vector gamma = (alpha + beta) / 2.0;
  Index col = T + S;
  for (Index s = 0; s < S; ++s) {
    const auto& blk = set.blocks[static_cast<std::size_t>(s)];
    const Matrix tot = blk.totals();
    for (Index k = 0; k < tot.rows(); ++k) {
      // sum_t delta u + gamma (p - w) - r_s <= 0
      Vector cut = Vector::Zero(n);
      double rhs = 0.0;
      for (Index j = 0; j < blk.length(); ++j) {
        const Index t = blk.first_slot + j;
        const Index u = col + j;
        const double w = tot(k, j);
        // u >= p - w and u >= w - p
        Vector row = Vector::Zero(n);
        row[t] = 1.0;
        row[u] = -1.0;
        qp.add_inequality(row, w);
        row[t] = -1.0;
        qp.add_inequality(row, -w);
        cut[u] = delta[t];
        cut[t] += gamma[t];
        rhs += gamma[t] * w;
      }
      cut[T + s] = -1.0;
      qp.add_inequality(cut, rhs);
      col += blk.length();
    }
  }
  return solve_lp_min_norm(qp, QpOptions{1e-10, 300}).objective;
}

/// Pearson correlation.
inline double correlation(const Vector& a, const Vector& b) {
  const Vector x = a.array() - a.mean();
  const Vector y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

/// Class-1 optimum by grid search over [p_min, p_max] at the given step.
inline double class1_grid(const Class1Load& d, double lambda, double step) {
  double best_p = d.p_min;
  double best = std::numeric_limits<double>::infinity();
  const int count = static_cast<int>(std::ceil((d.p_max - d.p_min) / step));
  for (int i = 0; i <= count; ++i) {
    const double p = std::min(d.p_max, d.p_min + i * step);
    const double v = lambda * p - d.utility(p);
    if (v < best) {
      best = v;
      best_p = p;
    }
  }
  return best_p;
}

}  // namespace mgem::testing
