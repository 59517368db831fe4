#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mgem/linalg.hpp"

namespace mgem {

/// Affine minorant  value + subgradient'(p - point).
template <typename Scalar>
struct Cut {
  VectorX<Scalar> point;
  Scalar value = 0;
  VectorX<Scalar> subgradient;

  Scalar at(const VectorX<Scalar>& p) const { return value + subgradient.dot(p - point); }
};

/// Piecewise-linear model: max over cuts.
template <typename Scalar>
Scalar model_value(const std::vector<Cut<Scalar>>& cuts, const VectorX<Scalar>& p) {
  Scalar best = cuts.front().at(p);
  for (std::size_t i = 1; i < cuts.size(); ++i) best = std::max(best, cuts[i].at(p));
  return best;
}

template <typename Scalar>
struct SimplexQpResult {
  VectorX<Scalar> weights;  // xi, on the unit simplex
  VectorX<Scalar> point;    // y - (1/rho) sum_i xi_i g_i
  Scalar dual_value = 0;    // b'xi - 1/2 xi'Q xi
  Scalar model_value = 0;   // max-of-cuts at point
  int iterations = 0;
};

/// min 1/2 xi'Q xi - b'xi over { xi >= 0, 1'xi = 1 } by a primal active-set
/// method started at the best vertex of the simplex. Q is PSD and may be
/// singular.
template <typename Scalar>
VectorX<Scalar> minimize_on_simplex(const MatrixX<Scalar>& Q, const VectorX<Scalar>& b,
                                    int* iterations = nullptr) {
  using Vec = VectorX<Scalar>;
  using Mat = MatrixX<Scalar>;
  const Index m = b.size();
  if (m == 0) throw std::invalid_argument("minimize_on_simplex: empty problem");
  const Scalar scale = 1 + (m > 0 ? Q.diagonal().cwiseAbs().maxCoeff() : Scalar(0));
  const Scalar opt_tol = Scalar(1e-13) * (scale + b.cwiseAbs().maxCoeff());

  Index start = 0;
  for (Index i = 1; i < m; ++i) {
    if (Scalar(0.5) * Q(i, i) - b[i] < Scalar(0.5) * Q(start, start) - b[start]) start = i;
  }
  Vec xi = Vec::Zero(m);
  xi[start] = 1;
  std::vector<Index> free{start};

  const int limit = 20 * static_cast<int>(m) + 100;
  int it = 0;
  for (; it < limit; ++it) {
    // Working-set KKT system [Q_f 1; 1' 0][x; -tau] = [b_f; 1]. Q_f is often
    // singular (more cuts than dimensions), so solve it rank-revealingly.
    const Index k = static_cast<Index>(free.size());
    Mat kkt = Mat::Zero(k + 1, k + 1);
    Vec rhs(k + 1);
    for (Index r = 0; r < k; ++r) {
      rhs[r] = b[free[r]];
      for (Index c = 0; c < k; ++c) kkt(r, c) = Q(free[r], free[c]);
      kkt(r, k) = kkt(k, r) = 1;
    }
    rhs[k] = 1;
    const Eigen::CompleteOrthogonalDecomposition<Mat> cod(kkt);
    const Vec sol = cod.solve(rhs);
    const Vec resid = rhs - kkt * sol;
    const Scalar tau = -sol[k];
    Vec target = sol.head(k);
    bool ray = false;
    if (resid.head(k).norm() > Scalar(1e-10) * (1 + rhs.norm())) {
      // Inconsistent: the objective is linear and decreasing along the
      // null direction resid, so follow it until a weight reaches zero.
      Vec cur(k);
      for (Index r = 0; r < k; ++r) cur[r] = xi[free[r]];
      target = cur + resid.head(k) * (Scalar(1e6) * (1 + cur.sum()) / resid.head(k).cwiseAbs().maxCoeff());
      ray = true;
    }

    if (!ray && (target.array() >= 0).all()) {
      xi.setZero();
      for (Index r = 0; r < k; ++r) xi[free[r]] = target[r];
      // Multipliers of the bounds xi_i >= 0 outside the working set.
      const Vec lambda = Q * xi - b - tau * Vec::Ones(m);
      Index enter = -1;
      Scalar worst = -opt_tol;
      for (Index i = 0; i < m; ++i) {
        if (std::find(free.begin(), free.end(), i) != free.end()) continue;
        if (lambda[i] < worst) {
          worst = lambda[i];
          enter = i;
        }
      }
      if (enter < 0) break;
      free.push_back(enter);
      continue;
    }

    // Move toward the target until the first weight hits zero.
    Scalar step = 1;
    Index leave = 0;
    for (Index r = 0; r < k; ++r) {
      const Scalar cur = xi[free[r]];
      if (target[r] < cur) {
        const Scalar ratio = cur / (cur - target[r]);
        if (ratio < step) {
          step = ratio;
          leave = r;
        }
      }
    }
    for (Index r = 0; r < k; ++r) xi[free[r]] += step * (target[r] - xi[free[r]]);
    xi[free[leave]] = 0;
    free.erase(free.begin() + leave);
  }
  if (iterations) *iterations = it;

  xi = xi.cwiseMax(Scalar(0));
  xi /= xi.sum();
  return xi;
}

/// The bundle step in dual form: with b_i the i-th cut evaluated at y and
/// Q = G G' / rho, the optimal weights give the next trial point
/// p = y - (1/rho) sum_i xi_i g_i.
template <typename Scalar>
SimplexQpResult<Scalar> solve_simplex_qp(const std::vector<Cut<Scalar>>& cuts, Scalar rho,
                                         const VectorX<Scalar>& y) {
  if (cuts.empty()) throw std::invalid_argument("solve_simplex_qp: no cuts");
  if (!(rho > 0)) throw std::invalid_argument("solve_simplex_qp: rho must be positive");
  const Index m = static_cast<Index>(cuts.size());
  const Index n = y.size();
  MatrixX<Scalar> g(m, n);
  VectorX<Scalar> b(m);
  for (Index i = 0; i < m; ++i) {
    g.row(i) = cuts[i].subgradient.transpose();
    b[i] = cuts[i].at(y);
  }
  const MatrixX<Scalar> Q = g * g.transpose() / rho;

  SimplexQpResult<Scalar> out;
  out.weights = minimize_on_simplex<Scalar>(Q, b, &out.iterations);
  const VectorX<Scalar> agg = g.transpose() * out.weights;
  out.point = y - agg / rho;
  out.dual_value = b.dot(out.weights) - agg.squaredNorm() / (2 * rho);
  out.model_value = model_value(cuts, out.point);
  return out;
}

}  // namespace mgem
