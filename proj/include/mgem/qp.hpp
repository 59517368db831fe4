#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mgem/linalg.hpp"

namespace mgem {

/// min 1/2 x'Hx + c'x  s.t.  A x = b,  G x <= h.   H symmetric PSD.
template <typename Scalar>
struct QuadraticProgram {
  MatrixX<Scalar> H;
  VectorX<Scalar> c;
  MatrixX<Scalar> A;
  VectorX<Scalar> b;
  MatrixX<Scalar> G;
  VectorX<Scalar> h;

  QuadraticProgram() = default;
  explicit QuadraticProgram(Index n)
      : H(MatrixX<Scalar>::Zero(n, n)),
        c(VectorX<Scalar>::Zero(n)),
        A(0, n),
        b(0),
        G(0, n),
        h(0) {}

  Index size() const { return c.size(); }

  Scalar objective(const VectorX<Scalar>& x) const { return Scalar(0.5) * x.dot(H * x) + c.dot(x); }

  /// Appends  row'x <= rhs.
  void add_inequality(const VectorX<Scalar>& row, Scalar rhs) {
    G.conservativeResize(G.rows() + 1, size());
    G.row(G.rows() - 1) = row.transpose();
    h.conservativeResize(h.size() + 1);
    h[h.size() - 1] = rhs;
  }

  void add_equality(const VectorX<Scalar>& row, Scalar rhs) {
    A.conservativeResize(A.rows() + 1, size());
    A.row(A.rows() - 1) = row.transpose();
    b.conservativeResize(b.size() + 1);
    b[b.size() - 1] = rhs;
  }

  void add_bounds(Index i, Scalar lo, Scalar hi) {
    add_inequality(VectorX<Scalar>::Unit(size(), i), hi);
    add_inequality(-VectorX<Scalar>::Unit(size(), i), -lo);
  }

  void validate() const {
    const Index n = size();
    if (H.rows() != n || H.cols() != n || A.cols() != n || G.cols() != n || A.rows() != b.size() ||
        G.rows() != h.size()) {
      throw std::invalid_argument("QuadraticProgram: inconsistent dimensions");
    }
  }

  /// Largest constraint violation at x.
  Scalar violation(const VectorX<Scalar>& x) const {
    Scalar v = 0;
    if (A.rows() > 0) v = std::max(v, (A * x - b).cwiseAbs().maxCoeff());
    if (G.rows() > 0) v = std::max(v, (G * x - h).maxCoeff());
    return v;
  }
};

enum class QpStatus { Optimal, Infeasible, Unbounded, MaxIterations };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::Unbounded: return "unbounded";
    case QpStatus::MaxIterations: return "max-iterations";
  }
  return "unknown";
}

class QpError : public std::runtime_error {
 public:
  QpError(QpStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  QpStatus status() const { return status_; }

 private:
  QpStatus status_;
};

struct QpOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

template <typename Scalar>
struct QpResult {
  VectorX<Scalar> x;
  VectorX<Scalar> y;  // equality multipliers
  VectorX<Scalar> z;  // inequality multipliers, >= 0
  Scalar objective = 0;
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
};

namespace detail {

template <typename Scalar>
Scalar inf_norm(const VectorX<Scalar>& v) {
  return v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
}

/// Largest step in (0, 1] keeping v + step * dv >= 0.
template <typename Scalar>
Scalar max_step(const VectorX<Scalar>& v, const VectorX<Scalar>& dv) {
  Scalar step = 1;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0) step = std::min(step, -v[i] / dv[i]);
  }
  return step;
}

}  // namespace detail

/// Mehrotra predictor-corrector interior point method on the dense reduced
/// KKT system [H + G'WG, A'; A, 0] (W = Z S^-1), lightly regularized so that
/// PSD Hessians and redundant equalities factor. Deterministic.
/// Never throws on solver outcomes; inspect `status`.
template <typename Scalar>
QpResult<Scalar> try_solve_qp(const QuadraticProgram<Scalar>& qp, const QpOptions& opt = {}) {
  using Vec = VectorX<Scalar>;
  using Mat = MatrixX<Scalar>;
  qp.validate();
  const Index n = qp.size();
  const Index me = qp.A.rows();
  const Index mi = qp.G.rows();
  const Scalar tol = static_cast<Scalar>(opt.tolerance);
  const Scalar reg = Scalar(1e-11);
  const Scalar big = Scalar(1e12);

  const Scalar scale_b = 1 + std::max(detail::inf_norm<Scalar>(qp.b), detail::inf_norm<Scalar>(qp.h));
  const Scalar scale_c = 1 + detail::inf_norm<Scalar>(qp.c);

  QpResult<Scalar> res;
  Mat kkt(n + me, n + me);
  auto assemble = [&](const Vec& w) {
    kkt.setZero();
    kkt.topLeftCorner(n, n) = qp.H;
    if (mi > 0) kkt.topLeftCorner(n, n).noalias() += qp.G.transpose() * w.asDiagonal() * qp.G;
    kkt.topLeftCorner(n, n).diagonal().array() += reg;
    kkt.topRightCorner(n, me) = qp.A.transpose();
    kkt.bottomLeftCorner(me, n) = qp.A;
    kkt.bottomRightCorner(me, me).diagonal().setConstant(-reg);
  };

  // Starting point: least-squares-ish solve with unit weights, then shift the
  // slacks and multipliers into the interior.
  Vec x(n), y = Vec::Zero(me), s(mi), z(mi);
  {
    assemble(Vec::Ones(mi));
    Vec rhs(n + me);
    rhs.head(n) = -qp.c;
    if (mi > 0) rhs.head(n) += qp.G.transpose() * qp.h;
    rhs.tail(me) = qp.b;
    Vec sol = Eigen::PartialPivLU<Mat>(kkt).solve(rhs);
    if (!sol.allFinite()) sol.setZero();
    x = sol.head(n);
    if (mi > 0) {
      s = qp.h - qp.G * x;
      const Scalar shift = std::max(Scalar(0), -s.minCoeff()) + 1;
      s.array() += shift;
      z.setOnes();
    }
  }

  const Vec ones = Vec::Ones(mi);
  bool stalled = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it;
    Vec rd = qp.H * x + qp.c + qp.A.transpose() * y + qp.G.transpose() * z;
    Vec rp = qp.A * x - qp.b;
    Vec ri = qp.G * x + s - qp.h;
    const Scalar gap = mi > 0 ? s.dot(z) : Scalar(0);
    const Scalar mu = mi > 0 ? gap / static_cast<Scalar>(mi) : Scalar(0);
    const Scalar obj = qp.objective(x);

    const Scalar pres = std::max(detail::inf_norm(rp), detail::inf_norm(ri));
    const Scalar dres = detail::inf_norm(rd);
    if (pres <= tol * scale_b && dres <= tol * scale_c && gap <= tol * std::max(Scalar(1), std::abs(obj))) {
      res.status = QpStatus::Optimal;
      break;
    }
    if (!x.allFinite() || detail::inf_norm(x) > big * scale_b) {
      res.status = QpStatus::Unbounded;
      break;
    }
    if (detail::inf_norm(z) > big * scale_c || detail::inf_norm(y) > big * scale_c) {
      res.status = QpStatus::Infeasible;
      break;
    }

    const Vec w = mi > 0 ? Vec(z.cwiseQuotient(s)) : Vec();
    assemble(w);
    const Eigen::PartialPivLU<Mat> lu(kkt);

    auto direction = [&](const Vec& rc, Vec& dx, Vec& dy, Vec& ds, Vec& dz) {
      Vec rhs(n + me);
      rhs.head(n) = -rd;
      if (mi > 0) rhs.head(n) -= qp.G.transpose() * ((z.cwiseProduct(ri) - rc).cwiseQuotient(s));
      rhs.tail(me) = -rp;
      Vec sol = lu.solve(rhs);
      // One step of iterative refinement against the regularized matrix.
      sol += lu.solve(rhs - kkt * sol);
      dx = sol.head(n);
      dy = sol.tail(me);
      if (mi > 0) {
        ds = -ri - qp.G * dx;
        dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
      }
    };

    Vec dx, dy, ds(mi), dz(mi);
    if (mi == 0) {
      direction(Vec(), dx, dy, ds, dz);
      x += dx;
      y += dy;
      continue;
    }

    // Predictor.
    Vec rc = s.cwiseProduct(z);
    direction(rc, dx, dy, ds, dz);
    const Scalar a_aff = std::min(detail::max_step(s, ds), detail::max_step(z, dz));
    const Scalar mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<Scalar>(mi);
    const Scalar sigma = std::pow(std::clamp(mu_aff / mu, Scalar(0), Scalar(1)), 3);

    // Corrector.
    rc += ds.cwiseProduct(dz) - sigma * mu * ones;
    direction(rc, dx, dy, ds, dz);
    const Scalar step =
        std::min(Scalar(1), Scalar(0.99) * std::min(detail::max_step(s, ds), detail::max_step(z, dz)));
    Vec s_next = s + step * ds;
    Vec z_next = z + step * dz;
    // Near the solution the complementarity pairs can round to exactly zero;
    // the next factorization would then divide by zero. Stop at the current
    // iterate and let the relaxed classification below decide.
    if (!dx.allFinite() || !dy.allFinite() || (s_next.array() <= 0).any() ||
        (z_next.array() <= 0).any()) {
      stalled = true;
      break;
    }
    x += step * dx;
    y += step * dy;
    s = std::move(s_next);
    z = std::move(z_next);
    res.iterations = it + 1;
  }

  if (res.status != QpStatus::Optimal && res.status != QpStatus::Unbounded &&
      res.status != QpStatus::Infeasible) {
    // Out of iterations: classify by what failed to converge.
    const Scalar pres = std::max(detail::inf_norm<Scalar>(qp.A * x - qp.b),
                                 detail::inf_norm<Scalar>(qp.G * x + s - qp.h));
    if (pres > std::sqrt(tol) * scale_b) {
      res.status = QpStatus::Infeasible;
    } else if (detail::inf_norm(x) > std::sqrt(big) * scale_b) {
      res.status = QpStatus::Unbounded;
    } else if (stalled) {
      const Vec rd = qp.H * x + qp.c + qp.A.transpose() * y + qp.G.transpose() * z;
      const Scalar gap = mi > 0 ? s.dot(z) : Scalar(0);
      const Scalar loose = std::sqrt(tol);
      const bool ok = detail::inf_norm(rd) <= loose * scale_c &&
                      gap <= loose * std::max(Scalar(1), std::abs(qp.objective(x)));
      res.status = ok ? QpStatus::Optimal : QpStatus::MaxIterations;
    } else {
      res.status = QpStatus::MaxIterations;
    }
  }
  res.x = x;
  res.y = y;
  res.z = z;
  res.objective = qp.objective(x);
  return res;
}

/// Throws QpError unless the solve reaches the tolerance.
template <typename Scalar>
QpResult<Scalar> solve_qp(const QuadraticProgram<Scalar>& qp, const QpOptions& opt = {}) {
  auto res = try_solve_qp(qp, opt);
  if (res.status != QpStatus::Optimal) {
    throw QpError(res.status, std::string("QP solve failed: ") + to_string(res.status) + " after " +
                                  std::to_string(res.iterations) + " iterations");
  }
  return res;
}

/// Linear programs have optimal faces; pick the minimum-norm point on the
/// optimal face so outputs are unique. Phase one finds the optimal value,
/// phase two minimizes 1/2 |x|^2 subject to the constraints and
/// c'x <= optimum + slack.
template <typename Scalar>
QpResult<Scalar> solve_lp_min_norm(const QuadraticProgram<Scalar>& lp, const QpOptions& opt = {}) {
  auto first = solve_qp(lp, opt);
  QuadraticProgram<Scalar> second = lp;
  const Scalar slack = Scalar(1e-9) * (1 + std::abs(first.objective));
  second.H = MatrixX<Scalar>::Identity(lp.size(), lp.size());
  second.c.setZero();
  second.add_inequality(lp.c, first.objective + slack);
  auto res = try_solve_qp(second, opt);
  if (res.status != QpStatus::Optimal) return first;
  res.objective = lp.objective(res.x);
  return res;
}

}  // namespace mgem
