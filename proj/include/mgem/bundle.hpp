#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "mgem/simplex_qp.hpp"

namespace mgem {

template <typename Scalar>
struct BundleParams {
  Scalar rho0 = 1;
  Scalar theta = Scalar(0.1);
  Scalar tol_eta = Scalar(1e-6);
  int max_iter = 500;
  int max_cuts = 50;
  Scalar rho_min = Scalar(1e-3);
  Scalar rho_max = Scalar(1e6);
  int nulls_before_increase = 5;
};

template <typename Scalar>
struct BundleResult {
  VectorX<Scalar> point;  // final proximal center
  Scalar value = 0;
  Scalar eta = 0;         // last predicted decrease
  Scalar rho = 0;
  int iterations = 0;
  int serious_steps = 0;
  bool converged = false;
  std::vector<Cut<Scalar>> cuts;      // final bundle
  std::vector<Scalar> center_values;  // f(y) after every serious step
};

/// Proximal bundle method for a convex oracle p -> (f(p), g in df(p)).
///
/// Each step minimizes the cutting-plane model plus (rho/2)|p - y|^2 through
/// its simplex dual, then applies the descent test
/// f(y) - f(p+) >= theta * eta with
/// eta = f(y) - (model(p+) + rho/2 |p+ - y|^2). Stops when eta <= tol_eta.
template <typename Scalar, typename Oracle>
BundleResult<Scalar> bundle_minimize(Oracle&& oracle, const VectorX<Scalar>& p0,
                                     const BundleParams<Scalar>& params = {}) {
  BundleResult<Scalar> out;
  VectorX<Scalar> y = p0;
  auto [fy, gy] = oracle(y);
  std::vector<Cut<Scalar>> cuts{{y, fy, gy}};
  Scalar rho = params.rho0;
  int nulls = 0;
  out.center_values.push_back(fy);

  for (int it = 0; it < params.max_iter; ++it) {
    out.iterations = it + 1;
    const auto step = solve_simplex_qp(cuts, rho, y);
    const VectorX<Scalar>& p = step.point;
    out.eta = std::max(Scalar(0),
                       fy - (step.model_value + rho / 2 * (p - y).squaredNorm()));
    if (out.eta <= params.tol_eta) {
      out.converged = true;
      break;
    }

    auto [fp, gp] = oracle(p);

    if (static_cast<int>(cuts.size()) >= params.max_cuts) {
      // Fold the two oldest cuts into their weighted aggregate.
      Scalar w0 = step.weights[0];
      Scalar w1 = step.weights[1];
      if (w0 + w1 <= 0) w0 = w1 = 1;
      const Scalar s = w0 + w1;
      w0 /= s;
      w1 /= s;
      Cut<Scalar> agg;
      agg.point = w0 * cuts[0].point + w1 * cuts[1].point;
      agg.subgradient = w0 * cuts[0].subgradient + w1 * cuts[1].subgradient;
      agg.value = w0 * cuts[0].at(agg.point) + w1 * cuts[1].at(agg.point);
      cuts.erase(cuts.begin(), cuts.begin() + 2);
      cuts.insert(cuts.begin(), std::move(agg));
    }
    cuts.push_back({p, fp, gp});

    if (fy - fp >= params.theta * out.eta) {
      y = p;
      fy = fp;
      ++out.serious_steps;
      out.center_values.push_back(fy);
      rho = std::max(params.rho_min, rho / 2);
      nulls = 0;
    } else if (++nulls >= params.nulls_before_increase) {
      rho = std::min(params.rho_max, rho * 2);
      nulls = 0;
    }
  }
  out.point = y;
  out.value = fy;
  out.rho = rho;
  out.cuts = std::move(cuts);
  return out;
}

}  // namespace mgem
