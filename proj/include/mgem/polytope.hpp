#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgem/linalg.hpp"

namespace mgem {

class PolytopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// { a : lower <= a <= upper, sum_min <= 1'a <= sum_max }
template <typename Scalar>
struct BoxBudgetPolytope {
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;
  Scalar sum_min = 0;
  Scalar sum_max = 0;

  Index dim() const { return lower.size(); }

  /// Throws PolytopeError when the data is inconsistent or the set is empty.
  void check(Scalar tol = Scalar(1e-9)) const {
    if (lower.size() != upper.size()) throw PolytopeError("lower/upper size mismatch");
    if ((lower.array() > upper.array()).any()) throw PolytopeError("empty polytope: lower > upper");
    if (sum_min > sum_max) throw PolytopeError("empty polytope: sum_min > sum_max");
    if (lower.sum() > sum_max + tol || upper.sum() < sum_min - tol) {
      throw PolytopeError("empty polytope: box and budget do not intersect");
    }
  }

  bool contains(const VectorX<Scalar>& a, Scalar tol = Scalar(1e-9)) const {
    if (a.size() != dim()) return false;
    const Scalar s = a.sum();
    return (a.array() >= lower.array() - tol).all() && (a.array() <= upper.array() + tol).all() &&
           s >= sum_min - tol && s <= sum_max + tol;
  }
};

/// Cartesian product of box-budget blocks; coordinates are concatenated in
/// block order.
template <typename Scalar>
struct ProductPolytope {
  std::vector<BoxBudgetPolytope<Scalar>> blocks;

  Index dim() const {
    Index n = 0;
    for (const auto& b : blocks) n += b.dim();
    return n;
  }
};

/// One vertex per row.
template <typename Scalar>
struct VertexList {
  Index dimension = 0;
  MatrixX<Scalar> points;
  std::string provenance;

  Index size() const { return points.rows(); }
  auto vertex(Index k) const { return points.row(k).transpose(); }
};

struct EnumerationOptions {
  /// Candidate generation is exponential in the block dimension.
  Index max_dimension = 20;
  /// Upper bound on the size of a Cartesian product.
  Index max_vertices = 5'000'000;
  double tolerance = 1e-9;
};

namespace detail {

template <typename Scalar>
Scalar snap(Scalar v, Scalar lo, Scalar hi, Scalar tol) {
  if (std::abs(v - lo) <= tol) return lo;
  if (std::abs(v - hi) <= tol) return hi;
  return v;
}

template <typename Scalar>
class VertexCollector {
 public:
  explicit VertexCollector(Index n) : n_(n) {}

  void offer(const VectorX<Scalar>& v) {
    std::vector<Scalar> key(v.data(), v.data() + n_);
    if (seen_.insert(key).second) order_.push_back(std::move(key));
  }

  VertexList<Scalar> finish(std::string provenance) const {
    VertexList<Scalar> out;
    out.dimension = n_;
    out.provenance = std::move(provenance);
    out.points.resize(static_cast<Index>(order_.size()), n_);
    for (std::size_t k = 0; k < order_.size(); ++k) {
      for (Index i = 0; i < n_; ++i) out.points(static_cast<Index>(k), i) = order_[k][i];
    }
    return out;
  }

 private:
  Index n_;
  std::set<std::vector<Scalar>> seen_;
  std::vector<std::vector<Scalar>> order_;
};

inline void guard_dimension(Index n, const EnumerationOptions& opt) {
  if (n > opt.max_dimension) {
    throw PolytopeError("refusing to enumerate a block of dimension " + std::to_string(n) +
                        ": vertex enumeration has exponential complexity (limit " +
                        std::to_string(opt.max_dimension) + ", raise max_dimension to override)");
  }
}

}  // namespace detail

/// All vertices of a box-budget polytope: feasible box corners plus the points
/// where one coordinate absorbs an active budget bound and every other
/// coordinate sits at a box bound. Candidates are generated lexicographically
/// (coordinate 0 most significant, lower before upper), snapped onto bounds
/// within the tolerance and deduplicated keeping the first occurrence.
template <typename Scalar>
VertexList<Scalar> enumerate_box_budget(const BoxBudgetPolytope<Scalar>& p,
                                        const EnumerationOptions& opt = {}) {
  const Scalar tol = static_cast<Scalar>(opt.tolerance);
  p.check(tol);
  const Index n = p.dim();
  detail::guard_dimension(n, opt);

  detail::VertexCollector<Scalar> out(n);
  VectorX<Scalar> a(n);
  const std::uint64_t corners = std::uint64_t{1} << n;

  for (std::uint64_t mask = 0; mask < corners; ++mask) {
    for (Index i = 0; i < n; ++i) {
      a[i] = ((mask >> (n - 1 - i)) & 1U) ? p.upper[i] : p.lower[i];
    }
    const Scalar s = a.sum();
    if (s >= p.sum_min - tol && s <= p.sum_max + tol) out.offer(a);
  }

  if (n > 0) {
    const std::uint64_t others = std::uint64_t{1} << (n - 1);
    const Scalar targets[2] = {p.sum_min, p.sum_max};
    for (Index pin = 0; pin < n; ++pin) {
      for (std::uint64_t mask = 0; mask < others; ++mask) {
        Scalar rest = 0;
        for (Index i = 0, bit = 0; i < n; ++i) {
          if (i == pin) continue;
          a[i] = ((mask >> (n - 2 - bit)) & 1U) ? p.upper[i] : p.lower[i];
          rest += a[i];
          ++bit;
        }
        for (Scalar target : targets) {
          const Scalar v = target - rest;
          if (v < p.lower[pin] - tol || v > p.upper[pin] + tol) continue;
          a[pin] = detail::snap(v, p.lower[pin], p.upper[pin], tol);
          out.offer(a);
        }
      }
    }
  }
  return out.finish("box-budget");
}

/// Cartesian product of the per-block vertex lists, the last block varying
/// fastest.
template <typename Scalar>
VertexList<Scalar> enumerate_product(const ProductPolytope<Scalar>& p,
                                     const EnumerationOptions& opt = {}) {
  if (p.blocks.empty()) throw PolytopeError("product polytope has no blocks");
  std::vector<VertexList<Scalar>> lists;
  Index count = 1;
  for (const auto& b : p.blocks) {
    lists.push_back(enumerate_box_budget(b, opt));
    count *= lists.back().size();
    if (count > opt.max_vertices) {
      throw PolytopeError("product vertex count exceeds max_vertices (" +
                          std::to_string(opt.max_vertices) + ")");
    }
  }
  if (lists.size() == 1) {
    lists.front().provenance = "product";
    return lists.front();
  }

  VertexList<Scalar> out;
  out.dimension = p.dim();
  out.provenance = "product";
  out.points.resize(count, out.dimension);
  std::vector<Index> idx(lists.size(), 0);
  for (Index row = 0; row < count; ++row) {
    Index col = 0;
    for (std::size_t s = 0; s < lists.size(); ++s) {
      const Index d = lists[s].dimension;
      out.points.row(row).segment(col, d) = lists[s].points.row(idx[s]);
      col += d;
    }
    for (std::size_t s = lists.size(); s-- > 0;) {
      if (++idx[s] < lists[s].size()) break;
      idx[s] = 0;
    }
  }
  return out;
}

/// Rank test: v is a vertex iff the constraints active at v contain n
/// linearly independent rows. Throws when v is infeasible.
template <typename Scalar>
bool certify_vertex(const BoxBudgetPolytope<Scalar>& p, const VectorX<Scalar>& v,
                    Scalar tol = Scalar(1e-9)) {
  if (!p.contains(v, tol)) throw PolytopeError("certify_vertex: point is not feasible");
  const Index n = p.dim();
  if (n == 0) return true;
  std::vector<VectorX<Scalar>> active;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(v[i] - p.lower[i]) <= tol || std::abs(v[i] - p.upper[i]) <= tol) {
      active.push_back(VectorX<Scalar>::Unit(n, i));
    }
  }
  const Scalar s = v.sum();
  if (std::abs(s - p.sum_min) <= tol || std::abs(s - p.sum_max) <= tol) {
    active.push_back(VectorX<Scalar>::Ones(n));
  }
  if (static_cast<Index>(active.size()) < n) return false;
  MatrixX<Scalar> rows(static_cast<Index>(active.size()), n);
  for (std::size_t r = 0; r < active.size(); ++r) rows.row(static_cast<Index>(r)) = active[r];
  Eigen::FullPivLU<MatrixX<Scalar>> lu(rows);
  lu.setThreshold(Scalar(1e-10));
  return lu.rank() == n;
}

template <typename Scalar>
struct LinearMaxResult {
  Scalar value = 0;
  VectorX<Scalar> argmax;
};

/// max c'a over the polytope by a continuous-knapsack greedy: every
/// coordinate starts at the bound its sign favors, then a violated budget is
/// repaired by moving the cheapest coordinates (smallest |c_i|) first.
template <typename Scalar>
LinearMaxResult<Scalar> linear_max_oracle(const BoxBudgetPolytope<Scalar>& p,
                                          const VectorX<Scalar>& c) {
  p.check();
  const Index n = p.dim();
  if (c.size() != n) throw PolytopeError("linear_max_oracle: direction has wrong size");
  VectorX<Scalar> a(n);
  for (Index i = 0; i < n; ++i) a[i] = c[i] > 0 ? p.upper[i] : p.lower[i];

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(c[i]) < std::abs(c[j]); });

  Scalar s = a.sum();
  if (s > p.sum_max) {
    Scalar excess = s - p.sum_max;
    for (Index i : order) {
      if (excess <= 0) break;
      const Scalar move = std::min(excess, a[i] - p.lower[i]);
      a[i] -= move;
      excess -= move;
    }
  } else if (s < p.sum_min) {
    Scalar deficit = p.sum_min - s;
    for (Index i : order) {
      if (deficit <= 0) break;
      const Scalar move = std::min(deficit, p.upper[i] - a[i]);
      a[i] += move;
      deficit -= move;
    }
  }
  return {c.dot(a), a};
}

}  // namespace mgem
