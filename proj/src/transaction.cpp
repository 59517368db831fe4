#include "mgem/transaction.hpp"

#include <map>
#include <optional>
#include <stdexcept>

namespace mgem {

PriceTransform PriceTransform::from(const Market& m) {
  return {(m.purchase_price - m.sell_price) / 2.0, (m.purchase_price + m.sell_price) / 2.0};
}

namespace {

BoxBudgetPolytope<double> totals_polytope(const UncertaintyModel& u, const BudgetBlock& b) {
  const auto cols = Eigen::seq(b.first_slot, b.last_slot);
  return {u.lower(Eigen::all, cols).colwise().sum().transpose(),
          u.upper(Eigen::all, cols).colwise().sum().transpose(), b.sum_min, b.sum_max};
}

}  // namespace

WorstCase::WorstCase(const UncertaintyModel& model, int slots, const EnumerationOptions& opt)
    : WorstCase(model, uncertainty_vertices(model, slots, opt)) {}

WorstCase::WorstCase(const UncertaintyModel& model, UncertaintySet set, bool prune)
    : set_(std::move(set)) {
  const bool joint = set_.kind == UncertaintyKind::Joint && set_.facilities > 1;
  for (const auto& vb : set_.blocks) {
    std::optional<BoxBudgetPolytope<double>> projected;
    if (prune && joint) {
      for (const auto& b : model.budgets) {
        if (b.facility < 0 && b.first_slot == vb.first_slot && b.last_slot == vb.last_slot) {
          projected = totals_polytope(model, b);
        }
      }
    }
    if (vb.vertices.size() == 0) throw std::invalid_argument("empty vertex list");
    const Matrix all = vb.totals();
    std::map<std::vector<double>, Index> seen;
    std::vector<Index> keep;
    for (Index k = 0; k < all.rows(); ++k) {
      const Vector row = all.row(k).transpose();
      if (!seen.emplace(std::vector<double>(row.data(), row.data() + row.size()), k).second) {
        continue;
      }
      if (projected && !certify_vertex(*projected, row, 1e-7)) continue;
      keep.push_back(k);
    }
    Block blk{vb.first_slot, vb.last_slot, {}, {}};
    blk.totals.resize(static_cast<Index>(keep.size()), vb.length());
    for (std::size_t r = 0; r < keep.size(); ++r) {
      blk.totals.row(static_cast<Index>(r)) = all.row(keep[r]);
    }
    blk.source = keep;
    blocks_.push_back(std::move(blk));
  }
}

Index WorstCase::candidate_count() const {
  Index n = 0;
  for (const auto& b : blocks_) n += b.totals.rows();
  return n;
}

WorstCaseResult WorstCase::evaluate(const Vector& p_tilde, const PriceTransform& prices) const {
  if (p_tilde.size() != set_.slots) throw std::invalid_argument("p_tilde has wrong length");
  WorstCaseResult out;
  out.worst_w = Matrix::Zero(set_.facilities, set_.slots);
  out.worst_total = Vector::Zero(set_.slots);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    const int len = blk.last_slot - blk.first_slot + 1;
    const auto p = p_tilde.segment(blk.first_slot, len);
    const auto d = prices.delta.segment(blk.first_slot, len);
    const auto g = prices.gamma.segment(blk.first_slot, len);
    const Matrix x = (-blk.totals).rowwise() + p.transpose();
    const Vector values = x.cwiseAbs() * d + x * g;
    Index best = 0;
    for (Index k = 1; k < values.size(); ++k) {
      if (values[k] > values[best]) best = k;
    }
    out.cost += values[best];
    out.worst_total.segment(blk.first_slot, len) = blk.totals.row(best).transpose();
    out.worst_w.middleCols(blk.first_slot, len) = set_.blocks[b].unstack(blk.source[best]);
  }
  return out;
}

WorstCaseResult worst_case_cost(const Vector& p_tilde, const WorstCase& wc,
                                const PriceTransform& prices) {
  return wc.evaluate(p_tilde, prices);
}

double modified_cost(const Vector& p_tilde, const Vector& nu, const WorstCase& wc,
                     const PriceTransform& prices) {
  return wc.evaluate(p_tilde, prices).cost - nu.dot(p_tilde);
}

Vector danskin_subgradient(const Vector& p_tilde, const Vector& nu, const WorstCaseResult& worst,
                           const PriceTransform& prices) {
  const Vector alpha = prices.alpha();
  const Vector beta = prices.beta();
  Vector g(p_tilde.size());
  for (Index t = 0; t < g.size(); ++t) {
    g[t] = (p_tilde[t] >= worst.worst_total[t] ? alpha[t] : beta[t]) - nu[t];
  }
  return g;
}

}  // namespace mgem
