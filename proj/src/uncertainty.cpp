#include "mgem/uncertainty.hpp"

#include <algorithm>

namespace mgem {

Matrix VertexBlock::totals() const {
  const int len = length();
  Matrix out = Matrix::Zero(vertices.size(), len);
  for (int i = 0; i < facilities; ++i) out += vertices.points.middleCols(i * len, len);
  return out;
}

Matrix VertexBlock::unstack(Index k) const {
  const int len = length();
  Matrix out(facilities, len);
  for (int i = 0; i < facilities; ++i) out.row(i) = vertices.points.row(k).segment(i * len, len);
  return out;
}

Index UncertaintySet::vertex_count() const {
  Index n = 0;
  for (const auto& b : blocks) n += b.vertices.size();
  return n;
}

namespace {

std::vector<BudgetBlock> blocks_of(const UncertaintyModel& u, int facility) {
  std::vector<BudgetBlock> out;
  for (const auto& b : u.budgets) {
    if (b.facility == facility) out.push_back(b);
  }
  std::sort(out.begin(), out.end(),
            [](const BudgetBlock& a, const BudgetBlock& b) { return a.first_slot < b.first_slot; });
  return out;
}

BoxBudgetPolytope<double> facility_block(const UncertaintyModel& u, const BudgetBlock& b) {
  const auto cols = Eigen::seq(b.first_slot, b.last_slot);
  return {u.lower(b.facility, cols).transpose(), u.upper(b.facility, cols).transpose(),
          b.sum_min, b.sum_max};
}

}  // namespace

BoxBudgetPolytope<double> joint_block_polytope(const UncertaintyModel& u, const BudgetBlock& b) {
  const int I = u.facilities();
  const int len = b.length();
  BoxBudgetPolytope<double> p;
  p.lower.resize(I * len);
  p.upper.resize(I * len);
  for (int i = 0; i < I; ++i) {
    p.lower.segment(i * len, len) = u.lower.row(i).segment(b.first_slot, len).transpose();
    p.upper.segment(i * len, len) = u.upper.row(i).segment(b.first_slot, len).transpose();
  }
  p.sum_min = b.sum_min;
  p.sum_max = b.sum_max;
  return p;
}

UncertaintySet uncertainty_vertices(const UncertaintyModel& u, int slots,
                                    const EnumerationOptions& opt) {
  UncertaintySet out;
  out.kind = u.kind;
  out.slots = slots;
  out.facilities = u.facilities();

  if (out.facilities == 0) {
    VertexBlock blk{0, slots - 1, 0, {}};
    blk.vertices.points.resize(1, 0);
    blk.vertices.provenance = "empty";
    out.blocks.push_back(std::move(blk));
    return out;
  }

  if (u.kind == UncertaintyKind::Joint) {
    for (const auto& b : blocks_of(u, -1)) {
      VertexBlock blk{b.first_slot, b.last_slot, out.facilities,
                      enumerate_box_budget(joint_block_polytope(u, b), opt)};
      blk.vertices.provenance = "joint";
      out.blocks.push_back(std::move(blk));
    }
    return out;
  }

  // Per facility: product over its sub-horizons, then across facilities.
  ProductPolytope<double> all;
  for (int i = 0; i < out.facilities; ++i) {
    for (const auto& b : blocks_of(u, i)) all.blocks.push_back(facility_block(u, b));
  }
  VertexBlock blk{0, slots - 1, out.facilities, enumerate_product(all, opt)};
  blk.vertices.provenance = "per-facility";
  out.blocks.push_back(std::move(blk));
  return out;
}

}  // namespace mgem
