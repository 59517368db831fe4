#include "mgem/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mgem {
namespace {

class Checker {
 public:
  void fail(std::string code, const std::string& message) {
    out.push_back({std::move(code), message});
  }

  void require(bool ok, const char* code, const std::string& message) {
    if (!ok) fail(code, message);
  }

  bool sized(const Vector& v, int n, const std::string& what) {
    if (v.size() == n) return true;
    std::ostringstream msg;
    msg << what << " has " << v.size() << " entries, expected " << n;
    fail("size", msg.str());
    return false;
  }

  std::vector<Violation> out;
};

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string at(const char* kind, std::size_t i) {
  return std::string(kind) + " " + std::to_string(i + 1);
}

std::string at_slot(const std::string& what, int t) {
  return what + " at slot " + std::to_string(t + 1);
}

void check_generators(const Scenario& s, Checker& c) {
  for (std::size_t m = 0; m < s.generators.size(); ++m) {
    const auto& g = s.generators[m];
    const auto name = at("generator", m);
    c.require(std::isfinite(g.p_min) && std::isfinite(g.p_max) &&
                  std::isfinite(g.cost_a) && std::isfinite(g.cost_b) &&
                  std::isfinite(g.ramp_up) && std::isfinite(g.ramp_down),
              "non-finite", name + " has non-finite data");
    c.require(0.0 <= g.p_min && g.p_min <= g.p_max, "generator-bounds",
              name + ": need 0 <= p_min <= p_max");
    c.require(g.ramp_up >= 0.0 && g.ramp_down >= 0.0, "generator-ramp",
              name + ": ramp limits must be nonnegative");
    c.require(g.cost_a >= 0.0, "generator-convexity",
              name + ": cost_a must be nonnegative (convex cost)");
    if (g.initial_output) {
      c.require(*g.initial_output >= g.p_min && *g.initial_output <= g.p_max,
                "generator-initial",
                name + ": initial_output outside [p_min, p_max]");
    }
  }
}

void check_loads(const Scenario& s, Checker& c) {
  const int T = s.slots();
  for (std::size_t n = 0; n < s.class1.size(); ++n) {
    const auto& d = s.class1[n];
    const auto name = at("class-1 load", n);
    c.require(0.0 <= d.p_min && d.p_min <= d.p_max, "class1-bounds",
              name + ": need 0 <= p_min <= p_max");
    c.require(d.util_c <= 0.0, "class1-concavity",
              name + ": util_c must be <= 0 (concave utility)");
    c.require(std::isfinite(d.util_c) && std::isfinite(d.util_d), "non-finite",
              name + " has non-finite utility");
  }
  for (std::size_t q = 0; q < s.class2.size(); ++q) {
    const auto& e = s.class2[q];
    const auto name = at("class-2 load", q);
    const bool caps_ok = c.sized(e.p_max_per_slot, T, name + " p_max_per_slot");
    const bool weights_ok = c.sized(e.util_weights, T, name + " util_weights");
    c.require(e.start_slot >= 0 && e.stop_slot < T && e.start_slot <= e.stop_slot,
              "class2-window", name + ": need 1 <= start_slot <= stop_slot <= T");
    c.require(e.energy_total >= 0.0, "class2-energy",
              name + ": energy_total must be nonnegative");
    if (weights_ok) {
      c.require(all_finite(e.util_weights), "non-finite",
                name + " has non-finite util_weights");
    }
    if (!caps_ok) continue;
    c.require(all_finite(e.p_max_per_slot) && (e.p_max_per_slot.array() >= 0.0).all(),
              "class2-bounds", name + ": per-slot caps must be finite and >= 0");
    for (int t = 0; t < T; ++t) {
      if (!e.in_window(t) && e.p_max_per_slot[t] != 0.0) {
        c.fail("class2-window", at_slot(name + ": nonzero cap outside window", t));
      }
    }
    const double capacity = e.p_max_per_slot.sum();
    if (capacity < e.energy_total) {
      std::ostringstream msg;
      msg << name << ": class-2 infeasible, window capacity " << capacity
          << " < energy_total " << e.energy_total;
      c.fail("class2-infeasible", msg.str());
    }
  }
}

void check_storage(const Scenario& s, Checker& c) {
  const int T = s.slots();
  for (std::size_t j = 0; j < s.storage.size(); ++j) {
    const auto& u = s.storage[j];
    const auto name = at("storage unit", j);
    c.require(0.0 <= u.b_initial && u.b_initial <= u.b_max, "storage-initial",
              name + ": need 0 <= b_initial <= b_max");
    c.require(0.0 <= u.b_min_final && u.b_min_final <= u.b_max, "storage-final",
              name + ": need 0 <= b_min_final <= b_max");
    c.require(u.p_chg_min < 0.0 && 0.0 < u.p_chg_max, "storage-power",
              name + ": need p_chg_min < 0 < p_chg_max");
    c.require(u.efficiency > 0.0 && u.efficiency <= 1.0, "storage-efficiency",
              name + ": efficiency must lie in (0, 1]");
    c.require(u.dod >= 0.0 && u.dod <= 1.0, "storage-dod",
              name + ": depth of discharge must lie in [0, 1]");
    if (c.sized(u.cost_weights, T, name + " cost_weights")) {
      c.require(all_finite(u.cost_weights) && (u.cost_weights.array() >= 0.0).all(),
                "storage-cost", name + ": cost weights must be finite and >= 0");
    }
    // Charging at the limit every slot is the fastest way to reach b_min_final.
    c.require(u.b_initial + T * u.p_chg_max >= u.b_min_final, "storage-infeasible",
              name + ": b_min_final unreachable from b_initial");
  }
}

void check_uncertainty(const Scenario& s, Checker& c) {
  const int T = s.slots();
  const auto& u = s.uncertainty;
  const int I = u.facilities();
  if (I == 0 && u.upper.rows() == 0) {
    // No renewable facilities: W is identically zero.
    c.require(u.budgets.empty(), "subhorizon-partition", "budgets given without facilities");
    return;
  }
  if (u.lower.rows() != u.upper.rows() || u.lower.cols() != T || u.upper.cols() != T) {
    c.fail("size", "uncertainty lower/upper must both be facilities x slots");
    return;
  }
  if (!u.lower.allFinite() || !u.upper.allFinite()) {
    c.fail("non-finite", "uncertainty bounds must be finite");
    return;
  }
  for (int i = 0; i < I; ++i) {
    for (int t = 0; t < T; ++t) {
      if (!(0.0 <= u.lower(i, t) && u.lower(i, t) <= u.upper(i, t))) {
        c.fail("uncertainty-bounds",
               at_slot("facility " + std::to_string(i + 1) + ": need 0 <= lower <= upper", t));
      }
    }
  }

  // Every facility (or the joint model as a whole) must be partitioned into
  // consecutive, non-overlapping, exhaustive sub-horizons.
  const bool joint = u.kind == UncertaintyKind::Joint;
  const int owners = joint ? 1 : I;
  for (int owner = 0; owner < owners; ++owner) {
    std::vector<BudgetBlock> blocks;
    for (const auto& b : u.budgets) {
      if (joint ? b.facility < 0 : b.facility == owner) blocks.push_back(b);
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const BudgetBlock& a, const BudgetBlock& b) { return a.first_slot < b.first_slot; });
    const std::string who = joint ? std::string("joint model")
                                  : "facility " + std::to_string(owner + 1);
    int next = 0;
    for (const auto& b : blocks) {
      if (b.first_slot != next || b.last_slot < b.first_slot || b.last_slot >= T) {
        c.fail("subhorizon-partition",
               who + ": sub-horizons must be consecutive, non-overlapping and cover every slot");
        next = -1;
        break;
      }
      next = b.last_slot + 1;
    }
    if (next != T && next != -1) {
      c.fail("subhorizon-partition", who + ": sub-horizons do not cover every slot");
    }
  }
  for (const auto& b : u.budgets) {
    if (joint != (b.facility < 0) || b.facility >= I) {
      c.fail("subhorizon-partition", "budget block facility does not match the uncertainty kind");
      continue;
    }
    if (b.first_slot < 0 || b.last_slot >= T || b.first_slot > b.last_slot) continue;
    const std::string who = "budget over slots " + std::to_string(b.first_slot + 1) + "-" +
                            std::to_string(b.last_slot + 1);
    c.require(b.sum_min <= b.sum_max, "budget-order", who + ": need sum_min <= sum_max");
    const auto cols = Eigen::seq(b.first_slot, b.last_slot);
    double lo = 0.0;
    double hi = 0.0;
    if (joint) {
      lo = u.lower(Eigen::all, cols).sum();
      hi = u.upper(Eigen::all, cols).sum();
    } else {
      lo = u.lower(b.facility, cols).sum();
      hi = u.upper(b.facility, cols).sum();
    }
    c.require(lo <= b.sum_max && hi >= b.sum_min, "uncertainty-empty",
              who + ": box bounds and budget do not intersect");
  }
}

void check_market(const Scenario& s, Checker& c) {
  const int T = s.slots();
  const auto& m = s.market;
  const bool sizes = c.sized(m.purchase_price, T, "purchase_price") &
                     c.sized(m.sell_price, T, "sell_price") &
                     c.sized(m.fixed_load, T, "fixed_load") &
                     c.sized(m.spinning_reserve, T, "spinning_reserve");
  c.require(m.p_r_min <= m.p_r_max, "market-pr", "need p_r_min <= p_r_max");
  if (!sizes) return;
  const double headroom = reserve_headroom(s);
  for (int t = 0; t < T; ++t) {
    const double a = m.purchase_price[t];
    const double b = m.sell_price[t];
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(m.fixed_load[t]) ||
        !std::isfinite(m.spinning_reserve[t])) {
      c.fail("non-finite", at_slot("market data is non-finite", t));
      continue;
    }
    if (b > a) {
      c.fail("price-convexity",
             at_slot("sell price exceeds purchase price (convexity condition beta <= alpha)", t));
    }
    if (b < 0.0) c.fail("price-sign", at_slot("sell price must be nonnegative", t));
    if (m.spinning_reserve[t] < 0.0) {
      c.fail("reserve-sign", at_slot("spinning reserve must be nonnegative", t));
    }
    if (headroom < m.spinning_reserve[t]) {
      c.fail("reserve-unreachable",
             at_slot("spinning reserve exceeds sum of (p_max - p_min)", t));
    }
  }
}

void check_balance(const Scenario& s, Checker& c) {
  const int T = s.slots();
  if (s.market.fixed_load.size() != T) return;
  double gen_min = 0.0;
  double gen_max = 0.0;
  for (const auto& g : s.generators) {
    gen_min += g.p_min;
    gen_max += g.p_max;
  }
  double d_min = 0.0;
  double d_max = 0.0;
  for (const auto& d : s.class1) {
    d_min += d.p_min;
    d_max += d.p_max;
  }
  for (int t = 0; t < T; ++t) {
    double e_max = 0.0;
    for (const auto& e : s.class2) {
      if (e.p_max_per_slot.size() == T) e_max += e.p_max_per_slot[t];
    }
    const double load = s.market.fixed_load[t];
    const bool ok = load + d_min <= gen_max + s.market.p_r_max &&
                    load + d_max + e_max >= gen_min + s.market.p_r_min;
    c.require(ok, "balance-infeasible", at_slot("supply and demand ranges do not overlap", t));
  }
}

}  // namespace

double reserve_headroom(const Scenario& s) {
  double h = 0.0;
  for (const auto& g : s.generators) h += g.p_max - g.p_min;
  return h;
}

std::vector<Violation> validate_scenario(const Scenario& s) {
  Checker c;
  c.require(s.horizon.slots >= 1, "horizon", "horizon must have at least one slot");
  c.require(s.horizon.slot_duration > 0.0, "horizon", "slot duration must be positive");
  if (!s.horizon.labels.empty() &&
      static_cast<int>(s.horizon.labels.size()) != s.horizon.slots) {
    c.fail("size", "horizon labels must be empty or one per slot");
  }
  if (s.horizon.slots < 1) return c.out;

  check_generators(s, c);
  check_loads(s, c);
  check_storage(s, c);
  check_uncertainty(s, c);
  check_market(s, c);
  check_balance(s, c);
  return c.out;
}

namespace {
std::string summarize(const std::vector<Violation>& v) {
  std::ostringstream msg;
  msg << "scenario validation failed with " << v.size() << " violation(s)";
  for (const auto& x : v) msg << "\n  [" << x.code << "] " << x.message;
  return msg.str();
}
}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : ScenarioError(summarize(violations)), violations_(std::move(violations)) {}

void require_valid(const Scenario& s) {
  auto v = validate_scenario(s);
  if (!v.empty()) throw ValidationError(std::move(v));
}

Scenario with_sell_ratio(const Scenario& s, double ratio) {
  // Selling above the purchase price would make G nonconvex.
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ScenarioError("sell ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
  Scenario out = s;
  out.market.sell_price = ratio * s.market.purchase_price;
  return out;
}

}  // namespace mgem
