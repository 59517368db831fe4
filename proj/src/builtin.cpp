#include <array>

#include "mgem/scenario.hpp"

namespace mgem {
namespace {

constexpr int kSlots = 8;

Vector slots(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector case_a_alpha() { return slots({2.01, 2.2, 3.62, 6.6, 5.83, 3.99, 2.53, 2.34}); }
Vector case_a_beta() { return slots({1.81, 1.98, 3.26, 5.94, 5.25, 3.59, 2.28, 2.11}); }
Vector case_b_alpha() { return slots({40.2, 44, 72.4, 132, 116.6, 79.8, 50.6, 46.8}); }
Vector case_b_beta() {
  return slots({36.18, 39.6, 65.16, 118.8, 104.94, 71.82, 45.54, 42.12});
}

// Class-2 utility weights pi^t = 4, 3.5, ..., 0.5 over the eight slots.
Vector class2_weights(int T) {
  Vector w(T);
  for (int t = 0; t < T; ++t) w[t] = 4.0 - 0.5 * t;
  return w;
}

Class2Load class2(double cap, double energy, int first, int last, int T) {
  Class2Load e;
  e.p_max_per_slot = Vector::Zero(T);
  e.p_max_per_slot.segment(first, last - first + 1).setConstant(cap);
  e.energy_total = energy;
  e.start_slot = first;
  e.stop_slot = last;
  e.util_weights = class2_weights(T);
  return e;
}

StorageUnit storage(int T) {
  StorageUnit u;
  u.b_max = 30.0;
  u.b_min_final = 5.0;
  u.b_initial = 5.0;
  u.p_chg_min = -10.0;
  u.p_chg_max = 10.0;
  u.efficiency = 0.95;
  u.dod = 0.0;
  u.cost_weights = Vector::Zero(T);
  return u;
}

Scenario published_case(const char* name, Vector alpha, Vector beta) {
  Scenario s;
  s.name = name;
  s.horizon.slots = kSlots;
  s.horizon.labels = {"4PM", "5PM", "6PM", "7PM", "8PM", "9PM", "10PM", "11PM"};

  // p_min, p_max, ramp, a, b (cents)
  const std::array<std::array<double, 5>, 3> gens{{
      {10, 50, 30, 0.6, 50},
      {8, 45, 25, 0.3, 25},
      {15, 70, 40, 0.4, 30},
  }};
  for (const auto& g : gens) {
    s.generators.push_back({g[0], g[1], g[2], g[2], g[3], g[4], std::nullopt});
  }

  // p_min, p_max, c, d (cents)
  const std::array<std::array<double, 4>, 6> loads{{
      {0.5, 10, -0.2, 20},
      {4, 16, -0.17, 17},
      {2, 15, -0.3, 30},
      {5.5, 20, -0.24, 24},
      {1, 27, -0.15, 15},
      {7, 32, -0.37, 37},
  }};
  for (const auto& d : loads) s.class1.push_back({d[0], d[1], d[2], d[3]});

  // Windows 6PM-12AM, 7PM-11PM, 6PM-12AM, 6PM-12AM as zero-based slots.
  s.class2.push_back(class2(1.2, 5.0, 2, 7, kSlots));
  s.class2.push_back(class2(1.55, 5.5, 3, 6, kSlots));
  s.class2.push_back(class2(1.3, 4.0, 2, 7, kSlots));
  s.class2.push_back(class2(1.7, 8.0, 2, 7, kSlots));

  for (int j = 0; j < 3; ++j) s.storage.push_back(storage(kSlots));

  auto& u = s.uncertainty;
  u.kind = UncertaintyKind::Joint;
  u.lower.resize(2, kSlots);
  u.upper.resize(2, kSlots);
  u.lower << 2.47, 2.27, 2.18, 1.97, 2.28, 2.66, 3.1, 3.38,
             2.57, 1.88, 2.16, 1.56, 1.95, 3.07, 3.44, 3.11;
  u.upper << 24.7, 22.7, 21.8, 19.7, 22.8, 26.6, 31, 33.8,
             25.7, 18.8, 21.6, 15.6, 19.5, 30.7, 34.4, 31.1;
  u.budgets.push_back({-1, 0, kSlots - 1, 40.0, 360.0});

  auto& m = s.market;
  m.purchase_price = std::move(alpha);
  m.sell_price = std::move(beta);
  m.fixed_load = slots({57.8, 58.4, 64, 65.1, 61.5, 58.8, 55.5, 51});
  m.spinning_reserve = Vector::Constant(kSlots, 10.0);
  m.p_r_min = 25.0;
  m.p_r_max = 130.0;
  return s;
}

// First four slots of Case A with the first entry of each table.
Scenario reduced() {
  constexpr int T = 4;
  const Scenario a = published_case("case_a", case_a_alpha(), case_a_beta());
  Scenario s;
  s.name = "reduced";
  s.horizon.slots = T;
  s.horizon.labels.assign(a.horizon.labels.begin(), a.horizon.labels.begin() + T);
  s.generators = {a.generators[0], a.generators[1]};
  s.class1 = {a.class1[0], a.class1[1]};
  // Load 1 keeps its 6PM start; only two window slots remain, so the energy
  // requirement is cut to 2 kWh to stay within 2 x 1.2 kWh of capacity.
  s.class2.push_back(class2(1.2, 2.0, 2, 3, T));
  s.storage.push_back(storage(T));
  s.uncertainty.kind = UncertaintyKind::Joint;
  s.uncertainty.lower = a.uncertainty.lower.topLeftCorner(1, T);
  s.uncertainty.upper = a.uncertainty.upper.topLeftCorner(1, T);
  s.uncertainty.budgets.push_back({-1, 0, T - 1, 40.0, 360.0});
  s.market.purchase_price = a.market.purchase_price.head(T);
  s.market.sell_price = a.market.sell_price.head(T);
  s.market.fixed_load = a.market.fixed_load.head(T);
  s.market.spinning_reserve = a.market.spinning_reserve.head(T);
  s.market.p_r_min = a.market.p_r_min;
  s.market.p_r_max = a.market.p_r_max;
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"case_a", "case_b", "reduced"}; }

Scenario builtin_scenario(std::string_view name) {
  if (name == "case_a") return published_case("case_a", case_a_alpha(), case_a_beta());
  if (name == "case_b") return published_case("case_b", case_b_alpha(), case_b_beta());
  if (name == "reduced") return reduced();
  throw ScenarioError("unknown builtin scenario '" + std::string(name) +
                      "' (expected case_a, case_b or reduced)");
}

}  // namespace mgem
