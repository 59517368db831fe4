#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mgem/linalg.hpp"

namespace mgem {

// Units: power in kW, energy in kWh (slots are one hour long, so the two are
// numerically interchangeable) and money in cents.

struct Horizon {
  int slots = 0;
  double slot_duration = 1.0;  // hours
  std::vector<std::string> labels;
};

struct Generator {
  double p_min = 0.0;
  double p_max = 0.0;
  double ramp_up = 0.0;
  double ramp_down = 0.0;
  double cost_a = 0.0;  // cents/kWh^2
  double cost_b = 0.0;  // cents/kWh
  std::optional<double> initial_output;

  double cost(double p) const { return cost_a * p * p + cost_b * p; }
};

/// Elastic load with quadratic utility c*P^2 + d*P (c <= 0).
struct Class1Load {
  double p_min = 0.0;
  double p_max = 0.0;
  double util_c = 0.0;
  double util_d = 0.0;

  double utility(double p) const { return util_c * p * p + util_d * p; }
};

/// Load with a fixed energy requirement inside a slot window.
/// Slot indices are zero-based and inclusive in memory.
struct Class2Load {
  Vector p_max_per_slot;
  double energy_total = 0.0;
  int start_slot = 0;
  int stop_slot = 0;
  Vector util_weights;  // cents/kWh

  bool in_window(int t) const { return t >= start_slot && t <= stop_slot; }
};

struct StorageUnit {
  double b_max = 0.0;
  double b_min_final = 0.0;
  double b_initial = 0.0;
  double p_chg_min = 0.0;  // negative: discharge limit
  double p_chg_max = 0.0;
  double efficiency = 1.0;
  double dod = 0.0;
  Vector cost_weights;  // psi_j^t

  /// H_j^t(B) = psi^t [(1 - DOD) B_max - B]
  double holding_cost(int t, double stored) const {
    return cost_weights[t] * ((1.0 - dod) * b_max - stored);
  }
};

/// One budget constraint  min <= sum of W over (facility, slots) <= max.
/// facility < 0 means the joint model: the sum runs over every facility.
struct BudgetBlock {
  int facility = -1;
  int first_slot = 0;
  int last_slot = 0;
  double sum_min = 0.0;
  double sum_max = 0.0;

  int length() const { return last_slot - first_slot + 1; }
};

enum class UncertaintyKind { PerFacility, Joint };

struct UncertaintyModel {
  UncertaintyKind kind = UncertaintyKind::Joint;
  Matrix lower;  // facilities x slots
  Matrix upper;
  std::vector<BudgetBlock> budgets;

  int facilities() const { return static_cast<int>(lower.rows()); }
};

struct Market {
  Vector purchase_price;  // alpha
  Vector sell_price;      // beta
  Vector fixed_load;
  Vector spinning_reserve;
  double p_r_min = 0.0;
  double p_r_max = 500.0;
};

struct Scenario {
  std::string name;
  Horizon horizon;
  std::vector<Generator> generators;
  std::vector<Class1Load> class1;
  std::vector<Class2Load> class2;
  std::vector<StorageUnit> storage;
  UncertaintyModel uncertainty;
  Market market;

  int slots() const { return horizon.slots; }
};

struct Violation {
  std::string code;
  std::string message;
};

/// Checks every static invariant. Never throws; an empty list means valid.
std::vector<Violation> validate_scenario(const Scenario& s);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public ScenarioError {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws ValidationError when validate_scenario reports anything.
void require_valid(const Scenario& s);

/// Case A / Case B / reduced reference instances.
Scenario builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();

/// A copy of `s` with beta^t = ratio * alpha^t; ratio must lie in (0, 1].
Scenario with_sell_ratio(const Scenario& s, double ratio);

/// Upper bound of sum_m (P_max - P_min); the spinning reserve must fit below.
double reserve_headroom(const Scenario& s);

}  // namespace mgem
