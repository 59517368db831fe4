#pragma once

#include "mgem/bundle.hpp"
#include "mgem/qp.hpp"
#include "mgem/scenario.hpp"
#include "mgem/transaction.hpp"

namespace mgem {

/// Dual variables of the reserve (mu >= 0), balance (lambda) and
/// transformation (nu) constraints.
struct Multipliers {
  Vector mu;
  Vector lambda;
  Vector nu;

  static Multipliers zeros(int slots) {
    return {Vector::Zero(slots), Vector::Zero(slots), Vector::Zero(slots)};
  }
};

/// Every primal decision of the problem; rows are units, columns slots.
struct Schedule {
  Matrix p_g;
  Matrix p_d;
  Matrix p_e;
  Matrix p_b;
  Matrix b;
  Vector p_r;
  Vector p_tilde_r;

  static Schedule zeros(const Scenario& s);
};

/// Stored energy implied by charging powers: b^t = b^0 + sum_{tau <= t} p^tau.
Vector storage_levels(const StorageUnit& unit, const Vector& p_b);

// Local objectives, Lagrangian terms included.
double dg_objective(const Generator& g, const Multipliers& z, const Vector& p);
double class1_objective(const Class1Load& d, const Multipliers& z, const Vector& p);
double class2_objective(const Class2Load& e, const Multipliers& z, const Vector& p);
double storage_objective(const StorageUnit& u, const Multipliers& z, const Vector& p_b);
double renewable_objective(const Multipliers& z, const Vector& p_r, const Vector& p_tilde,
                           double worst_case_cost);

// The same subproblems as generic programs, used as cross-checks and as the
// fallback path of the specialized solvers.
QuadraticProgram<double> dg_program(const Generator& g, const Multipliers& z);
QuadraticProgram<double> class2_program(const Class2Load& e, const Multipliers& z);
QuadraticProgram<double> storage_program(const StorageUnit& u, const Multipliers& z);

/// Slot-wise stationary point when the ramps allow it, the QP otherwise.
Vector solve_dg(const Generator& g, const Multipliers& z, const QpOptions& opt = {});

/// clip((lambda - d) / (2c)); for c = 0 the bang-bang rule with ties at p_min.
Vector solve_class1(const Class1Load& d, const Multipliers& z);

/// Greedy fill of the window in ascending lambda - pi, earlier slot first on
/// ties.
Vector solve_class2(const Class2Load& e, const Multipliers& z);

struct StorageSolution {
  Vector p_b;
  Vector b;
};

/// Minimum-norm optimal point of the storage LP.
StorageSolution solve_storage(const StorageUnit& u, const Multipliers& z, const QpOptions& opt = {});

struct RenewableSolution {
  Vector p_r;
  Vector p_tilde_r;
  double modified_cost = 0.0;  // G~ at p_tilde_r
  double eta = 0.0;
  int bundle_iterations = 0;
  bool converged = false;
  bool at_box_bound = false;
};

/// Box [P_R^min + sum_j P_Bj^min, P_R^max + sum_j P_Bj^max] that the
/// transformation constraint implies for P~_R.
std::pair<Vector, Vector> p_tilde_box(const Scenario& s);

/// P_R by the closed form (P_R^min when nu >= lambda), P~_R by the bundle
/// method on G~ with an exact penalty keeping it inside p_tilde_box.
RenewableSolution solve_renewable(const Scenario& s, const PriceTransform& prices,
                                  const WorstCase& wc, const Multipliers& z,
                                  const BundleParams<double>& params = {});

}  // namespace mgem
