#include <doctest.h>

#include "mgem/sampling.hpp"
#include "support.hpp"

using namespace mgem;
using mgem::testing::uniform;
using mgem::testing::uniform_vector;

namespace {

Multipliers with_lambda(const Vector& lambda) {
  Multipliers z = Multipliers::zeros(static_cast<int>(lambda.size()));
  z.lambda = lambda;
  return z;
}

bool storage_feasible(const StorageUnit& u, const Vector& p, double tol = 1e-7) {
  double b = u.b_initial;
  for (Index t = 0; t < p.size(); ++t) {
    if (p[t] < u.p_chg_min - tol || p[t] > u.p_chg_max + tol) return false;
    if (p[t] < -u.efficiency * b - tol) return false;
    b += p[t];
    if (b < -tol || b > u.b_max + tol) return false;
  }
  return b >= u.b_min_final - tol;
}

bool ramps_ok(const Generator& g, const Vector& p, double tol = 1e-7) {
  for (Index t = 0; t < p.size(); ++t) {
    if (p[t] < g.p_min - tol || p[t] > g.p_max + tol) return false;
    if (t > 0 && (p[t] - p[t - 1] > g.ramp_up + tol || p[t - 1] - p[t] > g.ramp_down + tol)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("dg examples") {
  const Scenario s = builtin_scenario("case_a");
  const auto& g = s.generators[0];
  CHECK(solve_dg(g, Multipliers::zeros(8)) == Vector::Constant(8, 10.0));
  CHECK(solve_dg(g, with_lambda(Vector::Constant(8, 1e4))) == Vector::Constant(8, 50.0));

  // Two slots, ramp 30, lambda = (0, huge): slot 2 wants 50 and drags slot 1
  // up to 20.
  const Vector p = solve_dg(g, with_lambda((Vector(2) << 0.0, 1e6).finished()));
  CHECK(p[0] == doctest::Approx(20.0).epsilon(1e-5));
  CHECK(p[1] == doctest::Approx(50.0).epsilon(1e-5));
  // Case analysis cross-check: with p2 = 50 the best p1 in [20, 50] is 20.
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (double p1 = 10.0; p1 <= 50.0; p1 += 0.01) {
    for (double p2 : {p1 + 30.0 > 50.0 ? 50.0 : p1 + 30.0}) {
      const double v = g.cost(p1) + g.cost(p2) - 1e6 * p2;
      if (v < best) {
        best = v;
        arg = p1;
      }
    }
  }
  CHECK(arg == doctest::Approx(20.0).epsilon(1e-3));
}

TEST_CASE("dg honours an initial output") {
  Generator g = builtin_scenario("case_a").generators[0];
  g.initial_output = 10.0;
  const Vector p = solve_dg(g, with_lambda(Vector::Constant(3, 1e4)));
  CHECK(p[0] == doctest::Approx(40.0).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("class-1 examples and grid search") {
  const Class1Load d = builtin_scenario("case_a").class1[0];
  CHECK(solve_class1(d, with_lambda(Vector::Constant(1, 18.0)))[0] == doctest::Approx(5.0));
  CHECK(solve_class1(d, with_lambda(Vector::Constant(1, 20.0)))[0] == doctest::Approx(0.5));
  CHECK(solve_class1(d, with_lambda(Vector::Constant(1, 0.0)))[0] == doctest::Approx(10.0));

  mgem::testing::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double lam = uniform(rng, -5.0, 30.0);
    const double p = solve_class1(d, with_lambda(Vector::Constant(1, lam)))[0];
    CHECK(std::abs(p - mgem::testing::class1_grid(d, lam, 1e-4)) <= 1e-3);
  }

  Class1Load linear{1.0, 4.0, 0.0, 10.0};
  const Vector lam = (Vector(3) << 9.0, 10.0, 11.0).finished();
  CHECK(solve_class1(linear, with_lambda(lam)) == (Vector(3) << 4.0, 1.0, 1.0).finished());
}

TEST_CASE("class-2 greedy") {
  Class2Load e;
  e.p_max_per_slot = (Vector(6) << 0, 1.55, 1.55, 1.55, 1.55, 1.55).finished();
  e.energy_total = 5.5;
  e.start_slot = 1;
  e.stop_slot = 5;
  e.util_weights = Vector::Zero(6);
  SUBCASE("ties fill earlier slots first") {
    const Vector p = solve_class2(e, Multipliers::zeros(6));
    CHECK((p - (Vector(6) << 0, 1.55, 1.55, 1.55, 0.85, 0).finished()).norm() < 1e-12);
  }
  SUBCASE("energy equal to capacity fills every slot") {
    e.energy_total = 7.75;
    CHECK((solve_class2(e, Multipliers::zeros(6)) - e.p_max_per_slot).norm() < 1e-12);
  }
  SUBCASE("cheapest slot takes everything it can") {
    e.energy_total = 1.0;
    const Vector p = solve_class2(e, with_lambda(Vector::LinSpaced(6, 0, 5)));
    CHECK(p[1] == 1.0);
    CHECK(p.sum() == 1.0);
  }
  SUBCASE("matches the LP") {
    mgem::testing::Rng rng(4);
    for (int i = 0; i < 50; ++i) {
      const auto z = with_lambda(uniform_vector(rng, 6, -5, 5));
      const Vector p = solve_class2(e, z);
      CHECK(p.sum() == doctest::Approx(e.energy_total).epsilon(1e-12));
      const double lp = solve_lp_min_norm(class2_program(e, z), QpOptions{1e-11, 200}).objective;
      CHECK(std::abs(class2_objective(e, z, p) - lp) <= 1e-8 * (1 + std::abs(lp)));
    }
  }
}

TEST_CASE("storage examples") {
  const StorageUnit u = builtin_scenario("case_a").storage[0];
  SUBCASE("zero prices pick the minimum-norm point") {
    const auto r = solve_storage(u, Multipliers::zeros(8));
    CHECK(r.p_b.cwiseAbs().maxCoeff() < 1e-4);
  }
  SUBCASE("charging penalized everywhere keeps every slot at zero") {
    Multipliers z = Multipliers::zeros(8);
    z.nu.setOnes();
    const auto r = solve_storage(u, z);
    CHECK(r.p_b.cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("two slots, charging penalized then rewarded") {
    // nu = (+1, -1). Discharging the 4.75 kWh the efficiency floor allows in
    // slot 1, then charging at the 10 kW cap, beats (0, 10): objective
    // -14.75 against -10. Checked by exhaustive search below.
    StorageUnit two = u;
    two.cost_weights = Vector::Zero(2);
    Multipliers z = Multipliers::zeros(2);
    z.nu << 1.0, -1.0;
    const auto r = solve_storage(two, z);
    CHECK(r.p_b[0] == doctest::Approx(-4.75).epsilon(1e-6));
    CHECK(r.p_b[1] == doctest::Approx(10.0).epsilon(1e-6));
    double best = std::numeric_limits<double>::infinity();
    for (int i = -40; i <= 40; ++i) {
      for (int k = -40; k <= 40; ++k) {
        const Vector p = (Vector(2) << 0.25 * i, 0.25 * k).finished();
        if (storage_feasible(two, p, 1e-9)) best = std::min(best, z.nu.dot(p));
      }
    }
    CHECK(storage_objective(two, z, r.p_b) == doctest::Approx(best).epsilon(1e-6));
  }
  SUBCASE("levels follow the dynamics") {
    Multipliers z = Multipliers::zeros(8);
    z.nu = Vector::LinSpaced(8, -4, 4);
    const auto r = solve_storage(u, z);
    CHECK((r.b - storage_levels(u, r.p_b)).norm() == 0.0);
    CHECK(storage_feasible(u, r.p_b));
  }
}

TEST_CASE("renewable closed form for P_R") {
  const Scenario s = builtin_scenario("reduced");
  const auto prices = PriceTransform::from(s.market);
  const WorstCase wc(s.uncertainty, s.slots());
  Multipliers z = Multipliers::zeros(4);
  z.lambda.setConstant(3.0);
  z.nu.setConstant(3.0);
  CHECK(solve_renewable(s, prices, wc, z).p_r == Vector::Constant(4, s.market.p_r_min));
  z.nu.setConstant(2.0);
  CHECK(solve_renewable(s, prices, wc, z).p_r == Vector::Constant(4, s.market.p_r_max));
}

TEST_CASE("renewable P~ matches the epigraph optimum") {
  const Scenario s = builtin_scenario("reduced");
  const auto prices = PriceTransform::from(s.market);
  const WorstCase wc(s.uncertainty, s.slots());
  const auto [lo, hi] = p_tilde_box(s);
  mgem::testing::Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    Multipliers z = Multipliers::zeros(4);
    z.nu = uniform_vector(rng, 4, 0.0, 8.0);
    const auto r = solve_renewable(s, prices, wc, z);
    CHECK(r.converged);
    const double ref = mgem::testing::epigraph_min_modified_cost(wc.set(), prices.alpha(),
                                                                 prices.beta(), z.nu, lo, hi);
    CHECK(std::abs(r.modified_cost - ref) <= 1e-4 * std::max(1.0, std::abs(ref)));
  }
  // Below every sell price the minimizer sits on the surplus side of every
  // vertex, at the lower end of the box.
  Multipliers z = Multipliers::zeros(4);
  z.nu = prices.beta() - Vector::Constant(4, 0.5);
  const auto r = solve_renewable(s, prices, wc, z);
  const double ref =
      mgem::testing::epigraph_min_modified_cost(wc.set(), prices.alpha(), prices.beta(), z.nu, lo, hi);
  CHECK(r.modified_cost == doctest::Approx(ref).epsilon(1e-4));
  CHECK(r.at_box_bound);
}

TEST_CASE("Monte-Carlo domination of every local solver") {
  const Scenario s = builtin_scenario("case_a");
  mgem::testing::Rng rng(2025);
  const int T = s.slots();
  for (int draw = 0; draw < 50; ++draw) {
    const Multipliers z = sample_multipliers(T, 40.0, 60.0, rng);
    CAPTURE(draw);
    for (const auto& g : s.generators) {
      const Vector p = solve_dg(g, z);
      CHECK(ramps_ok(g, p));
      const double best = dg_objective(g, z, p);
      for (int i = 0; i < 1000; ++i) {
        CHECK(best <= dg_objective(g, z, sample_dg(g, T, rng)) + 1e-7);
      }
    }
    for (const auto& d : s.class1) {
      const double best = class1_objective(d, z, solve_class1(d, z));
      for (int i = 0; i < 1000; ++i) {
        CHECK(best <= class1_objective(d, z, sample_class1(d, T, rng)) + 1e-9);
      }
    }
    for (const auto& e : s.class2) {
      const double best = class2_objective(e, z, solve_class2(e, z));
      for (int i = 0; i < 1000; ++i) {
        CHECK(best <= class2_objective(e, z, sample_class2(e, T, rng)) + 1e-9);
      }
    }
    const auto& u = s.storage[0];
    const auto st = solve_storage(u, z);
    const double best = storage_objective(u, z, st.p_b);
    for (int i = 0; i < 1000; ++i) {
      const Vector p = sample_storage(u, T, rng);
      REQUIRE(storage_feasible(u, p));
      CHECK(best <= storage_objective(u, z, p) + 1e-6);
    }
  }
}

TEST_CASE("Monte-Carlo domination of the renewable solver") {
  const Scenario s = builtin_scenario("reduced");
  const auto prices = PriceTransform::from(s.market);
  const WorstCase wc(s.uncertainty, s.slots());
  mgem::testing::Rng rng(8);
  for (int draw = 0; draw < 20; ++draw) {
    const Multipliers z = sample_multipliers(4, 4.0, 4.0, rng);
    const auto r = solve_renewable(s, prices, wc, z);
    const double best = renewable_objective(z, r.p_r, r.p_tilde_r, wc.evaluate(r.p_tilde_r, prices).cost);
    for (int i = 0; i < 1000; ++i) {
      const Vector pr = uniform_vector(rng, 4, s.market.p_r_min, s.market.p_r_max);
      const Vector pt = sample_p_tilde(s, rng);
      CHECK(best <= renewable_objective(z, pr, pt, wc.evaluate(pt, prices).cost) + 1e-5);
    }
  }
}
