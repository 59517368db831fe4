#include <doctest.h>

#include <algorithm>

#include "mgem/oracle.hpp"
#include "mgem/sampling.hpp"
#include "support.hpp"

using namespace mgem;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("oracle on the reduced scenario") {
  const Instance inst(builtin_scenario("reduced"));
  const auto r = centralized_solve(inst);
  CHECK(r.objective == doctest::Approx(2353.1714).epsilon(1e-7));
  // The reported objective is the exact net cost of the returned schedule.
  CHECK(r.objective == doctest::Approx(evaluate_net_cost(inst, r.schedule).total).epsilon(1e-12));
  CHECK(rel(r.qp_objective, r.objective) < 1e-6);
  CHECK(schedule_violations(inst.scenario, r.schedule, 1e-6).empty());
  CHECK(r.vertex_constraints <= static_cast<std::size_t>(inst.worst_case.candidate_count()));
}

TEST_CASE("lazy and full epigraphs agree") {
  const Instance inst(builtin_scenario("reduced"));
  OracleOptions full;
  full.lazy = false;
  const auto a = centralized_solve(inst);
  const auto b = centralized_solve(inst, full);
  CHECK(rel(a.objective, b.objective) < 1e-6);
  CHECK(b.rounds == 1);
  CHECK(a.vertex_constraints <= b.vertex_constraints);
  // Case B's full epigraph is beyond the default guard.
  OracleOptions full_b = full;
  CHECK_THROWS_AS(centralized_solve(Instance(builtin_scenario("case_b")), full_b), std::length_error);
  OracleOptions tiny;
  tiny.lazy = false;
  tiny.max_aux_variables = 3;
  CHECK_THROWS_AS(centralized_solve(Instance(builtin_scenario("reduced")), tiny), std::length_error);
}

TEST_CASE("no sampled feasible schedule beats the oracle") {
  for (const char* name : {"reduced", "case_a"}) {
    CAPTURE(name);
    const Instance inst(builtin_scenario(name));
    const double best = centralized_solve(inst).objective;
    mgem::testing::Rng rng(77);
    int sampled = 0;
    for (int i = 0; i < 300; ++i) {
      const auto x = sample_schedule(inst.scenario, rng);
      if (!x) continue;
      ++sampled;
      CHECK(evaluate_net_cost(inst, *x, 1e-6).total >= best - 1e-6 * std::abs(best));
    }
    CHECK(sampled > 0);
  }
}

TEST_CASE("singleton uncertainty: G is the deterministic purchase/sale cost") {
  Scenario s = builtin_scenario("reduced");
  s.uncertainty.upper = s.uncertainty.lower;
  s.uncertainty.budgets[0].sum_min = 0.0;
  s.uncertainty.budgets[0].sum_max = 1e6;
  const Instance inst(s);
  CHECK(inst.worst_case.set().vertex_count() == 1);
  const auto r = centralized_solve(inst);
  const Vector w = s.uncertainty.lower.colwise().sum().transpose();
  CHECK(r.costs.transaction ==
        doctest::Approx(mgem::testing::purchase_sale_cost(inst.prices.alpha(), inst.prices.beta(),
                                                          r.schedule.p_tilde_r - w)));
  mgem::testing::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto x = sample_schedule(s, rng);
    if (x) CHECK(evaluate_net_cost(inst, *x).total >= r.objective - 1e-6);
  }
}

TEST_CASE("unit and facility order do not change the optimum") {
  const Scenario s = builtin_scenario("case_b");
  const double base = centralized_solve(Instance(s)).objective;

  Scenario shuffled = s;
  std::reverse(shuffled.generators.begin(), shuffled.generators.end());
  std::reverse(shuffled.class1.begin(), shuffled.class1.end());
  std::reverse(shuffled.storage.begin(), shuffled.storage.end());
  CHECK(rel(centralized_solve(Instance(shuffled)).objective, base) < 1e-7);

  // The joint model only sees facility totals, so swapping the two wind
  // farms leaves the set of totals unchanged.
  Scenario swapped = s;
  swapped.uncertainty.lower.row(0).swap(swapped.uncertainty.lower.row(1));
  swapped.uncertainty.upper.row(0).swap(swapped.uncertainty.upper.row(1));
  CHECK(rel(centralized_solve(Instance(swapped)).objective, base) < 1e-7);
}

TEST_CASE("certify") {
  const Instance inst(builtin_scenario("reduced"));
  const auto orc = centralized_solve(inst);
  const auto same = certify(inst, orc.schedule, orc, 1e-2);
  CHECK(same.relative_gap == 0.0);
  CHECK(same.dev_p_g == 0.0);
  CHECK(same.passed);

  CoordinatorParams p;
  p.max_iters = 10;
  const auto r = run(inst, p);
  const auto early = certify(inst, r.recovered, orc, 1e-2);
  CHECK_FALSE(early.passed);
  CHECK(early.relative_gap > 1e-2);
}
