#include <doctest.h>

#include "mgem/transaction.hpp"
#include "support.hpp"

using namespace mgem;
using mgem::testing::active_row_vertices;
using mgem::testing::random_polytope;
using mgem::testing::same_point;

namespace {

BoxBudgetPolytope<double> box2(double lo_sum, double hi_sum) {
  return {Vector::Zero(2), Vector::Ones(2), lo_sum, hi_sum};
}

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

bool contains_point(const VertexList<double>& list, const Vector& v) {
  for (Index k = 0; k < list.size(); ++k) {
    if (same_point(list.vertex(k), v, 1e-12)) return true;
  }
  return false;
}

bool same_set(const VertexList<double>& list, const std::vector<Vector>& ref) {
  if (list.size() != static_cast<Index>(ref.size())) return false;
  for (const auto& v : ref) {
    if (!contains_point(list, v)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("box corners when the budget is slack") {
  const auto list = enumerate_box_budget(box2(0.0, 2.0));
  CHECK(same_set(list, {v2(0, 0), v2(0, 1), v2(1, 0), v2(1, 1)}));
}

TEST_CASE("toy polytope has six vertices") {
  const auto p = box2(0.5, 1.5);
  const auto list = enumerate_box_budget(p);
  const std::vector<Vector> expected{v2(0, 1),   v2(1, 0),   v2(0, 0.5),
                                     v2(0.5, 0), v2(1, 0.5), v2(0.5, 1)};
  CHECK(same_set(list, expected));
  CHECK(same_set(list, active_row_vertices(p)));
}

TEST_CASE("singleton polytope") {
  const BoxBudgetPolytope<double> p{v2(3, 4), v2(3, 4), 0.0, 100.0};
  const auto list = enumerate_box_budget(p);
  REQUIRE(list.size() == 1);
  CHECK(same_point(list.vertex(0), v2(3, 4), 0.0));
}

TEST_CASE("empty polytopes are rejected") {
  CHECK_THROWS_AS(enumerate_box_budget(box2(3.0, 4.0)), PolytopeError);
  CHECK_THROWS_AS(enumerate_box_budget(BoxBudgetPolytope<double>{v2(1, 0), v2(0, 1), 0, 2}),
                  PolytopeError);
  CHECK_THROWS_AS(enumerate_box_budget(box2(1.0, 0.5)), PolytopeError);
}

TEST_CASE("dimension guard") {
  const Index n = 21;
  const BoxBudgetPolytope<double> p{Vector::Zero(n), Vector::Ones(n), 0.0, double(n)};
  CHECK_THROWS_AS(enumerate_box_budget(p), PolytopeError);
  EnumerationOptions opt;
  opt.max_dimension = 1;
  CHECK_THROWS_AS(enumerate_box_budget(box2(0, 2), opt), PolytopeError);
  opt.max_dimension = 4;
  CHECK_NOTHROW(enumerate_box_budget(BoxBudgetPolytope<double>{Vector::Zero(4), Vector::Ones(4), 0, 4}, opt));
}

TEST_CASE("enumeration order is deterministic") {
  mgem::testing::Rng rng(11);
  const auto p = random_polytope(rng, 5);
  const auto a = enumerate_box_budget(p);
  const auto b = enumerate_box_budget(p);
  CHECK(a.points == b.points);
}

TEST_CASE("certify_vertex examples") {
  const auto p = box2(0.5, 1.5);
  CHECK(certify_vertex(p, v2(0, 0.5)));
  CHECK_FALSE(certify_vertex(p, v2(0.5, 0.5)));
  CHECK(certify_vertex(p, v2(0, 1)));
  CHECK_THROWS_AS(certify_vertex(p, v2(2, 2)), PolytopeError);
}

TEST_CASE("linear_max_oracle examples") {
  const auto r1 = linear_max_oracle(box2(0.0, 1.5), v2(1, 1));
  CHECK(r1.value == doctest::Approx(1.5));
  const auto r2 = linear_max_oracle(box2(0.0, 2.0), v2(1, -1));
  CHECK(r2.value == doctest::Approx(1.0));
  CHECK(same_point(r2.argmax, v2(1, 0), 1e-12));
  const auto r3 = linear_max_oracle(box2(0.5, 1.5), v2(0, 0));
  CHECK(r3.value == 0.0);
  CHECK(box2(0.5, 1.5).contains(r3.argmax));
}

TEST_CASE("random polytopes: completeness, soundness, exactness") {
  mgem::testing::Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 6;
    const auto p = random_polytope(rng, n);
    const auto list = enumerate_box_budget(p);
    CAPTURE(trial);

    // At most 2^n corners plus 2n 2^(n-1) budget-face points.
    CHECK(list.size() <= (Index{1} << n) + 2 * n * (Index{1} << (n - 1)));
    for (Index k = 0; k < list.size(); ++k) {
      CHECK(p.contains(list.vertex(k)));
      CHECK(certify_vertex(p, Vector(list.vertex(k))));
    }
    // Same set as the brute-force active-row enumeration (up to snapping).
    const auto ref = active_row_vertices(p);
    CHECK(list.size() == static_cast<Index>(ref.size()));
    for (const auto& v : ref) {
      bool found = false;
      for (Index k = 0; k < list.size() && !found; ++k) found = same_point(list.vertex(k), v, 1e-9);
      CHECK(found);
    }
    for (int d = 0; d < 20; ++d) {
      const Vector c = mgem::testing::uniform_vector(rng, n, -1.0, 1.0);
      const double best = (list.points * c).maxCoeff();
      worst = std::max(worst, std::abs(best - linear_max_oracle(p, c).value));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("products") {
  const ProductPolytope<double> two{{box2(0, 2), box2(0, 2)}};
  const auto list = enumerate_product(two);
  CHECK(list.size() == 16);
  CHECK(list.dimension == 4);
  // Last block varies fastest.
  CHECK(same_point(list.vertex(0), Vector::Zero(4), 0.0));
  CHECK(same_point(list.vertex(1).head(2), Vector::Zero(2), 0.0));

  const ProductPolytope<double> one{{box2(0.5, 1.5)}};
  CHECK(enumerate_product(one).points == enumerate_box_budget(box2(0.5, 1.5)).points);

  mgem::testing::Rng rng(5);
  const ProductPolytope<double> mixed{{random_polytope(rng, 3), random_polytope(rng, 2)}};
  const auto m = enumerate_product(mixed);
  CHECK(m.size() == enumerate_box_budget(mixed.blocks[0]).size() *
                        enumerate_box_budget(mixed.blocks[1]).size());
  for (Index k = 0; k < m.size(); ++k) {
    CHECK(certify_vertex(mixed.blocks[0], Vector(m.vertex(k).head(3))));
    CHECK(certify_vertex(mixed.blocks[1], Vector(m.vertex(k).tail(2))));
  }

  EnumerationOptions opt;
  opt.max_vertices = 10;
  CHECK_THROWS_AS(enumerate_product(two, opt), PolytopeError);
  CHECK_THROWS_AS(enumerate_product(ProductPolytope<double>{}), PolytopeError);
}

TEST_CASE("uncertainty vertices") {
  SUBCASE("joint I=1 T=2 toy gives six vertices") {
    UncertaintyModel u;
    u.lower = Matrix::Zero(1, 2);
    u.upper = Matrix::Ones(1, 2);
    u.budgets.push_back({-1, 0, 1, 0.5, 1.5});
    const auto set = uncertainty_vertices(u, 2);
    REQUIRE(set.blocks.size() == 1);
    CHECK(set.vertex_count() == 6);
  }
  SUBCASE("per-facility and joint coincide for one facility") {
    Scenario r = builtin_scenario("reduced");
    const auto joint = uncertainty_vertices(r.uncertainty, r.slots());
    UncertaintyModel per = r.uncertainty;
    per.kind = UncertaintyKind::PerFacility;
    per.budgets[0].facility = 0;
    const auto pf = uncertainty_vertices(per, r.slots());
    REQUIRE(joint.vertex_count() == pf.vertex_count());
    const Matrix a = joint.blocks[0].totals();
    const Matrix b = pf.blocks[0].totals();
    for (Index k = 0; k < a.rows(); ++k) {
      bool found = false;
      for (Index j = 0; j < b.rows() && !found; ++j) found = same_point(a.row(k).transpose(), b.row(j).transpose(), 1e-12);
      CHECK(found);
    }
  }
  SUBCASE("case A joint set is one 16-dimensional block") {
    const Scenario a = builtin_scenario("case_a");
    const auto set = uncertainty_vertices(a.uncertainty, a.slots());
    REQUIRE(set.blocks.size() == 1);
    CHECK(set.blocks[0].vertices.dimension == 16);
    CHECK(set.vertex_count() > 0);
  }
  SUBCASE("case A truncated to three slots matches brute force") {
    const Scenario a = builtin_scenario("case_a");
    UncertaintyModel u;
    u.lower = a.uncertainty.lower.leftCols(3);
    u.upper = a.uncertainty.upper.leftCols(3);
    u.budgets.push_back({-1, 0, 2, 40.0, 360.0});
    const auto set = uncertainty_vertices(u, 3);
    const auto ref = active_row_vertices(joint_block_polytope(u, u.budgets[0]));
    CHECK(set.vertex_count() == static_cast<Index>(ref.size()));
  }
  SUBCASE("singleton set has one vertex") {
    UncertaintyModel u;
    u.lower = Matrix::Constant(1, 3, 2.0);
    u.upper = u.lower;
    u.budgets.push_back({-1, 0, 2, 0.0, 100.0});
    CHECK(uncertainty_vertices(u, 3).vertex_count() == 1);
  }
}
