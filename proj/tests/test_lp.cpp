#include <catch2/catch_amalgamated.hpp>

#include "rbm/lp.hpp"

using namespace rbm;

namespace {

template <class Num>
LinearProgram<Num> single_var_lp() {
  // minimize x s.t. x >= 3
  LinearProgram<Num> lp;
  int x = lp.add_var(NumTraits<Num>::one());
  lp.add_row({{x, NumTraits<Num>::one()}}, Relation::Geq, NumTraits<Num>::from_int(3));
  return lp;
}

}  // namespace

TEMPLATE_TEST_CASE("simplex solves tiny programs", "", Rational, double) {
  using Num = TestType;
  using T = NumTraits<Num>;

  SECTION("minimize x s.t. x >= 3") {
    auto lp = single_var_lp<Num>();
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(T::to_double(res.values[0]) == Catch::Approx(3.0));
    CHECK(T::to_double(res.objective) == Catch::Approx(3.0));
    CHECK_FALSE(lp_check(lp, res.values));
  }

  SECTION("minimize x+y s.t. x+y >= 1") {
    LinearProgram<Num> lp;
    int x = lp.add_var(T::one());
    int y = lp.add_var(T::one());
    lp.add_row({{x, T::one()}, {y, T::one()}}, Relation::Geq, T::one());
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(T::to_double(res.objective) == Catch::Approx(1.0));
  }

  SECTION("x >= 1 together with -x >= 0 is infeasible") {
    LinearProgram<Num> lp;
    int x = lp.add_var(T::one());
    lp.add_row({{x, T::one()}}, Relation::Geq, T::one());
    lp.add_row({{x, Num(-1)}}, Relation::Geq, T::zero());
    CHECK(lp_solve(lp).status == LpStatus::Infeasible);
  }

  SECTION("unbounded direction is reported") {
    LinearProgram<Num> lp;
    int x = lp.add_var(Num(-1));
    lp.add_row({{x, T::one()}}, Relation::Geq, T::zero());
    CHECK(lp_solve(lp).status == LpStatus::Unbounded);
  }

  SECTION("equalities through phase 1") {
    LinearProgram<Num> lp;
    int x = lp.add_var(T::one());
    int y = lp.add_var(T::from_int(2));
    lp.add_row({{x, T::one()}, {y, T::one()}}, Relation::Eq, T::one());
    lp.add_row({{x, T::one()}, {y, Num(-1)}}, Relation::Eq, T::one());
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(T::to_double(res.values[0]) == Catch::Approx(1.0));
    CHECK(T::to_double(res.values[1]) == Catch::Approx(0.0));
  }
}

TEST_CASE("rational mode is exact") {
  LinearProgram<Rational> lp;
  int x = lp.add_var(Rational(1));
  lp.add_row({{x, Rational(3)}}, Relation::Eq, Rational(1));
  auto res = lp_solve(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.values[0] == make_rational(1, 3));
  CHECK(res.objective == make_rational(1, 3));
}

TEST_CASE("lp_check reports the first violated constraint") {
  auto lp = single_var_lp<Rational>();
  CHECK_FALSE(lp_check(lp, {Rational(3)}));
  auto v = lp_check(lp, {Rational(2)});
  REQUIRE(v);
  CHECK(v->row == 0);

  LinearProgram<Rational> eq;
  int x = eq.add_var(Rational(0));
  int y = eq.add_var(Rational(0));
  eq.add_row({{x, Rational(1)}, {y, Rational(1)}}, Relation::Eq, Rational(1));
  CHECK_FALSE(lp_check(eq, {make_rational(1, 2), make_rational(1, 2)}));
  auto w = lp_check(eq, {make_rational(1, 2), Rational(1)});
  REQUIRE(w);
  CHECK(w->row == 0);

  CHECK_THROWS_AS(lp_check(eq, {Rational(1)}), std::invalid_argument);
}

TEST_CASE("malformed programs are rejected") {
  LinearProgram<Rational> lp;
  int x = lp.add_var(Rational(1));
  lp.add_row({{x, Rational(1)}, {x, Rational(1)}}, Relation::Geq, Rational(1));
  CHECK_THROWS_AS(lp_solve(lp), std::invalid_argument);

  LinearProgram<Rational> oob;
  oob.add_var(Rational(1));
  oob.add_row({{5, Rational(1)}}, Relation::Geq, Rational(1));
  CHECK_THROWS_AS(lp_solve(oob), std::invalid_argument);
}

TEST_CASE("identical inputs give identical solutions") {
  LinearProgram<double> lp;
  int x = lp.add_var(1.0);
  int y = lp.add_var(1.0);
  int z = lp.add_var(0.5);
  lp.add_row({{x, 1.0}, {y, 1.0}, {z, 1.0}}, Relation::Eq, 2.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, Relation::Geq, 0.0);
  auto a = lp_solve(lp);
  auto b = lp_solve(lp);
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.values == b.values);
  CHECK(a.pivots == b.pivots);
}
