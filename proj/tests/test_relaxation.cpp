#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rbm/oracle.hpp"
#include "rbm/relaxation.hpp"

using namespace rbm;

namespace {

Instance abab() { return Instance(2, std::vector<std::string>{"A", "B", "A", "B"}); }

Instance random_instance(std::mt19937& rng, int max_n, int max_k, int max_colors) {
  int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_k));
  int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_n));
  int colors = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_colors));
  std::vector<ColorId> ids(static_cast<size_t>(n));
  for (auto& c : ids) c = static_cast<ColorId>(rng() % static_cast<unsigned>(colors));
  return Instance(k, ids);
}

}  // namespace

TEST_CASE("build_lp instantiates the exact variable and row sets") {
  SECTION("ABAB with k=2") {
    Instance inst = abab();
    auto rlp = build_lp<Rational>(inst);
    CHECK(rlp.lp.num_vars == 15);  // 4+4+4+3
    // items, slots, 6 two-term order rows plus one boundary row per
    // non-last item (x_{i,k+n} <= 0)
    CHECK(rlp.lp.rows.size() == 4 + 4 + 8);
    CHECK(rlp.order_rows == 8);

    int costed = 0;
    for (const auto& c : rlp.lp.objective)
      if (c == 1) ++costed;
    CHECK(costed == 7);  // items 3 and 4 are costed on every slot

    // spot-check the variable map
    CHECK(rlp.var_ij[static_cast<size_t>(rlp.var_index(inst, 1, 3))] == std::pair<int, int>{1, 3});
    CHECK(rlp.var_ij[static_cast<size_t>(rlp.var_index(inst, 4, 6))] == std::pair<int, int>{4, 6});
  }

  SECTION("single item") {
    Instance inst(1, std::vector<std::string>{"A"});
    auto rlp = build_lp<Rational>(inst);
    CHECK(rlp.lp.num_vars == 1);  // x_{1,2}
    CHECK(rlp.lp.objective[0] == 1);
    CHECK(rlp.order_rows == 0);
  }

  SECTION("repeated color splits the objective") {
    Instance inst(1, std::vector<std::string>{"A", "A"});
    auto rlp = build_lp<Rational>(inst);
    REQUIRE(rlp.lp.num_vars == 4);  // item1: slots 2..3, item2: slots 2..3
    // item 1 precedes another A, so no slot of it is costed (n(1)-2 = 0)
    CHECK(rlp.lp.objective[static_cast<size_t>(rlp.var_index(inst, 1, 2))] == 0);
    CHECK(rlp.lp.objective[static_cast<size_t>(rlp.var_index(inst, 1, 3))] == 0);
    CHECK(rlp.lp.objective[static_cast<size_t>(rlp.var_index(inst, 2, 2))] == 1);
    CHECK(rlp.lp.objective[static_cast<size_t>(rlp.var_index(inst, 2, 3))] == 1);
  }
}

TEST_CASE("solve_relaxation reaches the known optima") {
  CHECK(solve_relaxation<Rational>(abab()).objective() == 2);
  CHECK(solve_relaxation<Rational>(Instance(2, std::vector<std::string>{"A", "A", "A"}))
            .objective() == 1);
  CHECK(solve_relaxation<Rational>(Instance(1, std::vector<std::string>{"A", "B"}))
            .objective() == 2);
}

TEST_CASE("weights obey the capacity identity") {
  Instance inst = abab();
  Schedule aabb(inst.k(), inst.n());
  aabb.assign(3, 1);
  aabb.assign(4, 3);
  aabb.assign(5, 2);
  aabb.assign(6, 4);
  auto [sol, rep] = schedule_to_solution<Rational>(inst, aabb);
  REQUIRE(rep.holds());
  WeightView<Rational> w(sol);

  CHECK(w.weight(1, 3) == 0);
  CHECK(w.weight(2, 3) == 1);
  CHECK(w.weight(3, 3) == 1);
  CHECK(w.weight(1, 3) + w.weight(2, 3) + w.weight(3, 3) == 2);  // = k

  Rational sum5 = 0;
  for (int i = 1; i <= 4; ++i) sum5 += w.weight(i, 5);
  CHECK(sum5 == 1);  // k + n - j = 2 + 4 - 5

  for (int i = 1; i <= 4; ++i) CHECK(w.weight(i, i - 1) == 1);
}

TEST_CASE("check_feasibility flags hand-built violations") {
  SECTION("solver outputs pass") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
      Instance inst = random_instance(rng, 7, 3, 3);
      auto sol = solve_relaxation<Rational>(inst);
      auto rep = check_feasibility(sol);
      INFO((rep.ok() ? std::string() : rep.violations.front()));
      CHECK(rep.ok());
      // idempotent: checking twice reports the same
      CHECK(check_feasibility(sol).violations == rep.violations);
    }
  }

  SECTION("mass not summing to one trips constraint (1)") {
    Instance inst(1, std::vector<std::string>{"A", "A"});
    FractionalSolution<Rational> sol(inst);
    sol.set(1, 2, make_rational(9, 10));
    auto rep = check_feasibility(sol);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations.front().find("(1)") != std::string::npos);
  }

  SECTION("order violation trips constraint (3)") {
    // (1) and (2) hold but x_{2,3} - x_{1,2} = -1/10
    Instance inst(1, std::vector<std::string>{"A", "A", "B"});
    FractionalSolution<Rational> sol(inst);
    sol.set(1, 2, make_rational(1, 2));
    sol.set(1, 3, make_rational(1, 2));
    sol.set(2, 2, make_rational(1, 2));
    sol.set(2, 3, make_rational(2, 5));
    sol.set(2, 4, make_rational(1, 10));
    sol.set(3, 3, make_rational(1, 10));
    sol.set(3, 4, make_rational(9, 10));
    auto rep = check_feasibility(sol);
    bool has3 = false;
    for (const auto& v : rep.violations)
      if (v.find("(3)") != std::string::npos) has3 = true;
    CHECK(has3);
  }
}

TEST_CASE("decompose_msm peels maximal chains") {
  SECTION("integral AABB") {
    Instance inst = abab();
    Schedule aabb(inst.k(), inst.n());
    aabb.assign(3, 1);
    aabb.assign(4, 3);
    aabb.assign(5, 2);
    aabb.assign(6, 4);
    auto [sol, rep] = schedule_to_solution<Rational>(inst, aabb);
    REQUIRE(rep.holds());
    auto packing = decompose_msm(sol);
    REQUIRE(packing.entries.size() == 2);
    CHECK(packing.entries[0].items == std::vector<int>{1, 3});
    CHECK(packing.entries[0].start_slot == 2);
    CHECK(packing.entries[0].lambda == 1);
    CHECK(packing.entries[1].items == std::vector<int>{2, 4});
    CHECK(packing.entries[1].start_slot == 4);
    CHECK(packing.entries[1].lambda == 1);
    CHECK(packing.total_weight() == 2);
    CHECK(verify_msm_packing(sol, packing).ok());
  }

  SECTION("single item") {
    Instance inst(1, std::vector<std::string>{"A"});
    FractionalSolution<Rational> sol(inst);
    sol.set(1, 2, Rational(1));
    auto packing = decompose_msm(sol);
    REQUIRE(packing.entries.size() == 1);
    CHECK(packing.entries[0].items == std::vector<int>{1});
    CHECK(packing.entries[0].start_slot == 1);
    CHECK(verify_msm_packing(sol, packing).ok());
  }

  SECTION("half/half two colors") {
    Instance inst(1, std::vector<std::string>{"A", "B"});
    FractionalSolution<Rational> sol(inst);
    sol.set(1, 2, make_rational(1, 2));
    sol.set(2, 2, make_rational(1, 2));
    sol.set(1, 3, make_rational(1, 2));
    sol.set(2, 3, make_rational(1, 2));
    REQUIRE(check_feasibility(sol).ok());
    auto packing = decompose_msm(sol);
    CHECK(packing.entries.size() == 4);  // four length-1 chains of weight 1/2
    for (const auto& e : packing.entries) CHECK(e.lambda == make_rational(1, 2));
    CHECK(packing.total_weight() == sol.objective());
    CHECK(verify_msm_packing(sol, packing).ok());
  }

  SECTION("rejects infeasible input") {
    Instance inst(1, std::vector<std::string>{"A"});
    FractionalSolution<Rational> sol(inst);
    sol.set(1, 2, make_rational(1, 2));
    CHECK_THROWS_AS(decompose_msm(sol), std::invalid_argument);
  }
}

TEST_CASE("packing constraints hold exactly on solver optima") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 15; ++trial) {
    Instance inst = random_instance(rng, 8, 3, 3);
    auto sol = solve_relaxation<Rational>(inst);
    auto packing = decompose_msm(sol);
    auto rep = verify_msm_packing(sol, packing);
    INFO((rep.ok() ? std::string() : rep.violations.front()));
    CHECK(rep.ok());
    CHECK(packing.entries.size() <= sol.nonzeros());
  }
}

TEST_CASE("relaxation lower-bounds the exact optimum") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 15; ++trial) {
    Instance inst = random_instance(rng, 8, 3, 3);
    auto sol = solve_relaxation<Rational>(inst);
    auto [opt, witness] = optimal_cost(inst);
    CHECK(sol.objective() <= Rational(opt));
    CHECK(schedule_cost(inst, witness) == opt);
  }
}

TEST_CASE("float and rational modes agree on the objective") {
  std::mt19937 rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_instance(rng, 8, 3, 3);
    auto exact = solve_relaxation<Rational>(inst);
    auto approx = solve_relaxation<double>(inst);
    CHECK(std::abs(NumTraits<Rational>::to_double(exact.objective()) - approx.objective()) <
          1e-8);  // 10 * eps_feas
    CHECK(check_feasibility(approx).ok());
  }
}
