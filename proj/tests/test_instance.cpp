#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rbm/instance.hpp"
#include "rbm/solution.hpp"

using namespace rbm;

namespace {

Instance abab() { return Instance(2, std::vector<std::string>{"A", "B", "A", "B"}); }

Schedule make_schedule(const Instance& inst, std::initializer_list<int> items) {
  Schedule s(inst.k(), inst.n());
  int slot = inst.first_slot();
  for (int i : items) s.assign(slot++, i);
  return s;
}

}  // namespace

TEST_CASE("next_same_color follows the input chain") {
  Instance inst = abab();
  CHECK(inst.next_same_color(1) == 3);
  CHECK(inst.next_same_color(2) == 4);
  CHECK(inst.next_same_color(3) == 8);  // k+n+2 sentinel
  CHECK(inst.next_same_color(4) == 8);
  CHECK(inst.is_last(3));
  CHECK_FALSE(inst.is_last(1));
  CHECK(inst.prev_same_color(3) == 1);

  Instance single(1, std::vector<std::string>{"A"});
  CHECK(single.next_same_color(1) == 4);  // 1 + 1 + 2
  CHECK_THROWS_AS(single.next_same_color(2), std::out_of_range);
}

TEST_CASE("schedule cost counts maximal runs") {
  Instance inst = abab();
  Schedule aabb = make_schedule(inst, {1, 3, 2, 4});
  Schedule abab_sched = make_schedule(inst, {1, 2, 3, 4});
  CHECK(schedule_cost(inst, aabb) == 2);
  CHECK(schedule_cost(inst, abab_sched) == 4);

  Instance aaa(2, std::vector<std::string>{"A", "A", "A"});
  Schedule any = make_schedule(aaa, {1, 2, 3});
  CHECK(schedule_cost(aaa, any) == 1);
}

TEST_CASE("validate_schedule reports the first violation") {
  Instance inst = abab();
  CHECK_FALSE(validate_schedule(inst, make_schedule(inst, {1, 3, 2, 4})));

  Schedule early = make_schedule(inst, {4, 1, 2, 3});  // item 4 arrives at 4, slot is 3
  auto v = validate_schedule(inst, early);
  REQUIRE(v);
  CHECK(v->slot == 3);
  CHECK(v->reason == "item not yet arrived");

  Schedule dup = make_schedule(inst, {1, 1, 2, 3});
  auto d = validate_schedule(inst, dup);
  REQUIRE(d);
  CHECK(d->reason == "not a bijection: item assigned twice");
}

TEST_CASE("schedule_to_solution produces the 0/1 relaxation point") {
  Instance inst = abab();

  SECTION("compliant schedule: objective matches the run count") {
    auto [sol, rep] = schedule_to_solution<Rational>(inst, make_schedule(inst, {1, 3, 2, 4}));
    CHECK(sol.nonzeros() == 4);
    CHECK(sol.objective() == 2);
    CHECK(rep.holds());
    CHECK(check_feasibility(sol).ok());
  }

  SECTION("color-interrupting schedule violates the order constraints") {
    auto [sol, rep] = schedule_to_solution<Rational>(inst, make_schedule(inst, {1, 2, 3, 4}));
    // the time-indexed objective does not see the interrupted runs
    CHECK(sol.objective() == 2);
    CHECK(schedule_cost(inst, make_schedule(inst, {1, 2, 3, 4})) == 4);
    REQUIRE(rep.violated.size() == 2);
    CHECK(rep.violated[0] == std::pair<int, int>{1, 4});
    CHECK(rep.violated[1] == std::pair<int, int>{2, 5});
  }

  SECTION("single item instance") {
    Instance single(1, std::vector<std::string>{"A"});
    auto [sol, rep] = schedule_to_solution<Rational>(single, make_schedule(single, {1}));
    CHECK(sol.value(1, 2) == 1);
    CHECK(sol.objective() == 1);
    CHECK(rep.holds());
  }
}

TEST_CASE("random valid schedules: cost properties") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 1 + static_cast<int>(rng() % 3);
    int n = 1 + static_cast<int>(rng() % 8);
    int colors = 1 + static_cast<int>(rng() % 3);
    std::vector<ColorId> ids(static_cast<size_t>(n));
    for (auto& c : ids) c = static_cast<ColorId>(rng() % static_cast<unsigned>(colors));
    Instance inst(k, ids);

    // random valid schedule: pick any available item per slot
    Schedule s(k, n);
    std::vector<int> avail;
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    for (int j = inst.first_slot(); j <= inst.last_slot(); ++j) {
      avail.clear();
      for (int i = 1; i <= std::min(j, n); ++i)
        if (!used[static_cast<size_t>(i)]) avail.push_back(i);
      int pick = avail[rng() % avail.size()];
      used[static_cast<size_t>(pick)] = 1;
      s.assign(j, pick);
    }
    REQUIRE_FALSE(validate_schedule(inst, s));

    int cost = schedule_cost(inst, s);
    CHECK(cost >= inst.num_colors());

    auto [sol, rep] = schedule_to_solution<Rational>(inst, s);
    CHECK(sol.objective() == schedule_objective_formula(inst, s));
    if (rep.holds()) CHECK(cost == schedule_objective_formula(inst, s));
  }
}
