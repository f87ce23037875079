#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "rbm/instance.hpp"
#include "rbm/number.hpp"

namespace rbm {

/// Fractional (or 0/1) solution of the time-indexed relaxation: sparse
/// x_{i,j} keyed by item with sorted slot lists. Out-of-range x terms read
/// as 0 everywhere.
template <class Num>
class FractionalSolution {
  using T = NumTraits<Num>;

 public:
  explicit FractionalSolution(const Instance& inst)
      : inst_(&inst), x_(static_cast<size_t>(inst.n()) + 1) {}

  const Instance& instance() const { return *inst_; }

  /// Inserts or overwrites x_{i,j}. Slots must lie in [max(i,k+1), k+n].
  void set(int item, int slot, Num value) {
    if (item < 1 || item > inst_->n()) throw std::out_of_range("item out of range");
    if (slot < inst_->earliest_slot(item) || slot > inst_->last_slot())
      throw std::out_of_range("slot outside variable range");
    auto& row = x_[static_cast<size_t>(item)];
    auto it = std::lower_bound(row.begin(), row.end(), slot,
                               [](const auto& e, int s) { return e.first < s; });
    if (it != row.end() && it->first == slot) {
      if (T::piv_zero(value))
        row.erase(it);
      else
        it->second = std::move(value);
    } else if (!T::piv_zero(value)) {
      row.insert(it, {slot, std::move(value)});
    }
  }

  Num value(int item, int slot) const {
    if (item < 1 || item > inst_->n()) return T::zero();
    const auto& row = x_[static_cast<size_t>(item)];
    auto it = std::lower_bound(row.begin(), row.end(), slot,
                               [](const auto& e, int s) { return e.first < s; });
    if (it != row.end() && it->first == slot) return it->second;
    return T::zero();
  }

  const std::vector<std::pair<int, Num>>& row(int item) const {
    return x_.at(static_cast<size_t>(item));
  }

  size_t nonzeros() const {
    size_t c = 0;
    for (const auto& row : x_) c += row.size();
    return c;
  }

  /// Objective z(x): total mass on costed variables (j <= n(i)-2).
  Num objective() const {
    Num z = T::zero();
    for (int i = 1; i <= inst_->n(); ++i) {
      int lim = inst_->next_same_color(i) - 2;
      for (const auto& [j, v] : x_[static_cast<size_t>(i)])
        if (j <= lim) z += v;
    }
    return z;
  }

 private:
  const Instance* inst_;
  std::vector<std::vector<std::pair<int, Num>>> x_;  // 1-based by item
};

/// Weights w_i^j = 1 - sum_{j' <= j} x_{i,j'}, with w_i^{i-1} = 1.
/// Prefix sums are materialized once per item.
template <class Num>
class WeightView {
  using T = NumTraits<Num>;

 public:
  explicit WeightView(const FractionalSolution<Num>& sol) : sol_(&sol) {
    const Instance& inst = sol.instance();
    prefix_.resize(static_cast<size_t>(inst.n()) + 1);
    for (int i = 1; i <= inst.n(); ++i) {
      const auto& row = sol.row(i);
      auto& pre = prefix_[static_cast<size_t>(i)];
      pre.reserve(row.size());
      Num acc = T::zero();
      for (const auto& [j, v] : row) {
        acc += v;
        pre.push_back({j, acc});
      }
    }
  }

  /// Defined for j >= i-1 (earlier j would predate the item; callers never
  /// need it and get weight 1).
  Num weight(int item, int slot) const {
    const auto& pre = prefix_[static_cast<size_t>(item)];
    auto it = std::upper_bound(pre.begin(), pre.end(), slot,
                               [](int s, const auto& e) { return s < e.first; });
    if (it == pre.begin()) return T::one();
    return T::one() - std::prev(it)->second;
  }

  /// t(i) = min{t : w_i^t <= 1 - delta1}, or k+n+1 when the weight never
  /// drops that far. Equivalent to the first slot where the removed mass
  /// reaches delta1; float mode biases toward satisfying the inequality.
  int drop_time(int item, const Num& delta1) const {
    const auto& pre = prefix_[static_cast<size_t>(item)];
    for (const auto& [j, acc] : pre)
      if (T::geq(acc, delta1)) return j;
    return sol_->instance().last_slot() + 1;
  }

  const FractionalSolution<Num>& solution() const { return *sol_; }

 private:
  const FractionalSolution<Num>* sol_;
  std::vector<std::vector<std::pair<int, Num>>> prefix_;  // (slot, cumulative x)
};

struct FeasibilityReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Validates constraints (1),(2),(3),(5) of the relaxation plus the derived
/// capacity identity and weight-monotonicity sanity checks. Exact in
/// rational mode.
template <class Num>
FeasibilityReport check_feasibility(const FractionalSolution<Num>& sol) {
  using T = NumTraits<Num>;
  const Instance& inst = sol.instance();
  FeasibilityReport rep;
  auto flag = [&rep](std::string msg) {
    if (rep.violations.size() < 64) rep.violations.push_back(std::move(msg));
  };

  // (5) nonnegativity and variable ranges
  for (int i = 1; i <= inst.n(); ++i)
    for (const auto& [j, v] : sol.row(i)) {
      if (!T::geq(v, T::zero()))
        flag("(5) x_{" + std::to_string(i) + "," + std::to_string(j) + "} negative");
      if (j < inst.earliest_slot(i) || j > inst.last_slot())
        flag("x_{" + std::to_string(i) + "," + std::to_string(j) + "} out of range");
    }

  // (1) each item fully removed
  for (int i = 1; i <= inst.n(); ++i) {
    Num s = T::zero();
    for (const auto& [j, v] : sol.row(i)) s += v;
    if (!(T::leq(s, T::one()) && T::geq(s, T::one())))
      flag("(1) sum over slots for item " + std::to_string(i) + " is " + T::to_string(s));
  }

  // (2) each slot filled exactly once
  std::vector<Num> slot_sum(static_cast<size_t>(inst.last_slot()) + 1, T::zero());
  for (int i = 1; i <= inst.n(); ++i)
    for (const auto& [j, v] : sol.row(i)) slot_sum[static_cast<size_t>(j)] += v;
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j)
    if (!(T::leq(slot_sum[static_cast<size_t>(j)], T::one()) &&
          T::geq(slot_sum[static_cast<size_t>(j)], T::one())))
      flag("(2) sum over items for slot " + std::to_string(j) + " is " +
           T::to_string(slot_sum[static_cast<size_t>(j)]));

  // (3) no color switching while the chain continues; the j = k+n+1 row
  // reads -x_{i,k+n} >= 0 because the x_{n(i),j} term is out of range
  for (int i = 1; i <= inst.n(); ++i) {
    if (inst.is_last(i)) continue;
    int ni = inst.next_same_color(i);
    int jlo = std::max(ni, inst.earliest_slot(i) + 1);
    for (int j = jlo; j <= inst.last_slot() + 1; ++j) {
      Num lhs = sol.value(ni, j) - sol.value(i, j - 1);
      if (!T::geq(lhs, T::zero()))
        flag("(3) x_{" + std::to_string(ni) + "," + std::to_string(j) + "} - x_{" +
             std::to_string(i) + "," + std::to_string(j - 1) + "} = " + T::to_string(lhs));
    }
  }

  // capacity identity at every slot (k for j <= n, k+n-j after)
  WeightView<Num> w(sol);
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j) {
    Num total = T::zero();
    for (int i = 1; i <= std::min(j, inst.n()); ++i) total += w.weight(i, j);
    Num expect = T::from_int(j <= inst.n() ? inst.k() : inst.k() + inst.n() - j);
    if (!(T::leq(total, expect) && T::geq(total, expect)))
      flag("capacity at slot " + std::to_string(j) + " is " + T::to_string(total) +
           ", expected " + T::to_string(expect));
  }

  // weight monotonicity in the chain: w_i^j <= w_{n(i)}^j for j >= n(i)-1
  for (int i = 1; i <= inst.n(); ++i) {
    if (inst.is_last(i)) continue;
    int ni = inst.next_same_color(i);
    for (int j = ni - 1; j <= inst.last_slot(); ++j)
      if (!T::leq(w.weight(i, j), w.weight(ni, j)))
        flag("w_" + std::to_string(i) + "^" + std::to_string(j) + " > w_" +
             std::to_string(ni) + "^" + std::to_string(j));
  }

  return rep;
}

struct Constraint3Report {
  std::vector<std::pair<int, int>> violated;  // (i, j) with x_{n(i),j} < x_{i,j-1}
  bool holds() const { return violated.empty(); }
};

/// 0/1 solution corresponding to a valid schedule. Constraints (1),(2),(5)
/// hold by construction; the returned report tells whether (3) holds, i.e.
/// whether the schedule never abandons a color whose next item is already
/// available.
template <class Num>
std::pair<FractionalSolution<Num>, Constraint3Report> schedule_to_solution(
    const Instance& inst, const Schedule& s) {
  if (auto v = validate_schedule(inst, s))
    throw std::invalid_argument("invalid schedule: " + v->reason);
  FractionalSolution<Num> sol(inst);
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j)
    sol.set(s.item_at(j), j, NumTraits<Num>::one());
  Constraint3Report rep;
  for (int i = 1; i <= inst.n(); ++i) {
    if (inst.is_last(i)) continue;
    int ni = inst.next_same_color(i);
    int jlo = std::max(ni, inst.earliest_slot(i) + 1);
    for (int j = jlo; j <= inst.last_slot() + 1; ++j)
      if (NumTraits<Num>::is_negative(sol.value(ni, j) - sol.value(i, j - 1)))
        rep.violated.push_back({i, j});
  }
  return {std::move(sol), std::move(rep)};
}

}  // namespace rbm
