#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rbm/instance.hpp"

namespace rbm {

struct OracleBudgetExceeded : std::runtime_error {
  OracleBudgetExceeded() : std::runtime_error("oracle memo budget exceeded") {}
};

/// Exact optimal RBM cost by memoized search over (next slot, previous
/// output color, per-color buffered counts). Same-color items are
/// interchangeable for the completion cost, which is what makes the
/// per-color count key sound; the acceptance suite cross-checks this
/// against the raw per-item search.
class ExactOracle {
 public:
  explicit ExactOracle(const Instance& inst, std::size_t memo_budget = 10'000'000)
      : inst_(inst), budget_(memo_budget) {
    num_colors_ = 0;
    for (int i = 1; i <= inst.n(); ++i)
      num_colors_ = std::max(num_colors_, static_cast<int>(inst.color(i)) + 1);
    count_bits_ = 1;
    while ((1 << count_bits_) < inst.k() + 2) ++count_bits_;
    slot_bits_ = 1;
    while ((1 << slot_bits_) < inst.k() + inst.n() + 2) ++slot_bits_;
    color_bits_ = 1;
    while ((1 << color_bits_) < num_colors_ + 1) ++color_bits_;
    if (slot_bits_ + color_bits_ + num_colors_ * count_bits_ > 62)
      throw std::invalid_argument("instance too large for the exact oracle");
  }

  struct Result {
    int cost = 0;
    Schedule witness;
  };

  Result optimal() {
    std::vector<int> counts(static_cast<size_t>(num_colors_), 0);
    for (int i = 1; i <= std::min(inst_.first_slot(), inst_.n()); ++i)
      ++counts[static_cast<size_t>(inst_.color(i))];
    int best = search(inst_.first_slot(), -1, counts);

    Result res;
    res.cost = best;
    res.witness = reconstruct();
    return res;
  }

 private:
  std::uint64_t key(int slot, int prev, const std::vector<int>& counts) const {
    std::uint64_t k = static_cast<std::uint64_t>(slot);
    k = (k << color_bits_) | static_cast<std::uint64_t>(prev + 1);
    for (int c = 0; c < num_colors_; ++c)
      k = (k << count_bits_) | static_cast<std::uint64_t>(counts[static_cast<size_t>(c)]);
    return k;
  }

  // Minimum number of runs needed to finish from this state. `counts`
  // holds the buffer composition before filling `slot`.
  int search(int slot, int prev, std::vector<int>& counts) {
    if (slot > inst_.last_slot()) return 0;
    std::uint64_t k = key(slot, prev, counts);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    if (memo_.size() >= budget_) throw OracleBudgetExceeded();

    int best = -1;
    int arrival = slot + 1 <= inst_.last_slot() ? next_arrival(slot + 1) : -1;
    for (int c = 0; c < num_colors_; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) continue;
      --counts[static_cast<size_t>(c)];
      if (arrival >= 0) ++counts[static_cast<size_t>(arrival)];
      int sub = search(slot + 1, c, counts) + (c == prev ? 0 : 1);
      if (arrival >= 0) --counts[static_cast<size_t>(arrival)];
      ++counts[static_cast<size_t>(c)];
      if (best < 0 || sub < best) best = sub;
    }
    memo_.emplace(k, best);
    return best;
  }

  // Color of the item that becomes available when filling `slot`, -1 past
  // the input.
  int next_arrival(int slot) const {
    return slot <= inst_.n() ? static_cast<int>(inst_.color(slot)) : -1;
  }

  // Follow the memoized values, emitting the earliest buffered item of the
  // chosen color (ties on cost: smallest color id).
  Schedule reconstruct() {
    Schedule sched(inst_.k(), inst_.n());
    std::vector<std::deque<int>> buffered(static_cast<size_t>(num_colors_));
    for (int i = 1; i <= std::min(inst_.first_slot(), inst_.n()); ++i)
      buffered[static_cast<size_t>(inst_.color(i))].push_back(i);
    std::vector<int> counts(static_cast<size_t>(num_colors_), 0);
    for (int c = 0; c < num_colors_; ++c)
      counts[static_cast<size_t>(c)] = static_cast<int>(buffered[static_cast<size_t>(c)].size());

    int prev = -1;
    for (int slot = inst_.first_slot(); slot <= inst_.last_slot(); ++slot) {
      int arrival = slot + 1 <= inst_.last_slot() ? next_arrival(slot + 1) : -1;
      int best_c = -1, best_cost = -1;
      for (int c = 0; c < num_colors_; ++c) {
        if (counts[static_cast<size_t>(c)] == 0) continue;
        --counts[static_cast<size_t>(c)];
        if (arrival >= 0) ++counts[static_cast<size_t>(arrival)];
        int sub = search(slot + 1, c, counts) + (c == prev ? 0 : 1);
        if (arrival >= 0) --counts[static_cast<size_t>(arrival)];
        ++counts[static_cast<size_t>(c)];
        if (best_c < 0 || sub < best_cost) {
          best_c = c;
          best_cost = sub;
        }
      }
      sched.assign(slot, buffered[static_cast<size_t>(best_c)].front());
      buffered[static_cast<size_t>(best_c)].pop_front();
      --counts[static_cast<size_t>(best_c)];
      if (arrival >= 0) {
        buffered[static_cast<size_t>(arrival)].push_back(slot + 1);
        ++counts[static_cast<size_t>(arrival)];
      }
      prev = best_c;
    }
    return sched;
  }

  const Instance& inst_;
  std::size_t budget_;
  int num_colors_ = 0;
  int count_bits_ = 0, slot_bits_ = 0, color_bits_ = 0;
  std::unordered_map<std::uint64_t, int> memo_;
};

inline std::pair<int, Schedule> optimal_cost(const Instance& inst,
                                             std::size_t memo_budget = 10'000'000) {
  ExactOracle oracle(inst, memo_budget);
  auto res = oracle.optimal();
  return {res.cost, res.witness};
}

/// Raw exhaustive search branching on individual items, no memoization.
/// Exponential; only used to validate the memoized oracle on tiny inputs.
inline int exhaustive_min_cost(const Instance& inst) {
  struct Rec {
    const Instance& inst;
    std::vector<char> removed;
    int run(int slot, int prev) {
      if (slot > inst.last_slot()) return 0;
      int best = -1;
      for (int i = 1; i <= std::min(slot, inst.n()); ++i) {
        if (removed[static_cast<size_t>(i)]) continue;
        removed[static_cast<size_t>(i)] = 1;
        int c = static_cast<int>(inst.color(i));
        int sub = run(slot + 1, c) + (c == prev ? 0 : 1);
        removed[static_cast<size_t>(i)] = 0;
        if (best < 0 || sub < best) best = sub;
      }
      return best;
    }
  };
  Rec rec{inst, std::vector<char>(static_cast<size_t>(inst.n()) + 1, 0)};
  return rec.run(inst.first_slot(), -1);
}

/// Baseline heuristic: always evict the color with the most buffered items
/// (ties: smallest color id), sweeping same-color arrivals into the step.
inline Schedule greedy_largest_block(const Instance& inst) {
  int num_colors = 0;
  for (int i = 1; i <= inst.n(); ++i)
    num_colors = std::max(num_colors, static_cast<int>(inst.color(i)) + 1);
  std::vector<std::deque<int>> buffered(static_cast<size_t>(num_colors));
  for (int i = 1; i <= std::min(inst.first_slot(), inst.n()); ++i)
    buffered[static_cast<size_t>(inst.color(i))].push_back(i);

  Schedule sched(inst.k(), inst.n());
  int slot = inst.first_slot();
  while (slot <= inst.last_slot()) {
    int pick = -1;
    for (int c = 0; c < num_colors; ++c) {
      if (buffered[static_cast<size_t>(c)].empty()) continue;
      if (pick < 0 || buffered[static_cast<size_t>(c)].size() > buffered[static_cast<size_t>(pick)].size())
        pick = c;
    }
    // sweep: keep emitting this color while it remains buffered
    while (!buffered[static_cast<size_t>(pick)].empty()) {
      sched.assign(slot, buffered[static_cast<size_t>(pick)].front());
      buffered[static_cast<size_t>(pick)].pop_front();
      ++slot;
      if (slot <= inst.n())
        buffered[static_cast<size_t>(inst.color(slot))].push_back(slot);
    }
  }
  return sched;
}

}  // namespace rbm
