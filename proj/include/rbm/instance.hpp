#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rbm {

using ColorId = std::int32_t;

/// A reordering-buffer instance: capacity k and the arrival-order color
/// sequence c(1..n). Color tokens are interned to dense ids; items and
/// output slots keep their 1-based / (k+1..k+n)-based indexing so every
/// quantity can be cross-checked against hand calculations.
class Instance {
 public:
  Instance(int k, std::vector<std::string> tokens) : k_(k) {
    if (k < 1) throw std::invalid_argument("buffer capacity must be >= 1");
    if (tokens.empty()) throw std::invalid_argument("color sequence must be nonempty");
    n_ = static_cast<int>(tokens.size());
    color_.resize(n_ + 1);
    std::unordered_map<std::string, ColorId> intern;
    for (int i = 1; i <= n_; ++i) {
      auto [it, fresh] = intern.emplace(tokens[i - 1], static_cast<ColorId>(token_.size()));
      if (fresh) token_.push_back(tokens[i - 1]);
      color_[i] = it->second;
    }
    build_links();
  }

  Instance(int k, const std::vector<ColorId>& ids) : k_(k) {
    if (k < 1) throw std::invalid_argument("buffer capacity must be >= 1");
    if (ids.empty()) throw std::invalid_argument("color sequence must be nonempty");
    n_ = static_cast<int>(ids.size());
    ColorId maxid = *std::max_element(ids.begin(), ids.end());
    if (*std::min_element(ids.begin(), ids.end()) < 0)
      throw std::invalid_argument("negative color id");
    color_.resize(n_ + 1);
    for (int i = 1; i <= n_; ++i) color_[i] = ids[i - 1];
    for (ColorId c = 0; c <= maxid; ++c) token_.push_back("c" + std::to_string(c));
    build_links();
  }

  int k() const { return k_; }
  int n() const { return n_; }
  int num_colors() const { return static_cast<int>(colors_used_); }

  /// First output slot is k+1, last is k+n.
  int first_slot() const { return k_ + 1; }
  int last_slot() const { return k_ + n_; }

  /// Sentinel used for n(i) when i is the last item of its color.
  int next_sentinel() const { return k_ + n_ + 2; }

  ColorId color(int item) const {
    check_item(item);
    return color_[item];
  }
  const std::string& token(ColorId c) const { return token_.at(static_cast<size_t>(c)); }

  /// n(i): smallest i' > i with c(i') = c(i), or k+n+2 when i = last(i).
  int next_same_color(int item) const {
    check_item(item);
    return next_[item];
  }

  /// Previous item of the same color, or 0 if none.
  int prev_same_color(int item) const {
    check_item(item);
    return prev_[item];
  }

  bool is_last(int item) const {
    check_item(item);
    return next_[item] == next_sentinel();
  }

  /// Earliest slot at which item i may be emitted: max(i, k+1).
  int earliest_slot(int item) const {
    check_item(item);
    return std::max(item, k_ + 1);
  }

  const std::vector<std::string>& tokens() const { return token_; }

 private:
  void build_links() {
    next_.assign(n_ + 1, 0);
    prev_.assign(n_ + 1, 0);
    std::unordered_map<ColorId, int> last_seen;
    colors_used_ = 0;
    for (int i = 1; i <= n_; ++i) {
      auto it = last_seen.find(color_[i]);
      if (it == last_seen.end()) {
        ++colors_used_;
      } else {
        next_[it->second] = i;
        prev_[i] = it->second;
      }
      last_seen[color_[i]] = i;
    }
    for (int i = 1; i <= n_; ++i)
      if (next_[i] == 0) next_[i] = next_sentinel();
  }

  void check_item(int item) const {
    if (item < 1 || item > n_) throw std::out_of_range("item index out of range");
  }

  int k_ = 0;
  int n_ = 0;
  size_t colors_used_ = 0;
  std::vector<ColorId> color_;  // 1-based
  std::vector<int> next_;       // 1-based; k+n+2 for last items
  std::vector<int> prev_;       // 1-based; 0 if first of color
  std::vector<std::string> token_;
};

/// Integral eviction schedule: a bijection between output slots k+1..k+n
/// and items 1..n with s(j) <= j.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(int k, int n) : k_(k), item_at_(static_cast<size_t>(n), 0) {}

  int k() const { return k_; }
  int n() const { return static_cast<int>(item_at_.size()); }
  int first_slot() const { return k_ + 1; }
  int last_slot() const { return k_ + n(); }

  void assign(int slot, int item) {
    item_at_.at(index(slot)) = item;
  }
  int item_at(int slot) const { return item_at_.at(index(slot)); }

  /// Slot holding `item`, or 0 if unassigned.
  int slot_of(int item) const {
    for (int j = first_slot(); j <= last_slot(); ++j)
      if (item_at(j) == item) return j;
    return 0;
  }

 private:
  size_t index(int slot) const {
    if (slot < first_slot() || slot > last_slot()) throw std::out_of_range("slot out of range");
    return static_cast<size_t>(slot - first_slot());
  }

  int k_ = 0;
  std::vector<int> item_at_;
};

struct ScheduleViolation {
  int slot = 0;  // first offending slot
  std::string reason;
};

/// ok iff the schedule is a bijection onto 1..n with every item emitted at
/// or after its arrival. Returns the first violated slot otherwise.
inline std::optional<ScheduleViolation> validate_schedule(const Instance& inst,
                                                          const Schedule& s) {
  if (s.k() != inst.k() || s.n() != inst.n())
    return ScheduleViolation{0, "schedule shape does not match instance"};
  std::vector<char> seen(static_cast<size_t>(inst.n()) + 1, 0);
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j) {
    int i = s.item_at(j);
    if (i < 1 || i > inst.n())
      return ScheduleViolation{j, "slot not assigned a valid item"};
    if (i > j)
      return ScheduleViolation{j, "item not yet arrived"};
    if (seen[static_cast<size_t>(i)])
      return ScheduleViolation{j, "not a bijection: item assigned twice"};
    seen[static_cast<size_t>(i)] = 1;
  }
  return std::nullopt;
}

/// Number of maximal same-color runs in the output sequence. This is the
/// RBM cost of the schedule. The time-indexed objective (count of pairs
/// with j <= n(i)-2) agrees with it exactly on schedules that never switch
/// away from a color while the next item of that color is available; see
/// schedule_objective_formula.
inline int schedule_cost(const Instance& inst, const Schedule& s) {
  if (auto v = validate_schedule(inst, s))
    throw std::invalid_argument("invalid schedule: " + v->reason);
  int runs = 0;
  ColorId prev = -1;
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j) {
    ColorId c = inst.color(s.item_at(j));
    if (c != prev) ++runs;
    prev = c;
  }
  return runs;
}

/// |{(i,j) : s(j)=i and j <= n(i)-2}| — the IP objective evaluated at the
/// schedule's 0/1 solution.
inline int schedule_objective_formula(const Instance& inst, const Schedule& s) {
  int cost = 0;
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j) {
    int i = s.item_at(j);
    if (j <= inst.next_same_color(i) - 2) ++cost;
  }
  return cost;
}

}  // namespace rbm
