#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rbm/instance.hpp"
#include "rbm/number.hpp"
#include "rbm/solution.hpp"

namespace rbm {

/// Tuning constants of the rounding procedure. Both presets are validated
/// against the structural requirements delta2 > 2*delta1 and
/// gamma > (1+phi)/(1-delta3) before use.
template <class Num>
struct RoundingConstants {
  Num delta1, delta2, delta3;

  Num gamma() const {
    using T = NumTraits<Num>;
    Num one = T::one();
    return ((delta2 - delta1 - delta1) / (delta2 * (delta2 + delta1))) *
           ((one - delta1 - delta2) / (one - delta1));
  }

  static double phi() { return (1.0 + std::sqrt(5.0)) / 2.0; }

  /// 3/delta1 + 4/delta3 + 4; the guarantee itself is asserted in the
  /// additive form (3/delta1 + 4/delta3) * z + 4.
  Num alpha() const {
    using T = NumTraits<Num>;
    return T::from_int(3) / delta1 + T::from_int(4) / delta3 + T::from_int(4);
  }

  Num cost_bound(const Num& z) const {
    using T = NumTraits<Num>;
    return (T::from_int(3) / delta1 + T::from_int(4) / delta3) * z + T::from_int(4);
  }

  /// The phi comparison is irrational, so it is checked in doubles with a
  /// 1e-9 slack; everything else is exact in rational mode.
  void validate() const {
    using T = NumTraits<Num>;
    if (!(T::is_positive(delta1) && delta1 < T::one()) ||
        !(T::is_positive(delta2) && delta2 < T::one()) ||
        !(T::is_positive(delta3) && delta3 < T::one()))
      throw std::invalid_argument("rounding constants must lie in (0,1)");
    if (!(delta2 > delta1 + delta1))
      throw std::invalid_argument("rounding constants require delta2 > 2*delta1");
    double g = T::to_double(gamma());
    double bound = (1.0 + phi()) / (1.0 - T::to_double(delta3));
    if (!(g > bound - 1e-9))
      throw std::invalid_argument("rounding constants require gamma > (1+phi)/(1-delta3)");
  }

  static RoundingConstants paper() {
    using T = NumTraits<Num>;
    return {T::fraction(1, 40), T::fraction(1, 10), T::fraction(1, 5)};
  }

  static RoundingConstants optimized() {
    using T = NumTraits<Num>;
    return {T::fraction(2763, 100000), T::fraction(11416, 100000), T::fraction(18481, 100000)};
  }
};

enum class StepCase { Case0, Case1, Case2, Case3Scan, Case3Fallback, Case3Window, Case4 };

inline const char* to_string(StepCase c) {
  switch (c) {
    case StepCase::Case0: return "case0";
    case StepCase::Case1: return "case1";
    case StepCase::Case2: return "case2";
    case StepCase::Case3Scan: return "case3scan";
    case StepCase::Case3Fallback: return "case3fallback";
    case StepCase::Case3Window: return "case3window";
    case StepCase::Case4: return "case4";
  }
  return "?";
}

/// Append-only log of one rounding run: every eviction step, every charge,
/// per-phase case sequences and delta snapshots, plus the claim violations
/// observed (empty on a correct run).
template <class Num>
struct RoundingTrace {
  struct Step {
    int phase = 0;
    StepCase kind = StepCase::Case0;
    int slot_from = 0, slot_to = 0;
    ColorId color = -1;
    int items = 0;
  };
  struct Charge {
    int phase = 0;
    int snapshot_slot = 0;
    ColorId block_color = -1;
    Num amount{};
  };
  struct Phase {
    int index = 0;   // 1-based activation index
    int target = 0;
    bool tail = false;  // goal is the end of the sequence, past the last t_q
    std::vector<StepCase> cases;
  };
  struct DeltaSnap {
    int slot = 0;
    Num value{};
  };

  std::vector<Step> steps;
  std::vector<Charge> charges;
  std::vector<Phase> phases;
  std::vector<DeltaSnap> deltas;
  std::vector<std::string> claim_violations;

  long case0_steps = 0;
  long scan_evictions = 0;
  long case_executions[5] = {0, 0, 0, 0, 0};  // executions of cases 0..4
  Num total_charge{};

  bool claims_ok() const { return claim_violations.empty(); }
};

/// t_1 <= ... <= t_Q for Q = floor(z/delta3), followed by the final target
/// k+n. t_q is the first slot where the accumulated costed mass of x
/// reaches q*delta3.
template <class Num>
std::vector<int> compute_targets(const FractionalSolution<Num>& sol, const Num& delta3) {
  using T = NumTraits<Num>;
  const Instance& inst = sol.instance();

  // costed mass per slot: y_{i,j} = x_{i,j} iff n(i) > j+1, i.e. the
  // variable carries objective coefficient 1
  std::vector<Num> mass(static_cast<size_t>(inst.last_slot()) + 1, T::zero());
  for (int i = 1; i <= inst.n(); ++i) {
    int lim = inst.next_same_color(i) - 2;
    for (const auto& [j, v] : sol.row(i))
      if (j <= lim) mass[static_cast<size_t>(j)] += v;
  }

  Num z = sol.objective();
  long q_count = 0;
  if constexpr (T::exact) {
    Rational ratio = z / delta3;
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), ratio.get_num().get_mpz_t(), ratio.get_den().get_mpz_t());
    q_count = q.get_si();
  } else {
    q_count = static_cast<long>(std::floor(T::to_double(z) / T::to_double(delta3)));
  }

  std::vector<int> targets;
  targets.reserve(static_cast<size_t>(q_count) + 1);
  Num acc = T::zero();
  int slot = inst.first_slot() - 1;
  for (long q = 1; q <= q_count; ++q) {
    Num threshold = delta3 * T::from_int(q);
    while (slot < inst.last_slot() && !T::geq(acc, threshold)) {
      ++slot;
      acc += mass[static_cast<size_t>(slot)];
    }
    // float dust can leave the last threshold unreached; the final slot is
    // then the right target
    targets.push_back(T::geq(acc, threshold) ? slot : inst.last_slot());
  }
  targets.push_back(inst.last_slot());
  return targets;
}

struct WindowInfo {
  ColorId color = -1;  // color realizing the maximum, -1 if the window is empty
  int count = 0;       // |I_q^j|
  int t_window = 0;    // t_q^j
};

/// Largest single-color arrival set within [j, t_q] and the earliest slot
/// from which those items can close the phase. Ties go to the color with
/// the earliest arrival inside the window.
inline WindowInfo compute_window(const Instance& inst, int j, int t_q) {
  WindowInfo info;
  std::vector<int> count;
  std::vector<int> first_arrival;
  int hi = std::min(t_q, inst.n());
  for (int i = std::max(j, 1); i <= hi; ++i) {
    auto c = static_cast<size_t>(inst.color(i));
    if (c >= count.size()) {
      count.resize(c + 1, 0);
      first_arrival.resize(c + 1, 0);
    }
    if (count[c] == 0) first_arrival[c] = i;
    ++count[c];
  }
  for (size_t c = 0; c < count.size(); ++c) {
    if (count[c] == 0) continue;
    bool better = count[c] > info.count ||
                  (count[c] == info.count &&
                   first_arrival[c] < first_arrival[static_cast<size_t>(info.color)]);
    if (info.color < 0 || better) {
      info.color = static_cast<ColorId>(c);
      info.count = count[c];
    }
  }
  info.t_window = std::max(j, t_q + 1 - info.count);
  return info;
}

/// One block of the case-3 snapshot, in block order (ascending t(f)).
template <class Num>
struct ScanBlock {
  ColorId color = -1;
  int size = 0;
  Num d_sum{};  // sum of d_i over the block's items
};

/// Planned case-3 evictions, in execution order. `charged` lists block
/// indices whose items pay for the eviction.
template <class Num>
struct ScanPlan {
  struct Eviction {
    int block = 0;
    std::vector<int> charged;
    Num trigger{};  // the d-hat sum that justified the eviction (>= delta1)
  };
  std::vector<Eviction> evictions;
};

/// The s_p / r_p / r'_p scan over the snapshot blocks. Pure bookkeeping on
/// snapshot quantities; the caller executes the plan afterwards. r_p is the
/// minimal index satisfying the delta2 budget (the sum grows as the range
/// widens, so minimality is the nontrivial choice).
template <class Num>
ScanPlan<Num> case3_scan_plan(const std::vector<ScanBlock<Num>>& blocks, const Num& delta1,
                              const Num& delta2) {
  using T = NumTraits<Num>;
  ScanPlan<Num> plan;
  int m = static_cast<int>(blocks.size());
  if (m == 0) return plan;

  auto dsum = [&](int u) -> const Num& { return blocks[static_cast<size_t>(u - 1)].d_sum; };
  auto dhat = [&](int u) -> Num {
    return dsum(u) / T::from_int(blocks[static_cast<size_t>(u - 1)].size);
  };

  int s = m;
  for (;;) {
    Num budget = delta2 * T::from_int(blocks[static_cast<size_t>(s - 1)].size);
    int r = s;
    Num span = T::zero();  // sum over [r, s-1] of block d-sums
    while (r > 1 && T::leq(span + dsum(r - 1), budget)) {
      span += dsum(r - 1);
      --r;
    }
    Num hat_total = T::zero();
    for (int u = r; u <= s; ++u) hat_total += dhat(u);
    if (T::geq(hat_total, delta1)) {
      // largest r' in [r, s] keeping the d-hat suffix above delta1
      int rp = r;
      Num suffix = hat_total;
      while (rp < s && T::geq(suffix - dhat(rp), delta1)) {
        suffix -= dhat(rp);
        ++rp;
      }
      typename ScanPlan<Num>::Eviction ev;
      ev.block = s;
      ev.trigger = suffix;
      for (int u = rp; u <= s - 1; ++u) ev.charged.push_back(u);
      plan.evictions.push_back(std::move(ev));
      if (rp > 1)
        s = rp - 1;
      else
        break;
    } else if (r > 1) {
      // no eviction here; restart from the largest block below the budget
      // window (ties: smallest index)
      int pick = r - 1;
      for (int u = r - 1; u <= s - 1; ++u)
        if (blocks[static_cast<size_t>(u - 1)].size > blocks[static_cast<size_t>(pick - 1)].size)
          pick = u;
      s = pick;
    } else {
      break;
    }
  }
  return plan;
}

/// Executes the phase-based rounding of a feasible fractional solution into
/// an integral schedule, recording the trace that the analysis claims are
/// asserted against.
template <class Num>
class RoundingEngine {
  using T = NumTraits<Num>;

 public:
  RoundingEngine(const FractionalSolution<Num>& sol, const RoundingConstants<Num>& consts)
      : sol_(sol), consts_(consts), inst_(sol.instance()), weights_(sol) {
    consts.validate();
    auto rep = check_feasibility(sol);
    if (!rep.ok())
      throw std::invalid_argument("rounding requires a feasible solution: " +
                                  rep.violations.front());
  }

  /// Raw eviction primitive, also usable standalone: sweeps the color out
  /// of the buffer and returns the removed items in slot order.
  std::vector<int> evict_color(ColorId c) {
    if (!initialized_) init_state();
    return evict(c, StepCase::Case0);
  }

  int next_slot() {
    if (!initialized_) init_state();
    return next_slot_;
  }

  std::pair<Schedule, RoundingTrace<Num>> run() {
    init_state();
    z_ = sol_.objective();
    targets_ = compute_targets(sol_, consts_.delta3);
    const int final_target = inst_.last_slot();
    size_t next_target = 0;
    const size_t original_targets = targets_.size() - 1;  // last entry is k+n

    while (completed() < final_target) {
      while (next_target < original_targets &&
             targets_[next_target] <= completed())
        ++next_target;
      bool tail = next_target >= original_targets;
      int target = tail ? final_target : targets_[next_target];

      trace_.phases.push_back({static_cast<int>(trace_.phases.size()) + 1, target, tail, {}});
      run_phase(target);
    }

    finish_claims();
    return {std::move(sched_), std::move(trace_)};
  }

 private:
  int completed() const { return next_slot_ - 1; }

  void init_state() {
    initialized_ = true;
    trace_ = RoundingTrace<Num>{};
    sched_ = Schedule(inst_.k(), inst_.n());
    next_slot_ = inst_.first_slot();
    removed_.assign(static_cast<size_t>(inst_.n()) + 1, 0);
    tau_.assign(static_cast<size_t>(inst_.n()) + 1, 0);
    drop_.assign(static_cast<size_t>(inst_.n()) + 1, 0);
    int num_colors = 0;
    for (int i = 1; i <= inst_.n(); ++i) {
      tau_[static_cast<size_t>(i)] = i - 1;  // never charged yet
      drop_[static_cast<size_t>(i)] = weights_.drop_time(i, consts_.delta1);
      num_colors = std::max(num_colors, static_cast<int>(inst_.color(i)) + 1);
    }
    buffered_.assign(static_cast<size_t>(num_colors), {});
    for (int i = 1; i <= std::min(inst_.first_slot(), inst_.n()); ++i)
      buffered_[static_cast<size_t>(inst_.color(i))].push_back(i);
  }

  void violate(std::string what) { trace_.claim_violations.push_back(std::move(what)); }

  // ---- buffer mechanics ----------------------------------------------

  bool color_buffered(ColorId c) const {
    return c >= 0 && !buffered_[static_cast<size_t>(c)].empty();
  }

  /// Sweeping eviction: emits the color's earliest buffered item, admits
  /// the arrival unlocked by the new slot, and repeats while the color
  /// remains buffered.
  std::vector<int> evict(ColorId c, StepCase kind) {
    std::vector<int> taken;
    if (!color_buffered(c)) return taken;
    auto& q = buffered_[static_cast<size_t>(c)];
    int from = next_slot_;
    while (!q.empty()) {
      int item = q.front();
      q.pop_front();
      sched_.assign(next_slot_, item);
      removed_[static_cast<size_t>(item)] = 1;
      taken.push_back(item);
      ++next_slot_;
      if (next_slot_ <= inst_.n())
        buffered_[static_cast<size_t>(inst_.color(next_slot_))].push_back(next_slot_);
    }
    trace_.steps.push_back(
        {current_phase(), kind, from, next_slot_ - 1, c, static_cast<int>(taken.size())});
    if (!trace_.phases.empty()) trace_.phases.back().cases.push_back(kind);
    return taken;
  }

  /// Final slot reached if we evicted color c now, without touching state.
  int simulate_evict_reach(ColorId c) const {
    int cur = next_slot_;
    int cnt = static_cast<int>(buffered_[static_cast<size_t>(c)].size());
    while (cnt > 0) {
      --cnt;
      ++cur;
      if (cur <= inst_.n() && inst_.color(cur) == c) ++cnt;
    }
    return cur - 1;
  }

  int current_phase() const {
    return trace_.phases.empty() ? 0 : trace_.phases.back().index;
  }

  // ---- snapshot quantities --------------------------------------------

  Num delta_at_snapshot(int s) {
    Num from_removed = T::zero();
    for (int i = 1; i <= std::min(s, inst_.n()); ++i)
      if (removed_[static_cast<size_t>(i)]) from_removed += weights_.weight(i, s);
    Num from_buffer = T::zero();
    for (const auto& q : buffered_)
      for (int i : q) from_buffer += T::one() - weights_.weight(i, s);
    if (!(T::leq(from_removed, from_buffer) && T::geq(from_removed, from_buffer)))
      violate("delta formulas disagree at slot " + std::to_string(s) + ": " +
              T::to_string(from_removed) + " vs " + T::to_string(from_buffer));
    return from_removed;
  }

  struct BlockRef {
    ColorId color;
    int first_item;
    int drop;  // t(f)
    int size;
  };

  /// Buffer partitioned into blocks, ordered by t(f) with ties on the
  /// earliest item.
  std::vector<BlockRef> snapshot_blocks() const {
    std::vector<BlockRef> blocks;
    for (size_t c = 0; c < buffered_.size(); ++c) {
      const auto& q = buffered_[c];
      if (q.empty()) continue;
      blocks.push_back({static_cast<ColorId>(c), q.front(), drop_[static_cast<size_t>(q.front())],
                        static_cast<int>(q.size())});
    }
    std::sort(blocks.begin(), blocks.end(), [](const BlockRef& a, const BlockRef& b) {
      if (a.drop != b.drop) return a.drop < b.drop;
      return a.first_item < b.first_item;
    });
    return blocks;
  }

  Num item_d(int item, int s) const {
    // d_i = w_i^{tau_i} - w_i^s; tau_i = i-1 until the first charge
    int tau = tau_[static_cast<size_t>(item)];
    Num w_tau = tau <= item - 1 ? T::one() : weights_.weight(item, tau);
    return w_tau - weights_.weight(item, s);
  }

  // ---- the per-phase procedure ----------------------------------------

  void run_phase(int target) {
    int bundle_steps = 0;  // case 1 + case 2 + case 4 + last two of case 3
    bool after_case4 = false;

    while (completed() < target) {
      // case 0: drain blocks whose earliest weight already dropped
      bool any0 = true;
      while (any0 && completed() < target) {
        any0 = false;
        int snapshot = completed();
        for (const auto& q : buffered_) {
          for (int i : q) {
            if (drop_[static_cast<size_t>(i)] <= snapshot) {
              evict(inst_.color(i), StepCase::Case0);
              ++trace_.case0_steps;
              ++trace_.case_executions[0];
              any0 = true;
              break;
            }
          }
          if (any0) break;
        }
      }
      if (completed() >= target) return;

      const int j = next_slot_;
      const int snapshot = j - 1;
      const Num delta = delta_at_snapshot(snapshot);
      trace_.deltas.push_back({snapshot, delta});

      // case 1: a single eviction reaches the target
      ColorId direct = -1;
      for (size_t c = 0; c < buffered_.size(); ++c)
        if (!buffered_[c].empty() && simulate_evict_reach(static_cast<ColorId>(c)) >= target) {
          direct = static_cast<ColorId>(c);
          break;
        }
      if (direct >= 0) {
        ++trace_.case_executions[1];
        evict(direct, StepCase::Case1);
        ++bundle_steps;
        if (after_case4) after_case4 = false;
        if (completed() < target) violate("case 1 did not reach its target");
        break;
      }

      WindowInfo win = compute_window(inst_, j, target);
      const int need = win.t_window - j;

      // case 2: the needed items sit in at most two blocks
      auto blocks = snapshot_blocks();
      int b1 = -1, b2 = -1;
      for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
        if (b1 < 0 || blocks[static_cast<size_t>(b)].size > blocks[static_cast<size_t>(b1)].size) {
          b2 = b1;
          b1 = b;
        } else if (b2 < 0 ||
                   blocks[static_cast<size_t>(b)].size > blocks[static_cast<size_t>(b2)].size) {
          b2 = b;
        }
      }
      long two_largest = (b1 >= 0 ? blocks[static_cast<size_t>(b1)].size : 0) +
                         (b2 >= 0 ? blocks[static_cast<size_t>(b2)].size : 0);
      if (two_largest >= need) {
        ++trace_.case_executions[2];
        int removed_first =
            static_cast<int>(evict(blocks[static_cast<size_t>(b1)].color, StepCase::Case2).size());
        ++bundle_steps;
        if (completed() < target && removed_first < need && b2 >= 0) {
          evict(blocks[static_cast<size_t>(b2)].color, StepCase::Case2);
          ++bundle_steps;
        }
        if (completed() < target && win.color >= 0) {
          evict(win.color, StepCase::Case2);
          ++bundle_steps;
        }
        if (after_case4) after_case4 = false;
        if (completed() < target) violate("claim 5: case 2 did not end the phase");
        break;
      }

      // case 3: enough divergence between the two buffers to charge
      if (T::geq(delta * consts_.gamma(), T::from_int(need))) {
        ++trace_.case_executions[3];
        run_case3(blocks, j, target, win, need, bundle_steps);
        if (after_case4) after_case4 = false;
        if (completed() < target) violate("claim 7: case 3 did not end the phase");
        break;
      }

      // case 4: evict the largest block and rerun the procedure once
      ++trace_.case_executions[4];
      if (after_case4) violate("claim 8: case 4 reached twice in one phase");
      after_case4 = true;
      evict(blocks[static_cast<size_t>(b1)].color, StepCase::Case4);
      ++bundle_steps;
    }

    if (bundle_steps > 4)
      violate("phase step bundle exceeded 4 (got " + std::to_string(bundle_steps) + ")");
  }

  void run_case3(const std::vector<BlockRef>& blocks, int j, int target, const WindowInfo& win,
                 int need, int& bundle_steps) {
    const int snapshot = j - 1;

    // snapshot d-values, then the whole plan, then execution
    std::vector<ScanBlock<Num>> scan_blocks;
    scan_blocks.reserve(blocks.size());
    std::vector<std::vector<int>> block_items(blocks.size());
    for (size_t b = 0; b < blocks.size(); ++b) {
      const auto& q = buffered_[static_cast<size_t>(blocks[b].color)];
      block_items[b].assign(q.begin(), q.end());
      Num dsum = T::zero();
      for (int i : block_items[b]) dsum += item_d(i, snapshot);
      scan_blocks.push_back({blocks[b].color, blocks[b].size, dsum});
    }
    auto plan = case3_scan_plan(scan_blocks, consts_.delta1, consts_.delta2);

    // charges are snapshot-time bookkeeping: record and stamp tau now
    std::vector<char> evicted(blocks.size(), 0);
    for (const auto& ev : plan.evictions) {
      evicted[static_cast<size_t>(ev.block - 1)] = 1;
      if (!T::geq(ev.trigger, consts_.delta1))
        violate("case 3 eviction without a delta1-backed charge");
      for (int u : ev.charged) {
        const auto& items = block_items[static_cast<size_t>(u - 1)];
        Num dhat = scan_blocks[static_cast<size_t>(u - 1)].d_sum /
                   T::from_int(scan_blocks[static_cast<size_t>(u - 1)].size);
        trace_.charges.push_back(
            {current_phase(), snapshot, scan_blocks[static_cast<size_t>(u - 1)].color, dhat});
        trace_.total_charge += dhat;
        for (int i : items) tau_[static_cast<size_t>(i)] = snapshot;
      }
    }

    long snapshot_removed = 0;
    for (const auto& ev : plan.evictions) {
      snapshot_removed += scan_blocks[static_cast<size_t>(ev.block - 1)].size;
      evict(scan_blocks[static_cast<size_t>(ev.block - 1)].color, StepCase::Case3Scan);
      ++trace_.scan_evictions;
    }

    if (snapshot_removed < need) {
      // fallback: largest snapshot block that survived the scan
      int pick = -1;
      for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
        if (evicted[static_cast<size_t>(b)]) continue;
        if (pick < 0 || blocks[static_cast<size_t>(b)].size > blocks[static_cast<size_t>(pick)].size)
          pick = b;
      }
      if (pick >= 0) {
        snapshot_removed += blocks[static_cast<size_t>(pick)].size;
        evict(blocks[static_cast<size_t>(pick)].color, StepCase::Case3Fallback);
        ++bundle_steps;
      }
    }
    if (snapshot_removed < need)
      violate("claim 6: scan+fallback removed " + std::to_string(snapshot_removed) +
              " < " + std::to_string(need) + " snapshot items");

    if (completed() < target && win.color >= 0 && color_buffered(win.color)) {
      evict(win.color, StepCase::Case3Window);
      ++bundle_steps;
    }
  }

  void finish_claims() {
    // schedule validity
    if (auto v = validate_schedule(inst_, sched_)) {
      violate("output schedule invalid: " + v->reason);
      return;  // the remaining accounting assumes a complete schedule
    }

    // steps tile the slot range exactly
    int expect = inst_.first_slot();
    for (const auto& st : trace_.steps) {
      if (st.items == 0) continue;
      if (st.slot_from != expect)
        violate("trace steps do not tile the slot range at slot " + std::to_string(st.slot_from));
      expect = st.slot_to + 1;
    }
    if (expect != inst_.last_slot() + 1) violate("trace steps do not cover the slot range");

    // lemma: total charge <= 2 z(x)
    if (!T::leq(trace_.total_charge, z_ + z_))
      violate("lemma 9: total charge " + T::to_string(trace_.total_charge) + " > 2z");

    // case-0 steps <= z/delta1; delta1-backed scan evictions <= 2z/delta1
    if (!T::leq(T::from_int(trace_.case0_steps) * consts_.delta1, z_))
      violate("case-0 steps exceed z/delta1");
    if (!T::leq(T::from_int(trace_.scan_evictions) * consts_.delta1, z_ + z_))
      violate("scan evictions exceed 2z/delta1");

    // phase count <= ceil(z/delta3)
    long phase_cap = 0;
    if constexpr (T::exact) {
      Rational ratio = z_ / consts_.delta3;
      mpz_class q;
      mpz_cdiv_q(q.get_mpz_t(), ratio.get_num().get_mpz_t(), ratio.get_den().get_mpz_t());
      phase_cap = q.get_si();
    } else {
      phase_cap = static_cast<long>(std::ceil(T::to_double(z_) / T::to_double(consts_.delta3) -
                                              NumTraits<double>::cmp_eps));
    }
    if (static_cast<long>(trace_.phases.size()) > phase_cap)
      violate("phase count " + std::to_string(trace_.phases.size()) + " exceeds ceil(z/delta3) = " +
              std::to_string(phase_cap));

    // cost guarantee in additive form
    Num cost = T::from_int(schedule_cost(inst_, sched_));
    if (!T::leq(cost, consts_.cost_bound(z_)))
      violate("cost " + T::to_string(cost) + " exceeds (3/d1+4/d3) z + 4 = " +
              T::to_string(consts_.cost_bound(z_)));
  }

  const FractionalSolution<Num>& sol_;
  RoundingConstants<Num> consts_;
  const Instance& inst_;
  WeightView<Num> weights_;

  Schedule sched_;
  RoundingTrace<Num> trace_;
  std::vector<int> targets_;
  Num z_{};
  bool initialized_ = false;
  int next_slot_ = 0;
  std::vector<char> removed_;
  std::vector<int> tau_;
  std::vector<int> drop_;
  std::vector<std::deque<int>> buffered_;
};

/// Rounds a feasible fractional solution into a valid schedule; the trace
/// carries the full accounting, including any claim violations.
template <class Num>
std::pair<Schedule, RoundingTrace<Num>> round_solution(const FractionalSolution<Num>& sol,
                                                       const RoundingConstants<Num>& consts) {
  return RoundingEngine<Num>(sol, consts).run();
}

}  // namespace rbm
