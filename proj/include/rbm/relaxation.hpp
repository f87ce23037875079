#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rbm/instance.hpp"
#include "rbm/lp.hpp"
#include "rbm/number.hpp"
#include "rbm/revised_simplex.hpp"
#include "rbm/solution.hpp"

namespace rbm {

/// Time-indexed LP of an instance together with the variable map
/// x_{i,j} <-> column index. Variables are ordered by (item, slot); rows
/// are the n item equalities, then the n slot equalities, then the order
/// rows by (item, slot).
template <class Num>
struct RelaxationLp {
  LinearProgram<Num> lp;
  std::vector<int> var_offset;               // per item, index of its first variable
  std::vector<std::pair<int, int>> var_ij;   // column -> (item, slot)
  int order_rows = 0;

  int var_index(const Instance& inst, int item, int slot) const {
    return var_offset[static_cast<size_t>(item)] + (slot - inst.earliest_slot(item));
  }
};

/// Builds the relaxation: objective mass on x_{i,j} with j <= n(i)-2,
/// equalities (1) and (2), and the order rows (3) instantiated only where
/// both variables exist (rows whose missing term would read 0 are either
/// trivial or subsumed by the sign bounds).
template <class Num>
RelaxationLp<Num> build_lp(const Instance& inst) {
  using T = NumTraits<Num>;
  RelaxationLp<Num> out;
  auto& lp = out.lp;
  out.var_offset.assign(static_cast<size_t>(inst.n()) + 1, 0);

  for (int i = 1; i <= inst.n(); ++i) {
    out.var_offset[static_cast<size_t>(i)] = lp.num_vars;
    int costed_limit = inst.next_same_color(i) - 2;
    for (int j = inst.earliest_slot(i); j <= inst.last_slot(); ++j) {
      lp.add_var(j <= costed_limit ? T::one() : T::zero());
      out.var_ij.push_back({i, j});
    }
  }

  // (1) every item leaves the buffer exactly once
  for (int i = 1; i <= inst.n(); ++i) {
    std::vector<std::pair<int, Num>> row;
    for (int j = inst.earliest_slot(i); j <= inst.last_slot(); ++j)
      row.push_back({out.var_index(inst, i, j), T::one()});
    lp.add_row(std::move(row), Relation::Eq, T::one());
  }

  // (2) every slot emits exactly one item
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j) {
    std::vector<std::pair<int, Num>> row;
    for (int i = 1; i <= std::min(j, inst.n()); ++i)
      row.push_back({out.var_index(inst, i, j), T::one()});
    lp.add_row(std::move(row), Relation::Eq, T::one());
  }

  // (3) x_{n(i),j} - x_{i,j-1} >= 0 wherever x_{i,j-1} exists. The row at
  // j = k+n+1 has no x_{n(i),j} term and degenerates to x_{i,k+n} <= 0;
  // dropping it admits optima that break the weight monotonicity the
  // rounding relies on, so it stays.
  for (int i = 1; i <= inst.n(); ++i) {
    if (inst.is_last(i)) continue;
    int ni = inst.next_same_color(i);
    int jlo = std::max(ni, inst.earliest_slot(i) + 1);
    for (int j = jlo; j <= inst.last_slot() + 1; ++j) {
      if (j <= inst.last_slot())
        lp.add_row({{out.var_index(inst, ni, j), T::one()},
                    {out.var_index(inst, i, j - 1), Num(-1)}},
                   Relation::Geq, T::zero());
      else
        lp.add_row({{out.var_index(inst, i, j - 1), Num(-1)}}, Relation::Geq, T::zero());
      ++out.order_rows;
    }
  }
  return out;
}

/// Extracts the sparse solution from raw LP values (drops pivot-level dust).
template <class Num>
FractionalSolution<Num> solution_from_values(const Instance& inst,
                                             const RelaxationLp<Num>& rlp,
                                             const std::vector<Num>& values) {
  using T = NumTraits<Num>;
  FractionalSolution<Num> sol(inst);
  for (size_t v = 0; v < values.size(); ++v) {
    if (T::piv_zero(values[v])) continue;
    auto [i, j] = rlp.var_ij[v];
    sol.set(i, j, values[v]);
  }
  return sol;
}

/// Variable-count threshold above which float solves switch to the sparse
/// revised engine; rational solves always use the dense tableau.
inline constexpr int kDenseFloatCutoff = 4000;

template <class Num>
LpSolution<Num> solve_relaxation_lp(const LinearProgram<Num>& lp);

template <>
inline LpSolution<Rational> solve_relaxation_lp(const LinearProgram<Rational>& lp) {
  return lp_solve(lp);
}

template <>
inline LpSolution<double> solve_relaxation_lp(const LinearProgram<double>& lp) {
  if (lp.num_vars <= kDenseFloatCutoff) return lp_solve(lp);
  return revised_simplex_solve(lp);
}

/// Optimal fractional solution of the relaxation. Every instance admits the
/// greedy integral schedule, so infeasibility indicates a construction bug.
template <class Num>
FractionalSolution<Num> solve_relaxation(const Instance& inst) {
  auto rlp = build_lp<Num>(inst);
  auto res = solve_relaxation_lp<Num>(rlp.lp);
  if (res.status != LpStatus::Optimal)
    throw std::logic_error(std::string("relaxation solve returned ") + to_string(res.status));
  return solution_from_values(inst, rlp, res.values);
}

/// One monochromatic sequence matching: items I matched to consecutive
/// slots start_slot+1 .. start_slot+|I| with weight lambda.
template <class Num>
struct MsmEntry {
  Num lambda;
  int start_slot = 0;  // the paper's j
  std::vector<int> items;
};

template <class Num>
struct MsmPacking {
  std::vector<MsmEntry<Num>> entries;

  Num total_weight() const {
    Num s = NumTraits<Num>::zero();
    for (const auto& e : entries) s += e.lambda;
    return s;
  }
};

/// Peels maximal same-color chains off a feasible solution, always starting
/// from the earliest slot carrying mass (ties: smallest item). Each round
/// zeroes at least one entry, so the packing has at most nnz(x) entries.
template <class Num>
MsmPacking<Num> decompose_msm(const FractionalSolution<Num>& sol) {
  using T = NumTraits<Num>;
  const Instance& inst = sol.instance();
  {
    auto rep = check_feasibility(sol);
    if (!rep.ok())
      throw std::invalid_argument("decompose_msm: infeasible input: " + rep.violations.front());
  }

  // mutable copy, slot-bucketed for earliest-positive lookup
  std::vector<std::vector<Num>> work(static_cast<size_t>(inst.n()) + 1);
  for (int i = 1; i <= inst.n(); ++i)
    work[static_cast<size_t>(i)]
        .assign(static_cast<size_t>(inst.last_slot() - inst.earliest_slot(i)) + 1, T::zero());
  auto at = [&](int i, int j) -> Num& {
    return work[static_cast<size_t>(i)][static_cast<size_t>(j - inst.earliest_slot(i))];
  };
  std::vector<std::vector<int>> bucket(static_cast<size_t>(inst.last_slot()) + 1);
  for (int i = 1; i <= inst.n(); ++i)
    for (const auto& [j, v] : sol.row(i))
      if (T::piv_positive(v)) {
        at(i, j) = v;
        bucket[static_cast<size_t>(j)].push_back(i);
      }
  for (auto& b : bucket) std::sort(b.begin(), b.end());

  MsmPacking<Num> packing;
  for (int t = inst.first_slot(); t <= inst.last_slot(); ++t) {
    auto& b = bucket[static_cast<size_t>(t)];
    while (!b.empty()) {
      int i1 = b.front();
      if (!T::piv_positive(at(i1, t))) {
        b.erase(b.begin());
        continue;
      }
      MsmEntry<Num> entry;
      entry.start_slot = t - 1;
      entry.lambda = at(i1, t);
      int item = i1;
      int slot = t;
      for (;;) {
        entry.items.push_back(item);
        if (inst.is_last(item)) break;
        int ni = inst.next_same_color(item);
        if (slot + 1 > inst.last_slot() || slot + 1 < inst.earliest_slot(ni)) break;
        if (!T::piv_positive(at(ni, slot + 1))) break;
        item = ni;
        ++slot;
      }
      // subtract lambda along the chain
      slot = t;
      for (int it : entry.items) {
        Num& cell = at(it, slot);
        cell -= entry.lambda;
        if constexpr (!T::exact) {
          if (cell < T::piv_eps) cell = T::zero();
        }
        ++slot;
      }
      packing.entries.push_back(std::move(entry));
    }
  }
  return packing;
}

/// Checks MSM conditions (i)-(iii) for every entry and the packing
/// constraints: unit coverage per item, unit coverage per slot, and total
/// weight equal to z(x).
template <class Num>
FeasibilityReport verify_msm_packing(const FractionalSolution<Num>& sol,
                                     const MsmPacking<Num>& packing) {
  using T = NumTraits<Num>;
  const Instance& inst = sol.instance();
  FeasibilityReport rep;
  auto flag = [&rep](std::string msg) {
    if (rep.violations.size() < 64) rep.violations.push_back(std::move(msg));
  };

  std::vector<Num> item_cover(static_cast<size_t>(inst.n()) + 1, T::zero());
  std::vector<Num> slot_cover(static_cast<size_t>(inst.last_slot()) + 1, T::zero());
  for (size_t e = 0; e < packing.entries.size(); ++e) {
    const auto& entry = packing.entries[e];
    const auto tag = "entry " + std::to_string(e);
    if (entry.items.empty()) {
      flag(tag + " empty");
      continue;
    }
    if (!T::is_positive(entry.lambda)) flag(tag + " lambda not positive");
    for (size_t s = 0; s + 1 < entry.items.size(); ++s) {
      if (inst.color(entry.items[s]) != inst.color(entry.items[s + 1]))
        flag(tag + " (i): color mismatch");
      if (inst.next_same_color(entry.items[s]) != entry.items[s + 1])
        flag(tag + " (i): not consecutive same-color items");
    }
    for (size_t s = 0; s < entry.items.size(); ++s) {
      int slot = entry.start_slot + static_cast<int>(s) + 1;
      if (slot < entry.items[s])
        flag(tag + " (ii): slot " + std::to_string(slot) + " precedes item " +
             std::to_string(entry.items[s]));
      item_cover[static_cast<size_t>(entry.items[s])] += entry.lambda;
      if (slot >= inst.first_slot() && slot <= inst.last_slot())
        slot_cover[static_cast<size_t>(slot)] += entry.lambda;
      else
        flag(tag + " slot out of range");
    }
    int m = static_cast<int>(entry.items.size());
    if (entry.start_slot + m >= inst.next_same_color(entry.items.back()) - 1)
      flag(tag + " (iii): chain not maximal before next arrival");
  }

  for (int i = 1; i <= inst.n(); ++i)
    if (!(T::leq(item_cover[static_cast<size_t>(i)], T::one()) &&
          T::geq(item_cover[static_cast<size_t>(i)], T::one())))
      flag("(a) item " + std::to_string(i) + " covered " +
           T::to_string(item_cover[static_cast<size_t>(i)]));
  for (int j = inst.first_slot(); j <= inst.last_slot(); ++j)
    if (!(T::leq(slot_cover[static_cast<size_t>(j)], T::one()) &&
          T::geq(slot_cover[static_cast<size_t>(j)], T::one())))
      flag("(b) slot " + std::to_string(j) + " covered " +
           T::to_string(slot_cover[static_cast<size_t>(j)]));
  Num z = sol.objective();
  Num lam = packing.total_weight();
  if (!(T::leq(lam, z) && T::geq(lam, z)))
    flag("(c) total weight " + T::to_string(lam) + " != z(x) " + T::to_string(z));
  return rep;
}

}  // namespace rbm
