#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbm/number.hpp"

namespace rbm {

enum class Relation { Eq, Geq };

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

/// Minimization LP over variables x >= 0 with sparse Eq / Geq rows.
template <class Num>
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, Num>> coeffs;  // (var index, coefficient)
    Relation rel = Relation::Geq;
    Num rhs = Num(0);
  };

  int num_vars = 0;
  std::vector<Num> objective;  // length num_vars
  std::vector<Row> rows;

  int add_var(Num cost) {
    objective.push_back(cost);
    return num_vars++;
  }

  void add_row(std::vector<std::pair<int, Num>> coeffs, Relation rel, Num rhs) {
    rows.push_back(Row{std::move(coeffs), rel, std::move(rhs)});
  }

  /// Throws on out-of-range or duplicate indices within a row.
  void validate() const {
    if (static_cast<int>(objective.size()) != num_vars)
      throw std::invalid_argument("objective length mismatch");
    std::vector<int> mark(static_cast<size_t>(num_vars), -1);
    for (size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [v, coef] : rows[r].coeffs) {
        (void)coef;
        if (v < 0 || v >= num_vars) throw std::invalid_argument("row index out of range");
        if (mark[static_cast<size_t>(v)] == static_cast<int>(r))
          throw std::invalid_argument("duplicate index within a row");
        mark[static_cast<size_t>(v)] = static_cast<int>(r);
      }
    }
  }
};

template <class Num>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Num> values;
  Num objective = Num(0);
  long pivots = 0;
};

struct LpViolation {
  int row = 0;  // -1 for a variable bound
  std::string what;
};

/// Exact check in rational mode, eps-feasibility check in float mode.
/// Returns the first violated constraint.
template <class Num>
std::optional<LpViolation> lp_check(const LinearProgram<Num>& lp,
                                    const std::vector<Num>& values) {
  using T = NumTraits<Num>;
  if (static_cast<int>(values.size()) != lp.num_vars)
    throw std::invalid_argument("value vector length mismatch");
  for (int v = 0; v < lp.num_vars; ++v)
    if (!T::geq(values[static_cast<size_t>(v)], T::zero()))
      return LpViolation{-1, "variable " + std::to_string(v) + " negative"};
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    Num lhs = T::zero();
    for (const auto& [v, coef] : lp.rows[r].coeffs) lhs += coef * values[static_cast<size_t>(v)];
    bool ok = lp.rows[r].rel == Relation::Eq
                  ? (T::leq(lhs, lp.rows[r].rhs) && T::geq(lhs, lp.rows[r].rhs))
                  : T::geq(lhs, lp.rows[r].rhs);
    if (!ok)
      return LpViolation{static_cast<int>(r),
                         "constraint " + std::to_string(r) + " violated"};
  }
  return std::nullopt;
}

struct SimplexOptions {
  std::ostream* tableau_dump = nullptr;  // TSV dump of the final tableau
  long max_pivots = 0;                   // 0 = auto
};

/// Two-phase primal simplex over a dense tableau with Bland's pivot rule.
/// Bland's rule plus exact arithmetic guarantees termination in rational
/// mode; float mode uses the same rule with small pivot tolerances.
template <class Num>
class DenseSimplex {
  using T = NumTraits<Num>;

 public:
  explicit DenseSimplex(const LinearProgram<Num>& lp, SimplexOptions opts = {})
      : lp_(lp), opts_(opts) {
    lp.validate();
  }

  LpSolution<Num> solve() {
    build_tableau();
    LpSolution<Num> out;
    if (!phase1()) {
      out.status = LpStatus::Infeasible;
      out.pivots = pivots_;
      return out;
    }
    drive_out_artificials();
    bool bounded = phase2();
    dump_if_requested();
    if (!bounded) {
      out.status = LpStatus::Unbounded;
      out.pivots = pivots_;
      return out;
    }
    out.status = LpStatus::Optimal;
    out.values.assign(static_cast<size_t>(lp_.num_vars), T::zero());
    for (size_t r = 0; r < basis_.size(); ++r)
      if (!dropped_[r] && basis_[r] < lp_.num_vars)
        out.values[static_cast<size_t>(basis_[r])] = tab_[r][rhs_];
    out.objective = T::zero();
    for (int v = 0; v < lp_.num_vars; ++v)
      out.objective += lp_.objective[static_cast<size_t>(v)] * out.values[static_cast<size_t>(v)];
    out.pivots = pivots_;
    return out;
  }

 private:
  // Column layout: [0, V) structural, [V, V+S) surplus, [V+S, V+S+m) artificial.
  void build_tableau() {
    const int m = static_cast<int>(lp_.rows.size());
    int surplus = 0;
    for (const auto& row : lp_.rows)
      if (row.rel == Relation::Geq) ++surplus;
    surplus_begin_ = lp_.num_vars;
    art_begin_ = surplus_begin_ + surplus;
    cols_ = art_begin_ + m;
    rhs_ = cols_;

    tab_.assign(static_cast<size_t>(m), std::vector<Num>(static_cast<size_t>(cols_ + 1), T::zero()));
    basis_.assign(static_cast<size_t>(m), -1);
    dropped_.assign(static_cast<size_t>(m), false);

    int s = surplus_begin_;
    for (int r = 0; r < m; ++r) {
      const auto& row = lp_.rows[static_cast<size_t>(r)];
      auto& t = tab_[static_cast<size_t>(r)];
      for (const auto& [v, coef] : row.coeffs) t[static_cast<size_t>(v)] = coef;
      if (row.rel == Relation::Geq) t[static_cast<size_t>(s++)] = Num(-1);
      t[static_cast<size_t>(rhs_)] = row.rhs;
      if (T::is_negative(t[static_cast<size_t>(rhs_)]))
        for (auto& x : t) x = -x;
      t[static_cast<size_t>(art_begin_ + r)] = T::one();
      basis_[static_cast<size_t>(r)] = art_begin_ + r;
    }
  }

  // Reduced costs for cost vector c over the current basis.
  void rebuild_zrow(const std::vector<Num>& cost) {
    zrow_.assign(static_cast<size_t>(cols_ + 1), T::zero());
    for (int j = 0; j <= cols_; ++j) {
      Num z = j < static_cast<int>(cost.size()) ? cost[static_cast<size_t>(j)] : T::zero();
      if (j == cols_) z = T::zero();
      zrow_[static_cast<size_t>(j)] = z;
    }
    for (size_t r = 0; r < tab_.size(); ++r) {
      if (dropped_[r]) continue;
      Num cb = basis_[r] < static_cast<int>(cost.size()) ? cost[static_cast<size_t>(basis_[r])]
                                                         : T::zero();
      if (T::is_zero(cb)) continue;
      for (int j = 0; j <= cols_; ++j)
        zrow_[static_cast<size_t>(j)] -= cb * tab_[r][static_cast<size_t>(j)];
    }
  }

  void pivot(int prow, int pcol) {
    auto& prow_vec = tab_[static_cast<size_t>(prow)];
    Num inv = T::one() / prow_vec[static_cast<size_t>(pcol)];
    for (auto& x : prow_vec) x *= inv;
    prow_vec[static_cast<size_t>(pcol)] = T::one();  // kill roundoff in float mode
    for (size_t r = 0; r < tab_.size(); ++r) {
      if (static_cast<int>(r) == prow || dropped_[r]) continue;
      Num f = tab_[r][static_cast<size_t>(pcol)];
      if (T::piv_zero(f)) continue;
      for (int j = 0; j <= cols_; ++j) {
        if (T::piv_zero(prow_vec[static_cast<size_t>(j)])) continue;
        tab_[r][static_cast<size_t>(j)] -= f * prow_vec[static_cast<size_t>(j)];
      }
      tab_[r][static_cast<size_t>(pcol)] = T::zero();
    }
    Num fz = zrow_[static_cast<size_t>(pcol)];
    if (!T::piv_zero(fz)) {
      for (int j = 0; j <= cols_; ++j) {
        if (T::piv_zero(prow_vec[static_cast<size_t>(j)])) continue;
        zrow_[static_cast<size_t>(j)] -= fz * prow_vec[static_cast<size_t>(j)];
      }
      zrow_[static_cast<size_t>(pcol)] = T::zero();
    }
    basis_[static_cast<size_t>(prow)] = pcol;
    ++pivots_;
    if (pivots_ > pivot_cap())
      throw std::runtime_error("simplex pivot cap exceeded");
  }

  // Bland: smallest eligible entering index; leaving by min ratio with
  // smallest basis label on ties.
  bool run_simplex(int col_limit) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < col_limit; ++j) {
        if (T::piv_negative(zrow_[static_cast<size_t>(j)])) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal for current cost
      int leave = -1;
      Num best_ratio = T::zero();
      for (size_t r = 0; r < tab_.size(); ++r) {
        if (dropped_[r]) continue;
        const Num& a = tab_[r][static_cast<size_t>(enter)];
        if (!T::piv_positive(a)) continue;
        Num ratio = tab_[r][static_cast<size_t>(rhs_)] / a;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[static_cast<size_t>(leave)])) {
          leave = static_cast<int>(r);
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;  // unbounded direction
      pivot(leave, enter);
    }
  }

  bool phase1() {
    std::vector<Num> cost(static_cast<size_t>(cols_), T::zero());
    for (int j = art_begin_; j < cols_; ++j) cost[static_cast<size_t>(j)] = T::one();
    rebuild_zrow(cost);
    run_simplex(cols_);  // artificials may re-enter in phase 1; cannot be unbounded
    Num obj = T::zero();
    for (size_t r = 0; r < tab_.size(); ++r)
      if (basis_[r] >= art_begin_) obj += tab_[r][static_cast<size_t>(rhs_)];
    return !T::is_positive(obj);
  }

  void drive_out_artificials() {
    for (size_t r = 0; r < tab_.size(); ++r) {
      if (basis_[r] < art_begin_) continue;
      int pcol = -1;
      for (int j = 0; j < art_begin_; ++j) {
        if (!T::piv_zero(tab_[r][static_cast<size_t>(j)])) {
          pcol = j;
          break;
        }
      }
      if (pcol >= 0) {
        pivot(static_cast<int>(r), pcol);  // degenerate: rhs is 0 here
      } else {
        dropped_[r] = true;  // redundant row (0 = 0)
      }
    }
  }

  bool phase2() {
    std::vector<Num> cost(static_cast<size_t>(cols_), T::zero());
    for (int v = 0; v < lp_.num_vars; ++v) cost[static_cast<size_t>(v)] = lp_.objective[static_cast<size_t>(v)];
    rebuild_zrow(cost);
    return run_simplex(art_begin_);  // artificials may not re-enter
  }

  long pivot_cap() const {
    if (opts_.max_pivots > 0) return opts_.max_pivots;
    return 10000 + 200L * (static_cast<long>(tab_.size()) + cols_);
  }

  void dump_if_requested() const {
    if (!opts_.tableau_dump) return;
    auto& os = *opts_.tableau_dump;
    os << "basis";
    for (int j = 0; j <= cols_; ++j) os << '\t' << (j == cols_ ? std::string("rhs") : "c" + std::to_string(j));
    os << '\n';
    for (size_t r = 0; r < tab_.size(); ++r) {
      if (dropped_[r]) continue;
      os << basis_[r];
      for (int j = 0; j <= cols_; ++j) os << '\t' << T::to_string(tab_[r][static_cast<size_t>(j)]);
      os << '\n';
    }
  }

  const LinearProgram<Num>& lp_;
  SimplexOptions opts_;
  std::vector<std::vector<Num>> tab_;
  std::vector<Num> zrow_;
  std::vector<int> basis_;
  std::vector<bool> dropped_;
  int surplus_begin_ = 0;
  int art_begin_ = 0;
  int cols_ = 0;
  int rhs_ = 0;
  long pivots_ = 0;
};

template <class Num>
LpSolution<Num> lp_solve(const LinearProgram<Num>& lp, SimplexOptions opts = {}) {
  return DenseSimplex<Num>(lp, opts).solve();
}

}  // namespace rbm
