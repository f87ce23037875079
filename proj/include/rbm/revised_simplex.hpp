#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rbm/lp.hpp"

namespace rbm {

/// Sparse revised simplex for float solves whose dense tableau would not
/// fit in memory (the n=200 relaxation has ~2e4 rows and columns). Basis
/// inverse is kept in product form; reinversion peels singleton columns
/// symbolically so refactoring stays near O(nnz) outside the kernel.
class RevisedSimplex {
  static constexpr double kDualTol = 1e-9;   // entering eligibility
  static constexpr double kPivotTol = 1e-12; // hard zero threshold
  static constexpr double kEligTol = 1e-9;   // ratio-test pivot eligibility
  static constexpr double kFeasTol = 1e-9;
  static constexpr int kReinvertEvery = 120;

 public:
  explicit RevisedSimplex(const LinearProgram<double>& lp) : lp_(lp) { lp.validate(); }

  LpSolution<double> solve() {
    build();
    LpSolution<double> out;
    if (!phase1()) {
      out.status = LpStatus::Infeasible;
      out.pivots = pivots_;
      return out;
    }
    phase_ = 2;
    bool bounded = iterate();
    if (!bounded) {
      out.status = LpStatus::Unbounded;
      out.pivots = pivots_;
      return out;
    }
    out.status = LpStatus::Optimal;
    out.values.assign(static_cast<size_t>(lp_.num_vars), 0.0);
    for (int r = 0; r < m_; ++r) {
      int c = basis_[static_cast<size_t>(r)];
      if (c < lp_.num_vars)
        out.values[static_cast<size_t>(c)] = std::max(0.0, xb_[static_cast<size_t>(r)]);
    }
    out.objective = 0.0;
    for (int v = 0; v < lp_.num_vars; ++v)
      out.objective += lp_.objective[static_cast<size_t>(v)] * out.values[static_cast<size_t>(v)];
    out.pivots = pivots_;
    return out;
  }

 private:
  struct Eta {
    int r = 0;
    double diag = 1.0;
    std::vector<std::pair<int, double>> off;  // entries v_i for i != r
  };

  void build() {
    m_ = static_cast<int>(lp_.rows.size());
    // row signs chosen so every right-hand side is nonnegative
    b_.resize(static_cast<size_t>(m_));
    std::vector<double> sign(static_cast<size_t>(m_), 1.0);
    for (int r = 0; r < m_; ++r) {
      double rhs = lp_.rows[static_cast<size_t>(r)].rhs;
      if (rhs < 0.0) {
        sign[static_cast<size_t>(r)] = -1.0;
        rhs = -rhs;
      }
      b_[static_cast<size_t>(r)] = rhs;
    }

    cols_.assign(static_cast<size_t>(lp_.num_vars), {});
    for (int r = 0; r < m_; ++r)
      for (const auto& [v, coef] : lp_.rows[static_cast<size_t>(r)].coeffs)
        cols_[static_cast<size_t>(v)].push_back({r, sign[static_cast<size_t>(r)] * coef});

    std::vector<int> surplus_of(static_cast<size_t>(m_), -1);
    for (int r = 0; r < m_; ++r) {
      if (lp_.rows[static_cast<size_t>(r)].rel != Relation::Geq) continue;
      surplus_of[static_cast<size_t>(r)] = static_cast<int>(cols_.size());
      cols_.push_back({{r, -sign[static_cast<size_t>(r)]}});
    }
    cost1_.assign(cols_.size(), 0.0);
    is_artificial_.assign(cols_.size(), false);
    where_.assign(cols_.size(), -1);

    basis_.assign(static_cast<size_t>(m_), -1);
    xb_.assign(static_cast<size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      int s = surplus_of[static_cast<size_t>(r)];
      double coef = s >= 0 ? -sign[static_cast<size_t>(r)] : 0.0;
      if (s >= 0 && (coef > 0.0 || b_[static_cast<size_t>(r)] == 0.0)) {
        // surplus starts basic with a nonnegative value
        basis_[static_cast<size_t>(r)] = s;
        where_[static_cast<size_t>(s)] = r;
        xb_[static_cast<size_t>(r)] = coef > 0.0 ? b_[static_cast<size_t>(r)] : 0.0;
      } else {
        int a = static_cast<int>(cols_.size());
        cols_.push_back({{r, 1.0}});
        cost1_.push_back(1.0);
        is_artificial_.push_back(true);
        where_.push_back(r);
        basis_[static_cast<size_t>(r)] = a;
        xb_[static_cast<size_t>(r)] = b_[static_cast<size_t>(r)];
      }
    }
    ncols_ = static_cast<int>(cols_.size());

    reinvert();
  }

  double cost_of(int c) const {
    if (phase_ == 1) return cost1_[static_cast<size_t>(c)];
    return c < lp_.num_vars ? lp_.objective[static_cast<size_t>(c)] : 0.0;
  }

  // ---- eta algebra ------------------------------------------------------

  // w <- B^{-1} w, w dense
  void ftran(std::vector<double>& w) const {
    for (const auto& e : etas_) {
      double t = w[static_cast<size_t>(e.r)];
      if (t == 0.0) continue;
      t /= e.diag;
      w[static_cast<size_t>(e.r)] = t;
      for (const auto& [i, v] : e.off) w[static_cast<size_t>(i)] -= v * t;
    }
  }

  // w <- B^{-T} w, w dense
  void btran(std::vector<double>& w) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double t = w[static_cast<size_t>(it->r)];
      for (const auto& [i, v] : it->off) t -= v * w[static_cast<size_t>(i)];
      w[static_cast<size_t>(it->r)] = t / it->diag;
    }
  }

  void scatter_column(int c, std::vector<double>& w, std::vector<int>& touched) const {
    for (const auto& [r, v] : cols_[static_cast<size_t>(c)]) {
      w[static_cast<size_t>(r)] = v;
      touched.push_back(r);
    }
  }

  void clear(std::vector<double>& w, std::vector<int>& touched) const {
    for (int r : touched) w[static_cast<size_t>(r)] = 0.0;
    touched.clear();
  }

  // ---- reinversion ------------------------------------------------------

  /// Rebuilds the eta list from the current basis. Column singletons are
  /// peeled symbolically; processing the cascade in reverse order means
  /// those etas need no numeric transformation at all. Only the kernel that
  /// survives peeling pays for dense ftran work.
  void reinvert() {
    etas_.clear();

    // count nonzeros per basis column and build row -> (basis columns) lists
    std::vector<std::vector<int>> row_cols(static_cast<size_t>(m_));
    std::vector<int> col_nnz(static_cast<size_t>(m_), 0);
    for (int r = 0; r < m_; ++r) {
      int c = basis_[static_cast<size_t>(r)];
      for (const auto& [cr, cv] : cols_[static_cast<size_t>(c)]) {
        if (std::fabs(cv) <= kPivotTol) continue;
        row_cols[static_cast<size_t>(cr)].push_back(r);  // store by basis position
        ++col_nnz[static_cast<size_t>(r)];
      }
    }

    std::vector<char> row_done(static_cast<size_t>(m_), 0);
    std::vector<char> col_done(static_cast<size_t>(m_), 0);  // by basis position

    // cascade of column singletons
    std::vector<std::pair<int, int>> cascade;  // (basis position, pivot row)
    std::vector<int> queue;
    for (int p = 0; p < m_; ++p)
      if (col_nnz[static_cast<size_t>(p)] == 1) queue.push_back(p);
    while (!queue.empty()) {
      int p = queue.back();
      queue.pop_back();
      if (col_done[static_cast<size_t>(p)] || col_nnz[static_cast<size_t>(p)] != 1) continue;
      int c = basis_[static_cast<size_t>(p)];
      int prow = -1;
      for (const auto& [cr, cv] : cols_[static_cast<size_t>(c)])
        if (!row_done[static_cast<size_t>(cr)] && std::fabs(cv) > kPivotTol) prow = cr;
      if (prow < 0) continue;  // numerically empty; leave to the kernel pass
      cascade.push_back({p, prow});
      col_done[static_cast<size_t>(p)] = 1;
      row_done[static_cast<size_t>(prow)] = 1;
      for (int q : row_cols[static_cast<size_t>(prow)]) {
        if (col_done[static_cast<size_t>(q)]) continue;
        if (--col_nnz[static_cast<size_t>(q)] == 1) queue.push_back(q);
      }
    }

    // kernel: everything the cascade could not order
    std::vector<int> kernel;
    for (int p = 0; p < m_; ++p)
      if (!col_done[static_cast<size_t>(p)]) kernel.push_back(p);

    std::vector<double> w(static_cast<size_t>(m_), 0.0);
    std::vector<int> touched;
    auto push_eta = [&](int prow) {
      Eta e;
      e.r = prow;
      e.diag = w[static_cast<size_t>(prow)];
      for (int r : touched) {
        if (r == prow) continue;
        double v = w[static_cast<size_t>(r)];
        if (std::fabs(v) > kPivotTol) e.off.push_back({r, v});
      }
      etas_.push_back(std::move(e));
    };

    for (int p : kernel) {
      int c = basis_[static_cast<size_t>(p)];
      scatter_column(c, w, touched);
      // apply existing kernel etas (their pivot rows are kernel rows)
      for (const auto& e : etas_) {
        double t = w[static_cast<size_t>(e.r)];
        if (t == 0.0) continue;
        t /= e.diag;
        w[static_cast<size_t>(e.r)] = t;
        for (const auto& [i, v] : e.off) {
          if (w[static_cast<size_t>(i)] == 0.0) touched.push_back(i);
          w[static_cast<size_t>(i)] -= v * t;
        }
      }
      int prow = -1;
      double best = 0.0;
      for (int r : touched) {
        if (row_done[static_cast<size_t>(r)]) continue;
        double v = std::fabs(w[static_cast<size_t>(r)]);
        if (v > best) {
          best = v;
          prow = r;
        }
      }
      if (prow < 0 || best <= kPivotTol) throw std::runtime_error("singular basis in reinversion");
      row_done[static_cast<size_t>(prow)] = 1;
      push_eta(prow);
      clear(w, touched);
    }

    // reversed cascade: raw columns, no transformation needed
    for (auto it = cascade.rbegin(); it != cascade.rend(); ++it) {
      int c = basis_[static_cast<size_t>(it->first)];
      scatter_column(c, w, touched);
      push_eta(it->second);
      clear(w, touched);
    }

    pivots_since_reinvert_ = 0;
    recompute_basics();
  }

  void recompute_basics() {
    std::vector<double> w = b_;
    ftran(w);
    xb_ = w;
  }

  // ---- simplex iterations ------------------------------------------------

  double phase_objective() const {
    double obj = 0.0;
    for (int r = 0; r < m_; ++r)
      obj += cost_of(basis_[static_cast<size_t>(r)]) * xb_[static_cast<size_t>(r)];
    return obj;
  }

  bool phase1() {
    phase_ = 1;
    if (!iterate()) throw std::logic_error("phase 1 cannot be unbounded");
    return phase_objective() <= 1e-7;
  }

  // Runs to optimality of the current phase cost. Returns false on an
  // unbounded direction.
  bool iterate() {
    long stall = 0;
    double last_obj = phase_objective();
    for (;;) {
      // y = B^{-T} c_B
      std::vector<double> y(static_cast<size_t>(m_), 0.0);
      for (int r = 0; r < m_; ++r) y[static_cast<size_t>(r)] = cost_of(basis_[static_cast<size_t>(r)]);
      btran(y);

      // pricing: Dantzig by default, Bland's rule when stalling
      bool bland = stall > 400;
      int enter = -1;
      double best = -kDualTol;
      for (int c = 0; c < ncols_; ++c) {
        if (where_[static_cast<size_t>(c)] >= 0) continue;
        if (phase_ == 2 && is_artificial_[static_cast<size_t>(c)]) continue;
        double d = cost_of(c);
        for (const auto& [r, v] : cols_[static_cast<size_t>(c)]) d -= y[static_cast<size_t>(r)] * v;
        if (d < best) {
          enter = c;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return true;

      // direction alpha = B^{-1} A_enter
      std::vector<double> alpha(static_cast<size_t>(m_), 0.0);
      for (const auto& [r, v] : cols_[static_cast<size_t>(enter)]) alpha[static_cast<size_t>(r)] = v;
      ftran(alpha);

      // two-pass ratio test: find the tightest ratio, then take the
      // largest pivot among near-ties (smallest basis label under Bland)
      auto eligible = [&](int r, double& a, bool& art_block) {
        a = alpha[static_cast<size_t>(r)];
        art_block = phase_ == 2 &&
                    is_artificial_[static_cast<size_t>(basis_[static_cast<size_t>(r)])] &&
                    std::fabs(a) > kEligTol;
        return a > kEligTol || art_block;
      };
      double min_ratio = -1.0;
      for (int r = 0; r < m_; ++r) {
        double a;
        bool art_block;
        if (!eligible(r, a, art_block)) continue;
        double ratio = art_block ? 0.0 : std::max(0.0, xb_[static_cast<size_t>(r)]) / a;
        if (min_ratio < 0.0 || ratio < min_ratio) min_ratio = ratio;
      }
      if (min_ratio < 0.0) return false;  // unbounded

      int leave = -1;
      double best_piv = 0.0, leave_ratio = 0.0;
      for (int r = 0; r < m_; ++r) {
        double a;
        bool art_block;
        if (!eligible(r, a, art_block)) continue;
        double ratio = art_block ? 0.0 : std::max(0.0, xb_[static_cast<size_t>(r)]) / a;
        if (ratio > min_ratio + kFeasTol) continue;
        bool take = leave < 0 ||
                    (bland ? basis_[static_cast<size_t>(r)] < basis_[static_cast<size_t>(leave)]
                           : std::fabs(a) > std::fabs(best_piv));
        if (take) {
          leave = r;
          best_piv = a;
          leave_ratio = ratio;
        }
      }

      pivot(enter, leave, alpha, leave_ratio);

      double obj = phase_objective();
      if (obj < last_obj - 1e-10) {
        last_obj = obj;
        stall = 0;
      } else {
        ++stall;
      }
      if (pivots_ > pivot_cap()) throw std::runtime_error("revised simplex pivot cap exceeded");
    }
  }

  void pivot(int enter, int leave, std::vector<double>& alpha, double step_ratio) {
    // update basic values, append the eta for this pivot
    double piv = alpha[static_cast<size_t>(leave)];
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      xb_[static_cast<size_t>(r)] -= alpha[static_cast<size_t>(r)] * step_ratio;
    }
    xb_[static_cast<size_t>(leave)] = step_ratio;

    Eta e;
    e.r = leave;
    e.diag = piv;
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      double v = alpha[static_cast<size_t>(r)];
      if (std::fabs(v) > kPivotTol) e.off.push_back({r, v});
    }
    etas_.push_back(std::move(e));

    int old = basis_[static_cast<size_t>(leave)];
    where_[static_cast<size_t>(old)] = -1;
    basis_[static_cast<size_t>(leave)] = enter;
    where_[static_cast<size_t>(enter)] = leave;
    ++pivots_;
    if (++pivots_since_reinvert_ >= kReinvertEvery) reinvert();
  }

  long pivot_cap() const { return 20000 + 40L * (m_ + ncols_); }

  const LinearProgram<double>& lp_;
  int m_ = 0, ncols_ = 0, phase_ = 1;
  long pivots_ = 0;
  int pivots_since_reinvert_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost1_, b_, xb_;
  std::vector<int> basis_, where_;
  std::vector<bool> is_artificial_;
  std::vector<Eta> etas_;
};

inline LpSolution<double> revised_simplex_solve(const LinearProgram<double>& lp) {
  return RevisedSimplex(lp).solve();
}

}  // namespace rbm
