#include "mmot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"

namespace mmot {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-9;

struct Simplex {
  const TransportLp& lp;
  int m;           // rows
  int nvars;       // structural variables
  std::vector<double> binv;   // m x m row-major
  std::vector<int> basis;     // basic variable per row; >= nvars means artificial (row id)
  std::vector<double> xb;     // basic values
  std::vector<double> y;      // simplex multipliers
  std::vector<double> w;      // entering column in basis coordinates
  long pivots = 0;
  long degenerate_run = 0;
  bool bland = false;

  explicit Simplex(const TransportLp& l)
      : lp(l),
        m(l.axes * l.cells),
        nvars(static_cast<int>(l.cost.size())),
        binv(static_cast<std::size_t>(l.axes * l.cells) * (l.axes * l.cells), 0.0),
        basis(l.axes * l.cells),
        xb(l.rhs),
        y(l.axes * l.cells),
        w(l.axes * l.cells) {
    for (int i = 0; i < m; ++i) {
      binv[static_cast<std::size_t>(i) * m + i] = 1.0;
      basis[i] = nvars + i;  // artificial start
    }
  }

  int var_row(int j, int axis) const { return axis * lp.cells + lp.var_cells[j][axis]; }

  // y = c_B^T B^{-1} for the given basic cost vector
  void compute_multipliers(const std::vector<double>& cb) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int k = 0; k < m; ++k) {
      const double c = cb[k];
      if (c == 0.0) continue;
      const double* row = &binv[static_cast<std::size_t>(k) * m];
      for (int i = 0; i < m; ++i) y[i] += c * row[i];
    }
  }

  double reduced_cost(int j, const std::vector<double>& cost) const {
    double d = cost[j];
    for (int a = 0; a < lp.axes; ++a) d -= y[var_row(j, a)];
    return d;
  }

  // entering variable: Dantzig (most negative, lowest index on ties) or Bland
  int price(const std::vector<double>& cost) const {
    int enter = -1;
    double best = -kCostTol;
    for (int j = 0; j < nvars; ++j) {
      const double d = reduced_cost(j, cost);
      if (bland) {
        if (d < -kCostTol) return j;
      } else if (d < best) {
        best = d;
        enter = j;
      }
    }
    return enter;
  }

  // w = B^{-1} A_j (column has lp.axes unit entries)
  void ftran(int j) {
    std::fill(w.begin(), w.end(), 0.0);
    for (int a = 0; a < lp.axes; ++a) {
      const int r = var_row(j, a);
      for (int i = 0; i < m; ++i) w[i] += binv[static_cast<std::size_t>(i) * m + r];
    }
  }

  // leaving row by ratio test; deterministic tie-breaking. In phase 2 a basic
  // artificial at zero level must leave as soon as the entering column touches
  // its row, otherwise a pivot could push it positive and lose feasibility.
  int ratio_row(bool protect_artificials) const {
    if (protect_artificials) {
      for (int i = 0; i < m; ++i) {
        if (basis[i] >= nvars && xb[i] <= kFeasTol && std::abs(w[i]) > 1e-7) return i;
      }
    }
    int row = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (w[i] <= kPivotTol) continue;
      const double r = xb[i] / w[i];
      if (r < best - 1e-13) {
        best = r;
        row = i;
      } else if (r <= best + 1e-13 && row >= 0) {
        if (bland) {
          if (basis[i] < basis[row]) row = i;
        } else if (w[i] > w[row] + 1e-13 || (std::abs(w[i] - w[row]) <= 1e-13 && basis[i] < basis[row])) {
          row = i;
        }
      }
    }
    return row;
  }

  void pivot(int enter, int row) {
    const double piv = w[row];
    double* prow = &binv[static_cast<std::size_t>(row) * m];
    for (int i = 0; i < m; ++i) prow[i] /= piv;
    double theta = xb[row] / piv;
    if (theta == 0.0) theta = 0.0;  // normalize -0
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = w[i];
      if (f == 0.0) continue;
      double* irow = &binv[static_cast<std::size_t>(i) * m];
      for (int t = 0; t < m; ++t) irow[t] -= f * prow[t];
      xb[i] -= f * theta;
      if (xb[i] < 0.0 && xb[i] > -1e-12) xb[i] = 0.0;
    }
    xb[row] = theta;
    basis[row] = enter;
    ++pivots;
    if (theta <= kPivotTol) {
      if (++degenerate_run > 3L * m + 200) bland = true;
    } else {
      degenerate_run = 0;
    }
  }

  void refactorize() {
    // rebuild B column by column and invert by Gauss-Jordan with partial pivoting
    std::vector<double> B(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
      const int j = basis[k];
      if (j >= nvars) {
        B[static_cast<std::size_t>(j - nvars) * m + k] = 1.0;
      } else {
        for (int a = 0; a < lp.axes; ++a) B[static_cast<std::size_t>(var_row(j, a)) * m + k] = 1.0;
      }
    }
    std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;
    std::vector<int> perm(m);
    for (int col = 0; col < m; ++col) {
      int p = col;
      double best = std::abs(B[static_cast<std::size_t>(col) * m + col]);
      for (int r = col + 1; r < m; ++r) {
        const double v = std::abs(B[static_cast<std::size_t>(r) * m + col]);
        if (v > best) {
          best = v;
          p = r;
        }
      }
      if (best < 1e-13) throw error("lp: singular basis during refactorization");
      if (p != col) {
        for (int t = 0; t < m; ++t) {
          std::swap(B[static_cast<std::size_t>(p) * m + t], B[static_cast<std::size_t>(col) * m + t]);
          std::swap(inv[static_cast<std::size_t>(p) * m + t], inv[static_cast<std::size_t>(col) * m + t]);
        }
      }
      const double piv = B[static_cast<std::size_t>(col) * m + col];
      for (int t = 0; t < m; ++t) {
        B[static_cast<std::size_t>(col) * m + t] /= piv;
        inv[static_cast<std::size_t>(col) * m + t] /= piv;
      }
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = B[static_cast<std::size_t>(r) * m + col];
        if (f == 0.0) continue;
        for (int t = 0; t < m; ++t) {
          B[static_cast<std::size_t>(r) * m + t] -= f * B[static_cast<std::size_t>(col) * m + t];
          inv[static_cast<std::size_t>(r) * m + t] -= f * inv[static_cast<std::size_t>(col) * m + t];
        }
      }
    }
    binv = std::move(inv);
    // refresh basic values
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      const double* row = &binv[static_cast<std::size_t>(i) * m];
      for (int t = 0; t < m; ++t) v += row[t] * lp.rhs[t];
      xb[i] = std::max(0.0, v);
    }
  }

  // minimize the given cost vector over the current basis; returns false on pivot limit
  bool run(const std::vector<double>& cost, double artificial_cost, bool protect_artificials,
           long pivot_limit) {
    std::vector<double> cb(m);
    long since_refactor = 0;
    while (pivots < pivot_limit) {
      for (int i = 0; i < m; ++i) {
        const int b = basis[i];
        cb[i] = b >= nvars ? artificial_cost : cost[b];
      }
      compute_multipliers(cb);
      const int enter = price(cost);
      if (enter < 0) return true;  // optimal
      ftran(enter);
      const int row = ratio_row(protect_artificials);
      if (row < 0) throw error("lp: unbounded transportation program (inconsistent input)");
      pivot(enter, row);
      if (++since_refactor >= 2000) {
        refactorize();
        since_refactor = 0;
      }
    }
    return false;
  }
};

}  // namespace

LpSolution simplex_solve(const TransportLp& lp, long pivot_limit) {
  if (lp.axes < 1 || lp.axes > 3) throw error("lp: axes must be 1..3");
  for (double b : lp.rhs)
    if (b < 0.0) throw error("lp: negative right-hand side");

  Simplex s(lp);
  LpSolution sol;

  // Phase 1: minimize the sum of artificials (cost 1 each, structural cost 0).
  {
    std::vector<double> phase1_cost(s.nvars, 0.0);
    if (!s.run(phase1_cost, 1.0, false, pivot_limit)) {
      sol.status = LpSolution::Status::PivotLimit;
      sol.pivots = s.pivots;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < s.m; ++i)
      if (s.basis[i] >= s.nvars) infeas += s.xb[i];
    if (infeas > kFeasTol) {
      sol.status = LpSolution::Status::Infeasible;
      sol.pivots = s.pivots;
      sol.objective = std::numeric_limits<double>::infinity();
      return sol;
    }
  }

  // Phase 2: real costs; artificials stay at zero and are never priced.
  {
    s.bland = false;
    s.degenerate_run = 0;
    if (!s.run(lp.cost, 0.0, true, pivot_limit)) {
      sol.status = LpSolution::Status::PivotLimit;
      sol.pivots = s.pivots;
      return sol;
    }
  }

  s.refactorize();  // clean solution before reporting
  sol.status = LpSolution::Status::Optimal;
  sol.pivots = s.pivots;
  sol.x.assign(s.nvars, 0.0);
  for (int i = 0; i < s.m; ++i) {
    if (s.basis[i] < s.nvars) sol.x[s.basis[i]] = s.xb[i];
  }
  double obj = 0.0;
  for (int j = 0; j < s.nvars; ++j) obj += lp.cost[j] * sol.x[j];
  sol.objective = obj;
  // residual check
  std::vector<double> ax(s.m, 0.0);
  for (int j = 0; j < s.nvars; ++j) {
    if (sol.x[j] == 0.0) continue;
    for (int a = 0; a < lp.axes; ++a) ax[s.var_row(j, a)] += sol.x[j];
  }
  double res = 0.0;
  for (int i = 0; i < s.m; ++i) res = std::max(res, std::abs(ax[i] - lp.rhs[i]));
  sol.residual = res;
  return sol;
}

}  // namespace mmot
