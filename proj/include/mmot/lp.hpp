#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mmot {

// Equality-form transportation program
//   min  c . x   s.t.  for each axis a and cell r:
//        sum over variables whose axis-a cell is r of x = rhs[a * cells + r],
//        x >= 0.
// Every column has exactly `axes` unit entries, one per axis block.
struct TransportLp {
  int axes = 0;
  int cells = 0;
  std::vector<std::array<std::int32_t, 3>> var_cells;  // per variable, per axis
  std::vector<double> cost;
  std::vector<double> rhs;  // size axes * cells, nonnegative
};

struct LpSolution {
  enum class Status { Optimal, Infeasible, PivotLimit };
  Status status = Status::Optimal;
  std::vector<double> x;
  double objective = 0.0;
  long pivots = 0;
  double residual = 0.0;  // max |Ax - b| at the reported solution
};

// Revised simplex with an explicit basis inverse. Dantzig pricing with
// lowest-variable-index tie-breaking; falls back to Bland's rule after a long
// degenerate stretch so every run is finite and deterministic.
LpSolution simplex_solve(const TransportLp& lp, long pivot_limit = 400000);

}  // namespace mmot
