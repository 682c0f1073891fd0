#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/coulomb.hpp"
#include "mmot/grid.hpp"

namespace mmot {

enum class SolveMethod { ExactLp, Entropic };

struct SolverParams {
  std::int64_t cap = 2'000'000;  // exact-LP variable cap (MMOT_CAP overrides via CLI)
  std::vector<double> eta_schedule = {1.0, 0.3, 0.1, 0.03, 0.01};
  long max_iterations = 5000;  // Sinkhorn sweeps per eta
  double marginal_tol = 1e-8;  // stop when max axis L1 residual falls below
  long pivot_limit = 400000;
};

struct PlanSolution {
  ProductField plan;
  double cost = 0.0;
  SolveMethod method = SolveMethod::ExactLp;
  std::vector<double> marginal_residuals;  // per axis, L1
  long iterations = 0;                     // simplex pivots or Sinkhorn sweeps
  bool converged = true;                   // false: entropic hit the iteration cap
  bool feasible = true;                    // false: no admissible plan (cost = +inf)
};

// Multimarginal optimal transport of rho against itself, N marginals.
// Exact method: vertex-optimal plan of the marginal-constrained LP, diagonal
// cells removed under the Forbid policy. Entropic method: log-domain
// multimarginal Sinkhorn over a decreasing eta schedule with warm starts;
// the reported cost carries no entropy term.
PlanSolution solve_mmot(const DiscreteDensity& rho, int arity, SolveMethod method,
                        const CoulombCost& cost, const SolverParams& params);

}  // namespace mmot
