#pragma once

#include <cstdint>
#include <vector>

#include "mmot/coulomb.hpp"
#include "mmot/grid.hpp"
#include "mmot/mollifier.hpp"
#include "mmot/solver.hpp"

namespace mmot {

// Plan mollification with exact marginal restoration. The sampled kernel is
// applied as a source-normalized transition matrix, so total mass and the
// restored marginals are exact in discrete algebra (interior cells see plain
// normalized convolution; boundary cells renormalize instead of leaking).

// rho * eta_eps on the same grid.
DiscreteDensity mollify_density(const DiscreteDensity& rho, double eps);

// P_tilde_eps: kernel applied to every coordinate block. Requires eps >= 2h.
ProductField mollify_plan(const ProductField& plan, double eps);

// P_eps via the composition kernel gamma_eps(x,y) = rho(x) eta_eps(y-x) / rho_eps(y),
// zero where rho_eps vanishes. Every marginal of the result equals rho exactly.
// Errors if the marginals of p_tilde do not match rho * eta_eps to 1e-8.
ProductField restore_marginals(const ProductField& p_tilde, const DiscreteDensity& rho,
                               double eps);

// Dense row of the discrete composition kernel at fixed y: gamma(. | y) in
// density units (sums to 1/h^d over x when rho_eps(y) > 0). Test hook.
std::vector<double> gamma_row(const DiscreteDensity& rho, double eps, std::int64_t y_cell);

// int |grad phi|^2 over all d*N coordinates (no hbar factor).
double kinetic_energy(const ProductField& phi);

// N (||sqrt(rho)||_{H1}^2 + K(d) / (4 eps^2)).
double kinetic_bound(const DiscreteDensity& rho, double eps, int arity);

struct SmoothedPlan {
  ProductField p_tilde;     // marginals rho * eta_eps
  ProductField p_restored;  // marginals rho
  ProductField phi;         // sqrt(P_eps)
  double eps = 0.0;
  double kinetic = 0.0;
  double kinetic_bound = 0.0;
  double cost = 0.0;             // cost of the smoothed plan
  double recombined_cost = 0.0;  // cost of the plan fed into the pipeline (P or P_r)
  bool skipped_infinite_cost = false;  // regularize_general on an infinite-cost plan
};

// The plain pipeline: mollify, restore, take the square root, measure.
SmoothedPlan smooth_plan(const ProductField& plan, const DiscreteDensity& rho, double eps,
                         const CoulombCost& cost);

// Diagonal-strip splitting for plans with mass near the diagonal: split
// P = Q_r + P|_{D_r}, replace the strip by the symmetric optimal plan of the
// rescaled strip marginals, recombine, then run the pipeline at eps = r.
// Plans with an empty strip fall through to the plain pipeline.
SmoothedPlan regularize_general(const ProductField& plan, const DiscreteDensity& rho, double r,
                                const CoulombCost& cost, const SolverParams& params);

// Bounded-Lipschitz distance estimate between two plans over a family of
// smooth random test functions with Lipschitz and sup norm at most 1.
double bl_distance_diagnostic(const ProductField& a, const ProductField& b, std::uint64_t seed,
                              int num_test_functions);

}  // namespace mmot
