#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmot/grid.hpp"

namespace mmot {

// Pairwise repulsive cost sum_{i<j} 1/|x_i - x_j|, singular on the diagonal.
// "Forbid" excludes coincident-cell configurations (infinite cost); "Truncate"
// replaces 1/|x-y| by 4/alpha where |x-y| < alpha/4.
enum class DiagonalPolicy { Forbid, Truncate };

struct CoulombCost {
  int arity = 2;
  int dim = 1;
  DiagonalPolicy policy = DiagonalPolicy::Forbid;
  double trunc_alpha = 0.0;
};

// points: arity x dim, flattened row-major. +infinity on coincident points.
double coulomb_cost(const std::vector<double>& points, int arity, int dim);

// Truncated pair cost: v(x,y) = 1/|x-y| for |x-y| >= alpha/4, else 4/alpha.
double truncated_cost(const std::vector<double>& points, int arity, int dim, double alpha);

// Cost at the centers of a product-grid cell (block cell indices per axis).
double cell_cost(const CoulombCost& cost, const GridSpec& grid, const std::int64_t* blocks);

// sum_X c(X) plan(X) h^{dN}; +infinity if positive mass sits on a forbidden
// coincident cell.
double cost_of_plan(const ProductField& plan, const CoulombCost& cost);

// P(x_1) ... P(x_N); errors if n^{dN} exceeds the cap.
ProductField product_plan(const DiscreteDensity& rho, int arity, std::int64_t cap);

// Average over all N! coordinate-block permutations.
ProductField symmetrize(const ProductField& plan);

// Total plan mass on cells whose center has some pair |x_i - x_j| < alpha.
double diagonal_mass(const ProductField& plan, double alpha);

// Smallest pairwise center distance over cells with plan > 0 (+inf if none).
// diagonal_mass(plan, alpha) == 0 exactly for every alpha <= this gap.
double support_gap(const ProductField& plan);

struct ConcentrationProfile {
  std::vector<double> radii;
  std::vector<double> values;  // mu_rho(t), nondecreasing, in [0, 1]
  double limit_estimate = 0.0;
};

// mu_rho(t) = max over grid-centered closed balls of the contained cell mass.
ConcentrationProfile concentration_profile(const DiscreteDensity& rho,
                                           const std::vector<double>& radii);

// Largest tabulated beta with mu_rho(beta) < 1/(N (N-1)^2) mapped through the
// off-diagonal bound alpha = (1 - 1e-6) 2 beta / (N^2 (N-1)); nullopt when no
// such beta resolves on the grid.
std::optional<double> offdiag_radius(const DiscreteDensity& rho, int arity);

struct HolderBound {
  double bound = 0.0;             // (N choose 2) * (||rho||_p ||f_a||_p' + ||rho||_1 / a)
  double f_norm = 0.0;            // ||f_a||_{L^{p'}}
  double f_radial_integral = 0.0; // its p'-th power, the raw radial integral
  double g_sup = 0.0;             // ||g_a||_inf = 1/a
  double rho_lp = 0.0;
};

HolderBound finite_cost_bound_detail(const DiscreteDensity& rho, int arity, double p, double a);
double finite_cost_bound(const DiscreteDensity& rho, int arity, double p, double a);

}  // namespace mmot
