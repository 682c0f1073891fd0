#pragma once

#include <cmath>
#include <vector>

#include "mmot/coulomb.hpp"
#include "mmot/grid.hpp"
#include "mmot/rng.hpp"

namespace testutil {

// compactly supported C^1 bump: (1 - u^2)^2 on |u| < 1
inline double bump(double u) {
  const double q = 1.0 - u * u;
  return q > 0.0 ? q * q : 0.0;
}

// two-bump density with exact-zero tails, centers +/- c, half-width w
inline mmot::DiscreteDensity two_bump_1d(int n, double box, double c, double w) {
  mmot::GridSpec g = mmot::build_grid(1, -box, box, n);
  mmot::DensitySpec spec;
  spec.kind = mmot::DensitySpec::Kind::Values;
  spec.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.center(0, i);
    spec.values[i] = bump((x + c) / w) + bump((x - c) / w);
  }
  return mmot::ingest_density(g, spec);
}

inline mmot::DiscreteDensity random_density(const mmot::GridSpec& g, mmot::Rng& rng,
                                            double zero_fraction = 0.0) {
  mmot::DensitySpec spec;
  spec.kind = mmot::DensitySpec::Kind::Values;
  spec.values.resize(g.cells());
  for (auto& v : spec.values) {
    v = rng.next_double() < zero_fraction ? 0.0 : 0.05 + rng.next_double();
  }
  return mmot::ingest_density(g, spec);
}

// random symmetric plan of unit mass supported off the diagonal strip D_alpha
// (1-d, N = 2), built from smooth bumps in the product square
inline mmot::ProductField random_offdiag_plan(const mmot::GridSpec& g, double alpha,
                                              mmot::Rng& rng, int bumps = 4) {
  const int n = g.points_per_axis;
  mmot::ProductField plan;
  plan.grid = g;
  plan.arity = 2;
  plan.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int b = 0; b < bumps; ++b) {
    const double ci = rng.uniform(0.0, n);
    const double cj = rng.uniform(0.0, n);
    const double s = rng.uniform(1.5, 3.0);
    const double w = 0.2 + rng.next_double();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        plan.values[i * n + j] +=
            w * std::exp(-((i - ci) * (i - ci) + (j - cj) * (j - cj)) / (2.0 * s * s));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(g.center(0, i) - g.center(0, j)) < alpha) plan.values[i * n + j] = 0.0;
  plan = mmot::symmetrize(plan);
  const double m = plan.mass();
  for (auto& v : plan.values) v /= m;
  return plan;
}

}  // namespace testutil
