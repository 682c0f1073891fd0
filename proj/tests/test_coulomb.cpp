#include <doctest.h>

#include <cmath>
#include <limits>

#include "mmot/coulomb.hpp"
#include "mmot/errors.hpp"
#include "mmot/rng.hpp"
#include "helpers.hpp"

using namespace mmot;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("coulomb_cost point evaluations") {
  CHECK(coulomb_cost({0.0, 1.0}, 2, 1) == doctest::Approx(1.0));
  CHECK(coulomb_cost({0.0, 1.0, 2.0}, 3, 1) == doctest::Approx(2.5));
  CHECK(coulomb_cost({0.3, 0.3}, 2, 1) == kInf);
  CHECK(coulomb_cost({0.0, 0.0, 0.0, 1.0, 1.0, 1.0}, 2, 3) ==
        doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("truncated_cost") {
  // both branches agree at the cut
  const double alpha = 0.8;
  CHECK(truncated_cost({0.0, alpha / 4.0}, 2, 1, alpha) == doctest::Approx(4.0 / alpha));
  CHECK(truncated_cost({0.0, 0.0}, 2, 1, 1.0) == doctest::Approx(4.0));
  // far apart it equals the coulomb cost
  CHECK(truncated_cost({0.0, 1.0, 2.0}, 3, 1, 0.5) ==
        doctest::Approx(coulomb_cost({0.0, 1.0, 2.0}, 3, 1)));
  CHECK_THROWS_AS(truncated_cost({0.0, 1.0}, 2, 1, -1.0), error);
}

TEST_CASE("product plan and plan cost") {
  GridSpec g = build_grid(1, 0.0, 2.0, 2);  // centers 0.5 and 1.5
  DiscreteDensity rho;
  rho.grid = g;
  rho.values = {0.5, 0.5};  // masses 1/2 each
  ProductField pp = product_plan(rho, 2, 100);
  // four entries, density rho(x) rho(y) = 0.25
  for (double v : pp.values) CHECK(v == doctest::Approx(0.25));
  CHECK_THROWS_AS(product_plan(rho, 3, 4), cap_error);

  CoulombCost forbid{2, 1, DiagonalPolicy::Forbid, 0.0};
  CHECK(cost_of_plan(pp, forbid) == kInf);
  CoulombCost trunc{2, 1, DiagonalPolicy::Truncate, 1.0};
  CHECK(std::isfinite(cost_of_plan(pp, trunc)));

  // plan supported off D_alpha: forbid cost equals the truncated integral
  ProductField off = pp;
  off.values[0] = off.values[3] = 0.0;  // keep only (0,1) and (1,0)
  CHECK(cost_of_plan(off, forbid) == doctest::Approx(cost_of_plan(off, trunc)).epsilon(1e-12));
}

TEST_CASE("symmetrize") {
  GridSpec g = build_grid(1, 0.0, 1.0, 4);
  ProductField pm;
  pm.grid = g;
  pm.arity = 2;
  pm.values.assign(16, 0.0);
  pm.values[1 * 4 + 3] = 16.0;  // unit mass at (1, 3)
  ProductField sym = symmetrize(pm);
  CHECK(sym.values[1 * 4 + 3] == doctest::Approx(8.0));
  CHECK(sym.values[3 * 4 + 1] == doctest::Approx(8.0));

  ProductField twice = symmetrize(sym);
  for (std::size_t i = 0; i < sym.values.size(); ++i)
    CHECK(twice.values[i] == doctest::Approx(sym.values[i]).epsilon(1e-15));

  // cost preservation on a random feasible plan
  Rng rng(5);
  ProductField rp = testutil::random_offdiag_plan(build_grid(1, 0.0, 1.0, 8), 0.0, rng);
  CoulombCost trunc{2, 1, DiagonalPolicy::Truncate, 0.3};
  const double c0 = cost_of_plan(rp, trunc);
  CHECK(cost_of_plan(symmetrize(rp), trunc) == doctest::Approx(c0).epsilon(1e-12));
}

TEST_CASE("cost is invariant under coordinate permutations") {
  GridSpec g = build_grid(1, 0.0, 1.0, 4);
  Rng rng(17);
  ProductField p = testutil::random_offdiag_plan(g, 0.25, rng);
  CoulombCost forbid{2, 1, DiagonalPolicy::Forbid, 0.0};
  // swap the two blocks by hand
  ProductField swapped = p;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) swapped.values[j * 4 + i] = p.values[i * 4 + j];
  CHECK(cost_of_plan(swapped, forbid) == doctest::Approx(cost_of_plan(p, forbid)).epsilon(1e-12));
}

TEST_CASE("diagonal mass and support gap") {
  GridSpec g = build_grid(1, 0.0, 2.0, 2);
  ProductField anti;
  anti.grid = g;
  anti.arity = 2;
  anti.values = {0.0, 0.5, 0.5, 0.0};
  CHECK(diagonal_mass(anti, 0.5) == 0.0);
  CHECK(support_gap(anti) == doctest::Approx(1.0));

  DiscreteDensity rho;
  rho.grid = g;
  rho.values = {0.5, 0.5};
  ProductField pp = product_plan(rho, 2, 100);
  CHECK(diagonal_mass(pp, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("concentration profile") {
  // exact staircase value: h = 0.04, t = 0.1 catches five cells of mass 0.04
  GridSpec g = build_grid(1, 0.0, 1.0, 25);
  DensitySpec u;
  u.kind = DensitySpec::Kind::UniformBox;
  u.lo = {0.0};
  u.hi = {1.0};
  DiscreteDensity rho = ingest_density(g, u);
  ConcentrationProfile prof = concentration_profile(rho, {0.1, 0.2});
  CHECK(prof.values[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(prof.values[1] >= prof.values[0]);

  // a cell holding half the mass keeps mu above 1/2 at any radius
  DiscreteDensity lump;
  lump.grid = g;
  lump.values.assign(25, 0.5 / (24 * g.spacing));
  lump.values[10] = 0.5 / g.spacing;
  ConcentrationProfile lp = concentration_profile(lump, {0.04, 0.2, 0.6});
  for (double v : lp.values) CHECK(v >= 0.5 - 1e-12);

  // resolved densities concentrate to zero with the grid
  DiscreteDensity fine = ingest_density(build_grid(1, 0.0, 1.0, 200), u);
  ConcentrationProfile fp = concentration_profile(fine, {0.005});
  CHECK(fp.limit_estimate < 0.02);

  CHECK_THROWS_AS(concentration_profile(rho, {-0.1}), error);
  CHECK_THROWS_AS(concentration_profile(rho, {0.2, 0.1}), error);
}

TEST_CASE("offdiag_radius") {
  GridSpec g = build_grid(1, 0.0, 1.0, 16);
  DensitySpec u;
  u.kind = DensitySpec::Kind::UniformBox;
  u.lo = {0.0};
  u.hi = {1.0};
  DiscreteDensity rho = ingest_density(g, u);

  // N = 2: threshold 1/2, alpha just below beta/2
  auto a2 = offdiag_radius(rho, 2);
  REQUIRE(a2.has_value());
  ConcentrationProfile prof = concentration_profile(rho, {*a2 * 2.0 / (1.0 - 1e-6)});
  CHECK(prof.values[0] < 0.5);

  // N = 3: threshold 1/12, alpha just below beta/9
  auto a3 = offdiag_radius(rho, 3);
  REQUIRE(a3.has_value());
  const double beta3 = *a3 * 9.0 / (1.0 - 1e-6);
  ConcentrationProfile prof3 = concentration_profile(rho, {beta3});
  CHECK(prof3.values[0] < 1.0 / 12.0);
  CHECK(*a3 < *a2);

  // a point mass concentrates everything: no certificate
  DiscreteDensity pm;
  pm.grid = g;
  pm.values.assign(16, 0.0);
  pm.values[7] = 1.0 / g.spacing;
  CHECK(!offdiag_radius(pm, 2).has_value());
}

TEST_CASE("finite_cost_bound") {
  // uniform density on the unit ball in d = 3
  GridSpec g = build_grid(3, -1.2, 1.2, 12);
  DensitySpec spec;
  spec.kind = DensitySpec::Kind::Values;
  spec.values.assign(g.cells(), 0.0);
  std::vector<double> x(3);
  for (std::int64_t i = 0; i < g.cells(); ++i) {
    cell_coordinates(g, i, x.data());
    if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < 1.0) spec.values[i] = 1.0;
  }
  DiscreteDensity rho = ingest_density(g, spec);

  // brute-force oracle: sup over grid cells of sum rho(y) h^3 / |x - y|
  double sup = 0.0;
  const std::int64_t cells = g.cells();
  std::vector<double> xs(cells * 3);
  for (std::int64_t i = 0; i < cells; ++i) cell_coordinates(g, i, &xs[i * 3]);
  for (std::int64_t i = 0; i < cells; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < cells; ++j) {
      if (i == j || rho.values[j] == 0.0) continue;
      double q = 0.0;
      for (int a = 0; a < 3; ++a) {
        const double d = xs[i * 3 + a] - xs[j * 3 + a];
        q += d * d;
      }
      acc += rho.values[j] * g.cell_volume() / std::sqrt(q);
    }
    sup = std::max(sup, acc);
  }
  // the analytic sup of the uniform-ball potential is 3/2 at the center
  CHECK(sup == doctest::Approx(1.5).epsilon(0.05));

  HolderBound hb = finite_cost_bound_detail(rho, 2, 3.0, 1.0);
  CHECK(hb.g_sup == doctest::Approx(1.0));
  CHECK(hb.bound >= sup);

  // the bound blows up as the split radius vanishes
  CHECK(finite_cost_bound(rho, 2, 3.0, 1e-6) > 1e5);

  // interior minimum over a still dominates the product-plan pair estimate
  double best = kInf;
  double best_a = 0.0;
  for (double a = 0.05; a <= 4.0; a *= 1.1) {
    const double v = finite_cost_bound(rho, 2, 3.0, a);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  CHECK(best_a > 0.06);
  CHECK(best_a < 3.5);
  CHECK(best >= sup);

  CHECK_THROWS_AS(finite_cost_bound(rho, 2, 1.2, 1.0), error);  // p below d/(d-1)
}
