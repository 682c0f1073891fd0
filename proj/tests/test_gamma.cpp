#include <doctest.h>

#include <cmath>

#include "mmot/errors.hpp"
#include "mmot/gamma_limit.hpp"
#include "mmot/rng.hpp"
#include "helpers.hpp"

using namespace mmot;

namespace {
CoulombCost forbid(int arity, int dim) {
  return CoulombCost{arity, dim, DiagonalPolicy::Forbid, 0.0};
}
}  // namespace

TEST_CASE("epsilon schedule") {
  CHECK(epsilon_schedule(0.01, Statistics::Bosonic, nullptr) == doctest::Approx(0.1));
  CHECK_THROWS_AS(epsilon_schedule(0.0, Statistics::Bosonic, nullptr), error);

  // synthetic increasing profile alpha(eps) = eps / 2
  AlphaProfile prof;
  for (double e = 0.05; e <= 2.0; e += 0.05) {
    prof.eps.push_back(e);
    prof.alpha.push_back(e / 2.0);
  }
  const double hbar = 0.04;  // sqrt = 0.2, alpha^-1(0.2) = 0.4
  CHECK(epsilon_schedule(hbar, Statistics::Fermionic, &prof) ==
        doctest::Approx(2.0 * std::sqrt(hbar)).epsilon(1e-12));

  // the schedule vanishes with hbar (clamped to the table bottom)
  CHECK(epsilon_schedule(1e-12, Statistics::Fermionic, &prof) <= 0.05 + 1e-12);

  // flat measured profiles are accepted; the sqrt branch dominates
  AlphaProfile flat;
  flat.eps = {0.1, 0.2, 0.4};
  flat.alpha = {0.9, 0.9, 0.9};
  CHECK(epsilon_schedule(0.09, Statistics::Fermionic, &flat) == doctest::Approx(0.3));

  AlphaProfile bad;
  bad.eps = {0.1, 0.2, 0.3};
  bad.alpha = {0.1, 0.3, 0.2};  // non-monotone
  CHECK_THROWS_AS(epsilon_schedule(0.01, Statistics::Fermionic, &bad), error);
  AlphaProfile empty;
  CHECK_THROWS_AS(epsilon_schedule(0.01, Statistics::Fermionic, &empty), error);
  CHECK_THROWS_AS(epsilon_schedule(0.01, Statistics::Fermionic, nullptr), error);
}

TEST_CASE("vee equals the plan cost of the attached density") {
  DiscreteDensity rho = testutil::two_bump_1d(32, 1.5, 0.5, 0.3);
  SolverParams params;
  PlanSolution sol = solve_mmot(rho, 2, SolveMethod::ExactLp, forbid(2, 1), params);
  REQUIRE(sol.feasible);
  ProductField plan = symmetrize(sol.plan);
  const double eps = 2.0 * rho.grid.spacing;
  SmoothedPlan sp = smooth_plan(plan, rho, eps, forbid(2, 1));
  SpinWaveFunction wf = build_bosonic(sp.phi);
  CHECK(vee_of(wf, forbid(2, 1)) == doctest::Approx(sp.cost).epsilon(1e-12));
}

TEST_CASE("vee of two disjoint unit-separated bumps is about one") {
  // symmetrized product of bumps centered 1 apart
  GridSpec g = build_grid(1, -1.0, 1.0, 64);
  const int n = 64;
  ProductField plan;
  plan.grid = g;
  plan.arity = 2;
  plan.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto bump_at = [&](double x, double c) { return testutil::bump((x - c) / 0.12); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double xi = g.center(0, i), xj = g.center(0, j);
      plan.values[i * n + j] =
          bump_at(xi, -0.5) * bump_at(xj, 0.5) + bump_at(xi, 0.5) * bump_at(xj, -0.5);
    }
  const double mass = plan.mass();
  for (double& v : plan.values) v /= mass;
  ProductField psi = plan;
  for (double& v : psi.values) v = std::sqrt(v);
  SpinWaveFunction wf = build_bosonic(psi);
  const double vee = vee_of(wf, forbid(2, 1));

  // direct quadrature oracle on the same analytic bumps, fine grid
  double num = 0.0, den = 0.0;
  const int m = 1500;
  const double h = 2.0 / m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = -1.0 + (i + 0.5) * h, y = -1.0 + (j + 0.5) * h;
      const double p = bump_at(x, -0.5) * bump_at(y, 0.5) + bump_at(x, 0.5) * bump_at(y, -0.5);
      if (x == y) continue;
      num += p / std::abs(x - y);
      den += p;
    }
  const double oracle = num / den;
  CHECK(oracle == doctest::Approx(1.0).epsilon(0.05));
  CHECK(vee == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("bosonic and fermionic wavefunctions with one density share vee") {
  GridSpec g = build_grid(3, 0.0, 1.0, 4);
  const double alpha = 0.4;
  // reuse the fermionic test field: symmetric, off-diagonal
  ProductField psi;
  {
    ProductField plan;
    plan.grid = g;
    plan.arity = 2;
    std::int64_t total = 1;
    for (int a = 0; a < 6; ++a) total *= 4;
    plan.values.assign(total, 0.0);
    std::vector<int> digits(6);
    for (std::int64_t i = 0; i < total; ++i) {
      decode_index(i, 4, 6, digits.data());
      double x[3], y[3];
      for (int a = 0; a < 3; ++a) {
        x[a] = g.center(a, digits[a]);
        y[a] = g.center(a, digits[3 + a]);
      }
      double t = 0.0;
      for (int a = 0; a < 3; ++a) t += (x[a] - y[a]) * (x[a] - y[a]);
      if (std::sqrt(t) < 2.0 * alpha) continue;
      plan.values[i] = 1.0;
    }
    const double mass = plan.mass();
    for (double& v : plan.values) v /= mass;
    psi = plan;
    for (double& v : psi.values) v = std::sqrt(v);
  }
  SpinWaveFunction bos = build_bosonic(psi);
  AuxiliaryPair aux = aux_pair(alpha / std::sqrt(3.0), AuxVariant::Trig);
  SpinWaveFunction fer = build_fermionic(psi, alpha, aux);
  const double vb = vee_of(bos, forbid(2, 3));
  const double vf = vee_of(fer, forbid(2, 3));
  CHECK(vb == doctest::Approx(vf).epsilon(1e-10));
}

TEST_CASE("hk upper bound, bosonic") {
  DiscreteDensity rho = testutil::two_bump_1d(48, 1.2, 0.5, 0.25);
  SolverParams params;
  const double hbar = 1e-3;
  HkResult hk = hk_upper_bound(rho, hbar, Statistics::Bosonic, forbid(2, 1), params);
  CHECK(hk.kinetic_term >= 0.0);
  const double h1 = sqrt_density_h1(rho);
  auto [k, K] = mollifier_constant(1);
  (void)k;
  CHECK(hk.kinetic_term <= hbar * hbar * h1 + K * 2.0 * hbar / 8.0 + 1e-12);
  CHECK_THROWS_AS(hk_upper_bound(rho, 0.0, Statistics::Bosonic, forbid(2, 1), params), error);

  PlanSolution ref = solve_mmot(rho, 2, SolveMethod::ExactLp, forbid(2, 1), params);
  CHECK(hk.upper_bound >= ref.cost - 1e-9);
}

TEST_CASE("bosonic sweep smoke") {
  DiscreteDensity rho = testutil::two_bump_1d(48, 1.2, 0.5, 0.25);
  SolverParams params;
  SweepReport rep = sweep(rho, {1e-1, 1e-2, 1e-3}, Statistics::Bosonic, forbid(2, 1), params,
                          "two-bump test");
  REQUIRE(rep.complete);
  REQUIRE(rep.rows.size() == 3);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].kinetic >= 0.0);
    CHECK(rep.rows[i].vee >= rep.c_ref - 1e-6 * rep.c_ref);
    CHECK(rep.rows[i].upper >= rep.c_ref - 1e-6 * rep.c_ref);
    if (i > 0) CHECK(rep.rows[i].gap <= rep.rows[i - 1].gap + 1e-6 * rep.c_ref);
  }
  const std::string csv = sweep_csv(rep);
  CHECK(csv.rfind("hbar,eps,alpha,T,Vee,F_upper,C_ref,gap\n", 0) == 0);
  CHECK_THROWS_AS(sweep(rho, {1e-3, 1e-1}, Statistics::Bosonic, forbid(2, 1), params, ""), error);
}

TEST_CASE("bosonic and fermionic sweeps share the limit") {
  // same density, both statistics: identical C_ref and final gaps within 2x
  GridSpec g = build_grid(3, -1.0, 1.0, 4);
  DensitySpec spec;
  spec.kind = DensitySpec::Kind::Values;
  spec.values.assign(g.cells(), 0.0);
  std::vector<double> x(3);
  double mA = 0.0, mB = 0.0;
  std::vector<std::int64_t> lumpB;
  for (std::int64_t i = 0; i < g.cells(); ++i) {
    cell_coordinates(g, i, x.data());
    bool inA = true, inB = true;
    for (int a = 0; a < 3; ++a) {
      if (x[a] > -0.5) inA = false;
      if (x[a] < 0.5) inB = false;
    }
    if (inA) {
      spec.values[i] = 1.0 + 0.2 * std::sin(2.0 * (x[0] + x[1] + 2.0 * x[2]));
      mA += spec.values[i];
    }
    if (inB) {
      spec.values[i] = 1.0 + 0.2 * std::cos(3.0 * (x[0] - x[1] - x[2]));
      mB += spec.values[i];
      lumpB.push_back(i);
    }
  }
  for (std::int64_t i : lumpB) spec.values[i] *= mA / mB;
  DiscreteDensity rho = ingest_density(g, spec);
  SolverParams params;
  const std::vector<double> hbars{1e-2, 1e-3, 1e-4};
  SweepReport bos = sweep(rho, hbars, Statistics::Bosonic, forbid(2, 3), params, "");
  SweepReport fer = sweep(rho, hbars, Statistics::Fermionic, forbid(2, 3), params, "");
  REQUIRE(bos.complete);
  REQUIRE(fer.complete);
  CHECK(bos.c_ref == fer.c_ref);
  const double gb = bos.rows.back().gap, gf = fer.rows.back().gap;
  CHECK(gf <= 2.0 * gb);
  CHECK(gb <= 2.0 * gf);
}
