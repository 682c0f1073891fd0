#include <doctest.h>

#include <cmath>
#include <limits>

#include "mmot/errors.hpp"
#include "mmot/solver.hpp"
#include "helpers.hpp"
#include "lp_reference.hpp"

using namespace mmot;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

CoulombCost forbid(int arity) { return CoulombCost{arity, 1, DiagonalPolicy::Forbid, 0.0}; }
}  // namespace

TEST_CASE("two-cell instance: antidiagonal plan of cost 1") {
  GridSpec g = build_grid(1, 0.0, 2.0, 2);  // centers 0.5, 1.5
  DiscreteDensity rho;
  rho.grid = g;
  rho.values = {0.5, 0.5};

  // enumeration oracle: plans are [[t, 1/2 - t], [1/2 - t, t]]; the diagonal is
  // forbidden, so t = 0 and the cost is 1 * 1/|1.5 - 0.5| = 1
  double oracle = kInf;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.5 * k / 100.0;
    if (t > 0.0) continue;  // diagonal mass excluded
    oracle = std::min(oracle, 2.0 * (0.5 - t) * 1.0);
  }
  CHECK(oracle == doctest::Approx(1.0));

  SolverParams params;
  PlanSolution sol = solve_mmot(rho, 2, SolveMethod::ExactLp, forbid(2), params);
  CHECK(sol.feasible);
  CHECK(sol.cost == doctest::Approx(1.0).epsilon(1e-9));
  const double h2 = g.spacing * g.spacing;
  CHECK(sol.plan.values[0 * 2 + 1] * h2 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.plan.values[1 * 2 + 0] * h2 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.plan.values[0] == 0.0);
  CHECK(sol.plan.values[3] == 0.0);
  for (double r : sol.marginal_residuals) CHECK(r <= 1e-12);
}

TEST_CASE("uniform three-cell instance, N = 3") {
  GridSpec g = build_grid(1, 0.0, 3.0, 3);  // centers 0.5, 1.5, 2.5
  DiscreteDensity rho;
  rho.grid = g;
  rho.values.assign(3, 1.0 / 3.0);

  SolverParams params;
  PlanSolution sol = solve_mmot(rho, 3, SolveMethod::ExactLp, forbid(3), params);
  CHECK(sol.feasible);
  // permutations of (0,1,2): distances 1, 1, 2 -> cost 1 + 1 + 1/2
  CHECK(sol.cost == doctest::Approx(2.5).epsilon(1e-9));

  // reference oracle agreement
  auto inst = testutil::build_reference_instance(
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {0.5, 1.5, 2.5}, 3, true);
  auto ref = testutil::reference_simplex(inst.A, inst.b, inst.c, inst.rows, inst.cols);
  CHECK(ref.feasible);
  CHECK(sol.cost == doctest::Approx(ref.objective).epsilon(1e-9));

  // the optimum is supported on permutations of (0, 1, 2)
  double perm_mass = 0.0;
  const double vol = std::pow(g.spacing, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double m = sol.plan.values[(i * 3 + j) * 3 + k] * vol;
        if (i != j && j != k && i != k) perm_mass += m;
      }
  CHECK(perm_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("point mass admits no off-diagonal plan") {
  GridSpec g = build_grid(1, 0.0, 1.0, 4);
  DiscreteDensity rho;
  rho.grid = g;
  rho.values.assign(4, 0.0);
  rho.values[2] = 1.0 / g.spacing;
  SolverParams params;
  PlanSolution sol = solve_mmot(rho, 2, SolveMethod::ExactLp, forbid(2), params);
  CHECK(!sol.feasible);
  CHECK(sol.cost == kInf);
}

TEST_CASE("exact solver agrees with the reference simplex on random instances") {
  Rng rng(2024);
  SolverParams params;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(5));
    const int arity = trial % 2 == 0 ? 2 : 3;
    GridSpec g = build_grid(1, 0.0, static_cast<double>(n), n);
    DiscreteDensity rho = testutil::random_density(g, rng, trial % 3 == 0 ? 0.25 : 0.0);
    PlanSolution sol = solve_mmot(rho, arity, SolveMethod::ExactLp, forbid(arity), params);

    std::vector<double> mass(n), centers(n);
    for (int i = 0; i < n; ++i) {
      mass[i] = rho.values[i] * g.spacing;
      centers[i] = g.center(0, i);
    }
    auto inst = testutil::build_reference_instance(mass, centers, arity, true);
    auto ref = testutil::reference_simplex(inst.A, inst.b, inst.c, inst.rows, inst.cols);
    CHECK(sol.feasible == ref.feasible);
    if (sol.feasible) {
      CHECK(sol.cost == doctest::Approx(ref.objective).epsilon(1e-9));
      // symmetrized optimum stays feasible at the same cost
      ProductField sym = symmetrize(sol.plan);
      CHECK(cost_of_plan(sym, forbid(arity)) == doctest::Approx(sol.cost).epsilon(1e-9));
      for (int a = 1; a <= arity; ++a) {
        DiscreteDensity m = marginal(sym, a);
        for (int i = 0; i < n; ++i)
          CHECK(m.values[i] == doctest::Approx(rho.values[i]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("entropic solver approaches the exact cost as eta decreases") {
  GridSpec g = build_grid(1, 0.0, 5.0, 5);
  Rng rng(99);
  DiscreteDensity rho = testutil::random_density(g, rng);
  SolverParams params;
  PlanSolution exact = solve_mmot(rho, 2, SolveMethod::ExactLp, forbid(2), params);

  double prev = kInf;
  double final_cost = 0.0;
  for (double eta : {1.0, 0.3, 0.1, 0.03, 0.01, 0.003}) {
    SolverParams ep;
    ep.eta_schedule = {eta};
    ep.max_iterations = 20000;
    ep.marginal_tol = 1e-10;
    PlanSolution ent = solve_mmot(rho, 2, SolveMethod::Entropic, forbid(2), ep);
    CHECK(ent.converged);
    for (double r : ent.marginal_residuals) CHECK(r <= 1e-9);
    CHECK(ent.cost <= prev + 1e-9);
    prev = ent.cost;
    final_cost = ent.cost;
  }
  CHECK(final_cost >= exact.cost - 1e-9);
  CHECK(std::abs(final_cost - exact.cost) / exact.cost < 0.01);
}

TEST_CASE("entropic three-marginal smoke") {
  GridSpec g = build_grid(1, 0.0, 4.0, 4);
  DiscreteDensity rho;
  rho.grid = g;
  rho.values.assign(4, 0.25);
  SolverParams ep;
  ep.eta_schedule = {1.0, 0.3, 0.1};
  ep.max_iterations = 5000;
  PlanSolution ent = solve_mmot(rho, 3, SolveMethod::Entropic, forbid(3), ep);
  CHECK(ent.converged);
  CHECK(ent.plan.mass() == doctest::Approx(1.0).epsilon(1e-6));
  SolverParams params;
  PlanSolution exact = solve_mmot(rho, 3, SolveMethod::ExactLp, forbid(3), params);
  CHECK(ent.cost >= exact.cost - 1e-6);
}

TEST_CASE("off-diagonal certificate holds on solved instances") {
  Rng rng(31);
  SolverParams params;
  int certified = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_below(3));
    GridSpec g = build_grid(1, 0.0, 1.0, n);
    DiscreteDensity rho = testutil::random_density(g, rng);
    const int arity = trial % 2 == 0 ? 2 : 3;
    auto alpha = offdiag_radius(rho, arity);
    if (!alpha) continue;
    PlanSolution sol = solve_mmot(rho, arity, SolveMethod::ExactLp, forbid(arity), params);
    REQUIRE(sol.feasible);
    CHECK(diagonal_mass(sol.plan, *alpha) == 0.0);
    ++certified;
  }
  CHECK(certified > 0);
}

TEST_CASE("reported cost matches the plan cost") {
  Rng rng(123);
  SolverParams params;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(4));
    GridSpec g = build_grid(1, 0.0, 1.0, n);
    DiscreteDensity rho = testutil::random_density(g, rng);
    const int arity = trial % 2 == 0 ? 2 : 3;
    PlanSolution sol = solve_mmot(rho, arity, SolveMethod::ExactLp, forbid(arity), params);
    if (!sol.feasible) continue;  // a dominant cell can make N=2 infeasible under forbid
    CHECK(cost_of_plan(sol.plan, forbid(arity)) == doctest::Approx(sol.cost).epsilon(1e-9));
  }
}
