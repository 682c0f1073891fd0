#include "mmot/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"
#include "mmot/lp.hpp"

namespace mmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probability(const DiscreteDensity& rho) {
  for (double v : rho.values)
    if (v < 0.0) throw error("solve_mmot: density has negative entries");
  if (std::abs(rho.mass() - 1.0) > 1e-10)
    throw error("solve_mmot: density mass is not 1");
}

// Pairwise cost matrix between cells; +inf on the diagonal under Forbid.
std::vector<double> pair_cost_matrix(const GridSpec& g, const CoulombCost& cost) {
  const std::int64_t cells = g.cells();
  std::vector<double> xs(cells * g.dim);
  for (std::int64_t i = 0; i < cells; ++i) cell_coordinates(g, i, &xs[i * g.dim]);
  std::vector<double> v(cells * cells);
  for (std::int64_t i = 0; i < cells; ++i) {
    for (std::int64_t j = 0; j < cells; ++j) {
      if (i == j) {
        v[i * cells + j] = cost.policy == DiagonalPolicy::Forbid ? kInf : 4.0 / cost.trunc_alpha;
        continue;
      }
      double q = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double d = xs[i * g.dim + a] - xs[j * g.dim + a];
        q += d * d;
      }
      const double r = std::sqrt(q);
      if (cost.policy == DiagonalPolicy::Truncate && r < cost.trunc_alpha / 4.0)
        v[i * cells + j] = 4.0 / cost.trunc_alpha;
      else
        v[i * cells + j] = 1.0 / r;
    }
  }
  return v;
}

std::vector<double> marginal_residuals(const ProductField& plan, const DiscreteDensity& rho) {
  std::vector<double> res(plan.arity, 0.0);
  const double vol = plan.grid.cell_volume();
  for (int a = 1; a <= plan.arity; ++a) {
    DiscreteDensity m = marginal(plan, a);
    double l1 = 0.0;
    for (std::int64_t i = 0; i < plan.grid.cells(); ++i)
      l1 += std::abs(m.values[i] - rho.values[i]) * vol;
    res[a - 1] = l1;
  }
  return res;
}

PlanSolution solve_exact(const DiscreteDensity& rho, int arity, const CoulombCost& cost,
                         const SolverParams& params) {
  const GridSpec& g = rho.grid;
  const std::int64_t cells = g.cells();
  std::int64_t total = 1;
  for (int a = 0; a < g.dim * arity; ++a) total *= g.points_per_axis;
  if (total > params.cap)
    throw cap_error("solve_mmot: exact instance exceeds the variable cap");

  // restrict the program to support cells: zero-mass cells force every
  // touching variable to zero and only add degenerate rows
  std::vector<std::int32_t> support;
  for (std::int64_t r = 0; r < cells; ++r)
    if (rho.values[r] > 0.0) support.push_back(static_cast<std::int32_t>(r));
  const int ns = static_cast<int>(support.size());

  const double vol = g.cell_volume();
  TransportLp lp;
  lp.axes = arity;
  lp.cells = ns;
  lp.rhs.resize(static_cast<std::size_t>(arity) * ns);
  for (int a = 0; a < arity; ++a)
    for (int r = 0; r < ns; ++r) lp.rhs[a * ns + r] = rho.values[support[r]] * vol;

  // admissible variables: support-cell tuples, minus coincidences under Forbid
  std::vector<std::int64_t> admissible;  // flat product-grid index per variable
  std::array<std::int64_t, 3> blocks{};
  std::array<std::int32_t, 3> compact{};
  std::int64_t tuples = 1;
  for (int b = 0; b < arity; ++b) tuples *= ns;
  for (std::int64_t t = 0; t < tuples; ++t) {
    std::int64_t r = t;
    for (int b = arity - 1; b >= 0; --b) {
      compact[b] = static_cast<std::int32_t>(r % ns);
      blocks[b] = support[compact[b]];
      r /= ns;
    }
    bool ok = true;
    if (cost.policy == DiagonalPolicy::Forbid) {
      for (int i = 0; i < arity && ok; ++i)
        for (int j = i + 1; j < arity; ++j)
          if (blocks[i] == blocks[j]) {
            ok = false;
            break;
          }
    }
    if (!ok) continue;
    std::int64_t flat = 0;
    std::int64_t block_mod = 1;
    for (int a = 0; a < g.dim; ++a) block_mod *= g.points_per_axis;
    for (int b = 0; b < arity; ++b) flat = flat * block_mod + blocks[b];
    admissible.push_back(flat);
    lp.var_cells.push_back(compact);
    lp.cost.push_back(cell_cost(cost, g, blocks.data()));
  }

  LpSolution ls = simplex_solve(lp, params.pivot_limit);
  PlanSolution out;
  out.method = SolveMethod::ExactLp;
  out.iterations = ls.pivots;
  if (ls.status == LpSolution::Status::Infeasible) {
    out.feasible = false;
    out.converged = true;
    out.cost = kInf;
    out.plan.grid = g;
    out.plan.arity = arity;
    out.plan.values.assign(total, 0.0);
    out.marginal_residuals.assign(arity, kInf);
    return out;
  }
  if (ls.status == LpSolution::Status::PivotLimit)
    throw convergence_error("solve_mmot: simplex pivot limit exceeded");

  out.plan.grid = g;
  out.plan.arity = arity;
  out.plan.values.assign(total, 0.0);
  double plan_vol = 1.0;
  for (int a = 0; a < g.dim * arity; ++a) plan_vol *= g.spacing;
  // drop float dust from degenerate vertices; the marginal residuals below
  // certify that nothing of consequence was removed
  double max_mass = 0.0;
  for (double v : ls.x) max_mass = std::max(max_mass, v);
  const double dust = 1e-13 * max_mass;
  for (std::size_t j = 0; j < admissible.size(); ++j) {
    if (ls.x[j] > dust) out.plan.values[admissible[j]] = ls.x[j] / plan_vol;
  }
  out.cost = ls.objective;
  out.marginal_residuals = marginal_residuals(out.plan, rho);
  return out;
}

double logsumexp_pair(const std::vector<double>& terms) {
  double mx = -kInf;
  for (double t : terms) mx = std::max(mx, t);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms)
    if (t != -kInf) s += std::exp(t - mx);
  return mx + std::log(s);
}

PlanSolution solve_entropic(const DiscreteDensity& rho, int arity, const CoulombCost& cost,
                            const SolverParams& params) {
  const GridSpec& g = rho.grid;
  const std::int64_t cells = g.cells();
  const double vol = g.cell_volume();
  if (params.eta_schedule.empty()) throw error("solve_mmot: empty eta schedule");
  if (cells * cells > 64'000'000)
    throw cap_error("solve_mmot: entropic pair kernel exceeds the memory cap");

  std::vector<double> mass(cells);
  for (std::int64_t r = 0; r < cells; ++r) mass[r] = rho.values[r] * vol;
  std::vector<double> logm(cells);
  for (std::int64_t r = 0; r < cells; ++r)
    logm[r] = mass[r] > 0.0 ? std::log(mass[r]) : -kInf;

  const std::vector<double> v = pair_cost_matrix(g, cost);
  std::vector<std::vector<double>> f(arity, std::vector<double>(cells, 0.0));
  for (int a = 0; a < arity; ++a)
    for (std::int64_t r = 0; r < cells; ++r)
      if (mass[r] == 0.0) f[a][r] = -kInf;

  long sweeps = 0;
  double max_res = kInf;
  std::vector<double> res(arity, kInf);
  std::vector<double> terms;

  // log-marginal of axis `a` at cell r, given the other potentials
  auto log_colsum = [&](int a, std::int64_t r, double eta) -> double {
    if (arity == 2) {
      const int o = 1 - a;
      terms.clear();
      for (std::int64_t s = 0; s < cells; ++s) {
        if (f[o][s] == -kInf) continue;
        const double c = a == 0 ? v[r * cells + s] : v[s * cells + r];
        if (c == kInf) continue;
        terms.push_back((f[o][s] - c) / eta);
      }
      return logsumexp_pair(terms);
    }
    // arity == 3
    const int o1 = a == 0 ? 1 : 0;
    const int o2 = a == 2 ? 1 : 2;
    terms.clear();
    for (std::int64_t s = 0; s < cells; ++s) {
      if (f[o1][s] == -kInf) continue;
      for (std::int64_t t = 0; t < cells; ++t) {
        if (f[o2][t] == -kInf) continue;
        // assemble the cost with (a, o1, o2) in their axis order
        std::int64_t cell_of_axis[3];
        cell_of_axis[a] = r;
        cell_of_axis[o1] = s;
        cell_of_axis[o2] = t;
        const double c = v[cell_of_axis[0] * cells + cell_of_axis[1]] +
                         v[cell_of_axis[0] * cells + cell_of_axis[2]] +
                         v[cell_of_axis[1] * cells + cell_of_axis[2]];
        if (c == kInf) continue;
        terms.push_back((f[o1][s] + f[o2][t] - c) / eta);
      }
    }
    return logsumexp_pair(terms);
  };

  for (double eta : params.eta_schedule) {
    if (!(eta > 0.0)) throw error("solve_mmot: eta must be positive");
    for (long it = 0; it < params.max_iterations; ++it) {
      for (int a = 0; a < arity; ++a) {
        for (std::int64_t r = 0; r < cells; ++r) {
          if (mass[r] == 0.0) continue;
          const double lse = log_colsum(a, r, eta);
          // fixed point: f_a(r)/eta + lse = log m(r)
          f[a][r] = (lse == -kInf) ? -kInf : eta * (logm[r] - lse);
        }
      }
      ++sweeps;
      // residuals of the axes other than the last updated one
      max_res = 0.0;
      for (int a = 0; a < arity; ++a) {
        double l1 = 0.0;
        for (std::int64_t r = 0; r < cells; ++r) {
          if (mass[r] == 0.0) continue;
          const double lse = log_colsum(a, r, eta);
          const double marg = lse == -kInf ? 0.0 : std::exp(f[a][r] / eta + lse);
          l1 += std::abs(marg - mass[r]);
        }
        res[a] = l1;
        max_res = std::max(max_res, l1);
      }
      if (max_res <= params.marginal_tol) break;
    }
  }

  // materialize the plan
  std::int64_t total = 1;
  for (int a = 0; a < g.dim * arity; ++a) total *= g.points_per_axis;
  PlanSolution out;
  out.method = SolveMethod::Entropic;
  out.plan.grid = g;
  out.plan.arity = arity;
  out.plan.values.assign(total, 0.0);
  double plan_vol = 1.0;
  for (int a = 0; a < g.dim * arity; ++a) plan_vol *= g.spacing;
  const double eta_final = params.eta_schedule.back();
  double cost_sum = 0.0;
  std::array<std::int64_t, 3> blocks{};
  for (std::int64_t x = 0; x < total; ++x) {
    double lf = 0.0;
    bool dead = false;
    for (int b = 0; b < arity; ++b) {
      blocks[b] = block_cell(x, g, arity, b);
      if (f[b][blocks[b]] == -kInf) dead = true;
      lf += f[b][blocks[b]];
    }
    if (dead) continue;
    double c = 0.0;
    for (int i = 0; i < arity && c != kInf; ++i)
      for (int j = i + 1; j < arity; ++j) c += v[blocks[i] * cells + blocks[j]];
    if (c == kInf) continue;
    const double p = std::exp((lf - c) / eta_final);
    if (p == 0.0) continue;
    out.plan.values[x] = p / plan_vol;
    cost_sum += c * p;
  }
  out.cost = cost_sum;
  out.iterations = sweeps;
  out.converged = max_res <= params.marginal_tol;
  out.marginal_residuals = res;
  return out;
}

}  // namespace

PlanSolution solve_mmot(const DiscreteDensity& rho, int arity, SolveMethod method,
                        const CoulombCost& cost, const SolverParams& params) {
  if (arity < 2 || arity > 3) throw error("solve_mmot: arity must be 2 or 3");
  if (cost.arity != arity || cost.dim != rho.grid.dim)
    throw error("solve_mmot: cost descriptor does not match the instance");
  check_probability(rho);
  if (method == SolveMethod::ExactLp) return solve_exact(rho, arity, cost, params);
  return solve_entropic(rho, arity, cost, params);
}

}  // namespace mmot
