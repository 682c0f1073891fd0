#include "mmot/gamma_limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "mmot/errors.hpp"

namespace mmot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool weakly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}
bool weakly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

// smallest eps in the table whose alpha >= w, by piecewise-linear
// interpolation on increasing profiles, clamped to the table range. On a
// non-increasing (eroding) profile the smallest admissible eps is the table
// bottom; the sqrt(hbar) branch of the schedule then dominates.
double alpha_inverse(const AlphaProfile& p, double w) {
  const std::size_t n = p.eps.size();
  if (!weakly_increasing(p.alpha)) return p.eps.front();
  if (w <= p.alpha.front()) return p.eps.front();
  if (w > p.alpha.back()) return p.eps.back();
  for (std::size_t i = 1; i < n; ++i) {
    if (p.alpha[i] >= w) {
      const double a0 = p.alpha[i - 1], a1 = p.alpha[i];
      if (a1 == a0) return p.eps[i];
      const double t = (w - a0) / (a1 - a0);
      return p.eps[i - 1] + t * (p.eps[i] - p.eps[i - 1]);
    }
  }
  return p.eps.back();
}

void validate_profile(const AlphaProfile& p) {
  if (p.eps.empty() || p.eps.size() != p.alpha.size())
    throw error("invalid-profile: fermionic schedule needs a nonempty alpha profile");
  for (std::size_t i = 1; i < p.eps.size(); ++i)
    if (p.eps[i] <= p.eps[i - 1])
      throw error("invalid-profile: eps column must be strictly increasing");
  if (!weakly_increasing(p.alpha) && !weakly_decreasing(p.alpha))
    throw error("invalid-profile: alpha column must be monotone");
}

SpinWaveFunction attach_statistics(const SmoothedPlan& sp, Statistics statistics, double alpha,
                                   int dim) {
  if (statistics == Statistics::Bosonic) return build_bosonic(sp.phi);
  if (!(alpha > 0.0) || alpha == kInf)
    throw error("fermionic construction: smoothed plan has no off-diagonal support gap");
  AuxiliaryPair aux = aux_pair(alpha / std::sqrt(static_cast<double>(dim)), AuxVariant::Trig);
  return build_fermionic(sp.phi, alpha, aux);
}

}  // namespace

double epsilon_schedule(double hbar, Statistics statistics, const AlphaProfile* profile) {
  if (!(hbar > 0.0)) throw error("epsilon_schedule: hbar must be positive");
  const double root = std::sqrt(hbar);
  if (statistics == Statistics::Bosonic) return root;
  if (profile == nullptr)
    throw error("invalid-profile: fermionic schedule needs a nonempty alpha profile");
  validate_profile(*profile);
  return std::max(root, alpha_inverse(*profile, root));
}

double vee_of(const SpinWaveFunction& wf, const CoulombCost& cost) {
  ProductField dens;
  dens.grid = wf.grid;
  dens.arity = wf.arity;
  dens.values = wf.density();
  const double mass = dens.mass();
  if (std::abs(mass - 1.0) > 1e-8)
    throw error("vee_of: wavefunction density does not integrate to 1");
  return cost_of_plan(dens, cost);
}

HkResult hk_upper_bound(const DiscreteDensity& rho, double hbar, Statistics statistics,
                        const CoulombCost& cost, const SolverParams& params,
                        PlanSolution* solution) {
  if (!(hbar > 0.0)) throw error("hk_upper_bound: hbar must be positive");
  PlanSolution local;
  PlanSolution* sol = solution ? solution : &local;
  if (sol->plan.values.empty()) {
    std::int64_t vars = 1;
    for (int a = 0; a < rho.grid.dim * cost.arity; ++a) vars *= rho.grid.points_per_axis;
    const SolveMethod method = vars <= params.cap ? SolveMethod::ExactLp : SolveMethod::Entropic;
    *sol = solve_mmot(rho, cost.arity, method, cost, params);
    if (!sol->feasible) throw error("hk_upper_bound: no admissible transport plan");
    sol->plan = symmetrize(sol->plan);
  }

  // sqrt(hbar), clamped so the kernel stays resolved on this grid; for the
  // fermionic branch a caller with a measured profile goes through sweep()
  HkResult out;
  const double two_h = 2.0 * rho.grid.spacing;
  out.eps = std::max(std::sqrt(hbar), two_h);
  SmoothedPlan sp = smooth_plan(sol->plan, rho, out.eps, cost);
  out.alpha = support_gap(sp.p_restored);
  SpinWaveFunction wf = attach_statistics(sp, statistics, out.alpha, rho.grid.dim);
  out.kinetic_term = 0.5 * hbar * hbar * wf.kinetic();
  out.interaction_term = vee_of(wf, cost);
  out.upper_bound = out.kinetic_term + out.interaction_term;
  return out;
}

SweepReport sweep(const DiscreteDensity& rho, const std::vector<double>& hbars,
                  Statistics statistics, const CoulombCost& cost, const SolverParams& params,
                  const std::string& density_descriptor) {
  if (hbars.empty()) throw error("sweep: empty hbar schedule");
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    if (!(hbars[i] > 0.0)) throw error("sweep: hbar must be positive");
    if (i > 0 && hbars[i] >= hbars[i - 1])
      throw error("sweep: hbar schedule must be sorted descending");
  }

  SweepReport rep;
  rep.statistics = statistics;
  rep.density_descriptor = density_descriptor;

  std::int64_t vars = 1;
  for (int a = 0; a < rho.grid.dim * cost.arity; ++a) vars *= rho.grid.points_per_axis;
  const SolveMethod method = vars <= params.cap ? SolveMethod::ExactLp : SolveMethod::Entropic;
  rep.provenance = method == SolveMethod::ExactLp ? "exact-lp" : "entropic";
  PlanSolution sol = solve_mmot(rho, cost.arity, method, cost, params);
  if (!sol.feasible) throw error("sweep: no admissible transport plan");
  if (!sol.converged) throw convergence_error("sweep: reference solve did not converge");
  sol.plan = symmetrize(sol.plan);
  rep.c_ref = sol.cost;

  const double two_h = 2.0 * rho.grid.spacing;
  std::map<double, SmoothedPlan> cache;
  auto smoothed_at = [&](double eps) -> const SmoothedPlan& {
    auto it = cache.find(eps);
    if (it == cache.end()) it = cache.emplace(eps, smooth_plan(sol.plan, rho, eps, cost)).first;
    return it->second;
  };

  // measured support-gap profile over the clamped sqrt(hbar) candidates
  AlphaProfile profile;
  if (statistics == Statistics::Fermionic) {
    std::vector<double> cands;
    for (double hbar : hbars) cands.push_back(std::max(std::sqrt(hbar), two_h));
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (double eps : cands) {
      profile.eps.push_back(eps);
      profile.alpha.push_back(support_gap(smoothed_at(eps).p_restored));
    }
  }

  for (double hbar : hbars) {
    try {
      double eps;
      if (statistics == Statistics::Fermionic) {
        eps = std::max(epsilon_schedule(hbar, statistics, &profile), two_h);
      } else {
        eps = std::max(epsilon_schedule(hbar, statistics, nullptr), two_h);
      }
      const SmoothedPlan& sp = smoothed_at(eps);
      const double alpha = support_gap(sp.p_restored);
      SpinWaveFunction wf = attach_statistics(sp, statistics, alpha, rho.grid.dim);
      SweepRow row;
      row.hbar = hbar;
      row.eps = eps;
      row.alpha = alpha == kInf ? 0.0 : alpha;
      row.kinetic = 0.5 * hbar * hbar * wf.kinetic();
      row.vee = vee_of(wf, cost);
      row.upper = row.kinetic + row.vee;
      row.c_ref = rep.c_ref;
      row.gap = row.upper - rep.c_ref;
      rep.rows.push_back(row);
    } catch (const error&) {
      rep.complete = false;
      break;
    }
  }
  return rep;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "hbar,eps,alpha,T,Vee,F_upper,C_ref,gap\n";
  char buf[256];
  for (const SweepRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.hbar,
                  r.eps, r.alpha, r.kinetic, r.vee, r.upper, r.c_ref, r.gap);
    out += buf;
  }
  return out;
}

}  // namespace mmot
