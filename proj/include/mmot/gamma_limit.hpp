#pragma once

#include <string>
#include <vector>

#include "mmot/coulomb.hpp"
#include "mmot/fermion.hpp"
#include "mmot/grid.hpp"
#include "mmot/smoothing.hpp"
#include "mmot/solver.hpp"

namespace mmot {

// Measured support gaps alpha(eps_i) of the smoothed plans, sorted by eps.
struct AlphaProfile {
  std::vector<double> eps;
  std::vector<double> alpha;
};

// Bosonic: eps = sqrt(hbar). Fermionic: max of sqrt(hbar) and the smallest
// tabulated eps whose alpha(eps) >= sqrt(hbar) (piecewise-linear inverse,
// clamped to the table range). The profile must be weakly monotone.
double epsilon_schedule(double hbar, Statistics statistics, const AlphaProfile* profile);

// Electron-electron interaction energy of a wavefunction: cost against the
// spin-summed density. Infinite if the density touches a forbidden cell.
double vee_of(const SpinWaveFunction& wf, const CoulombCost& cost);

struct HkResult {
  double kinetic_term = 0.0;      // T_hbar = (hbar^2/2) sum_s int |grad psi_s|^2
  double interaction_term = 0.0;  // V_ee
  double upper_bound = 0.0;       // T + V
  double eps = 0.0;
  double alpha = 0.0;  // measured support gap of the smoothed plan
};

// Solve, smooth at the scheduled eps (clamped to >= 2h so the kernel stays
// resolved), attach statistics, and evaluate the Hohenberg-Kohn upper bound.
// When `solution` is non-null it is reused (or filled on first call).
HkResult hk_upper_bound(const DiscreteDensity& rho, double hbar, Statistics statistics,
                        const CoulombCost& cost, const SolverParams& params,
                        PlanSolution* solution = nullptr);

struct SweepRow {
  double hbar, eps, alpha, kinetic, vee, upper, c_ref, gap;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  Statistics statistics = Statistics::Bosonic;
  std::string density_descriptor;
  std::string provenance;  // solver of C_ref
  double c_ref = 0.0;
  bool complete = true;
};

// One row per hbar (sorted descending); C_ref solved once.
SweepReport sweep(const DiscreteDensity& rho, const std::vector<double>& hbars,
                  Statistics statistics, const CoulombCost& cost, const SolverParams& params,
                  const std::string& density_descriptor = "");

// CSV with the fixed header hbar,eps,alpha,T,Vee,F_upper,C_ref,gap (17 significant digits).
std::string sweep_csv(const SweepReport& report);

}  // namespace mmot
