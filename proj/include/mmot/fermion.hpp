#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mmot/grid.hpp"

namespace mmot {

enum class AuxVariant { Trig, Smoothstep };

// Transition pair a, b with a^2 + b^2 = 1, b even and supported on |t| < r,
// a odd with a = +/-1 outside, |a'|, |b'| <= k/r. The trig profile achieves
// k = pi/2; the smoothstep profile equalizes the two derivative bounds and
// achieves k = sqrt(2).
struct AuxiliaryPair {
  double r = 0.0;
  double k = 0.0;
  AuxVariant variant = AuxVariant::Trig;
  std::vector<double> sample_t, sample_a, sample_b, sample_da, sample_db;

  double a(double t) const;
  double b(double t) const;
  double da(double t) const;
  double db(double t) const;
};

AuxiliaryPair aux_pair(double r, AuxVariant variant);

// Sign-structure factors at (x, y), d in {3, 4}; a_j, b_j evaluated at x_j - y_j.
// d=3 returns (g_1, g_xi); d=4 returns (g_1, g_2). Both satisfy
// |g_1|^2 + |g_2|^2 = a_1^2 + b_1^2 a_2^2 + ... (telescoping sum).
std::pair<std::complex<double>, std::complex<double>> g_factors(const double* x, const double* y,
                                                                int dim,
                                                                const AuxiliaryPair& aux);

enum class Statistics { Bosonic, Fermionic };

// 2^N-component wavefunction on grid^N. Component index packs the spins with
// particle 1 as the most significant bit.
struct SpinWaveFunction {
  GridSpec grid;
  int arity = 0;
  int dim = 0;
  Statistics statistics = Statistics::Bosonic;
  double alpha = 0.0;              // off-diagonal radius of the source
  double aux_k = 0.0;              // achieved Lipschitz factor
  double gradient_constant = 0.0;  // C in the bound sum |grad psi_s|^2 <= |grad psi|^2 + C/alpha^2 psi^2
  AuxVariant variant = AuxVariant::Trig;
  std::vector<std::vector<std::complex<double>>> components;
  ProductField source;  // psi, real

  std::vector<double> density() const;  // sum_s |psi_s|^2 per cell
  double kinetic() const;               // sum_s int |grad psi_s|^2
};

// psi must be symmetric (to 1e-10) and vanish on D_alpha (|psi| <= 1e-12
// there); aux must be built with r <= alpha / sqrt(d). N in {2,3}, d in {3,4}.
SpinWaveFunction build_fermionic(const ProductField& psi, double alpha,
                                 const AuxiliaryPair& aux);

// Single symmetric component at spin state (0,...,0).
SpinWaveFunction build_bosonic(const ProductField& psi);

struct StatisticsReport {
  double max_antisymmetry_violation = 0.0;  // over all transpositions (fermionic)
  double max_symmetry_violation = 0.0;      // bosonic component symmetry
  double max_density_error = 0.0;           // |sum_s |psi_s|^2 - psi^2| cellwise
  double min_gradient_margin = 0.0;  // min over cells of bound minus measured
  bool antisymmetry_checked = false;
};

StatisticsReport verify_statistics(const SpinWaveFunction& wf);

}  // namespace mmot
