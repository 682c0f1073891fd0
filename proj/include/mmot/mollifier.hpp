#pragma once

#include <utility>
#include <vector>

#include "mmot/grid.hpp"

namespace mmot {

// Compactly supported bump eta(u) = k(d) exp(-1/(1-|u|^2)) on the unit ball,
// with int eta = 1, and its relative gradient energy
//   int |grad eta_eps|^2 / eta_eps = K(d) / eps^2.
struct MollifierSpec {
  int dim = 0;
  double eps = 0.0;
  double normalization = 0.0;    // k(d)
  double energy_constant = 0.0;  // K(d)
};

// (k, K) by adaptive radial quadrature at relative tolerance 1e-10. d in 1..4.
std::pair<double, double> mollifier_constant(int d);

MollifierSpec make_mollifier(int d, double eps);

// Unnormalized bump profile exp(-1/(1-t^2)) for |t| < 1, else 0.
double bump_profile(double t);

// eta_eps(u) = k/eps^d exp(-1/(1-|u/eps|^2)); u given componentwise.
double mollifier_value(const MollifierSpec& m, const double* u);

// Sampled kernel taps for a grid of spacing h: offsets (multi-index) with
// |offset * h| < eps and their unnormalized weights.
struct KernelTaps {
  int dim = 0;
  int reach = 0;                    // max |offset component|
  std::vector<std::vector<int>> offsets;
  std::vector<double> weights;      // bump profile at the offset
};
KernelTaps sample_kernel(int dim, double eps, double h);

// Discrete int |grad eta_eps|^2 / eta_eps over a sampling grid with
// `samples` points across the kernel diameter (finite differences).
double discrete_kernel_energy(int dim, double eps, int samples);

}  // namespace mmot
