#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mmot {

// Uniform cubic grid on a box in R^d. Cell centers are box_min + (i + 1/2) h;
// every axis shares the same point count n and spacing h.
struct GridSpec {
  int dim = 0;
  int points_per_axis = 0;
  std::vector<double> box_min;
  std::vector<double> box_max;
  double spacing = 0.0;

  std::int64_t cells() const;       // n^dim
  double cell_volume() const;       // h^dim
  double center(int axis, int i) const { return box_min[axis] + (i + 0.5) * spacing; }
  bool same_geometry(const GridSpec& other) const;
};

GridSpec build_grid(int dim, const std::vector<double>& box_min,
                    const std::vector<double>& box_max, int n);
// Cubic convenience: same extent on every axis.
GridSpec build_grid(int dim, double box_min, double box_max, int n);

// Nonnegative grid function, density per unit volume. Operations that require
// a probability density (unit mass) validate it explicitly; marginals of
// sub-plans may carry other total masses.
struct DiscreteDensity {
  GridSpec grid;
  std::vector<double> values;  // n^dim

  double mass() const;  // sum(values) * h^dim
};

// Scalar field on grid^N (plan density or wavefunction amplitude), row-major
// with the last axis fastest; axes group into N blocks of dim coordinates.
struct ProductField {
  GridSpec grid;
  int arity = 0;
  std::vector<double> values;  // n^(dim*arity)

  std::int64_t size() const;
  double mass() const;  // sum(values) * h^(dim*arity)
};

// ---- analytic density sources ----

struct GaussianComponent {
  std::vector<double> mean;  // size dim
  double sigma = 1.0;        // isotropic
  double weight = 1.0;
};

struct DensitySpec {
  enum class Kind { Gaussian, Mixture, UniformBox, Values };
  Kind kind = Kind::Gaussian;
  std::vector<GaussianComponent> components;  // Gaussian: one entry; Mixture: several
  std::vector<double> lo, hi;                 // UniformBox corners
  std::vector<double> values;                 // Values / grid file payload
  double floor_rel = 0.0;  // values below floor_rel * max snap to 0 before renormalization
  std::string describe() const;
};

// Samples the source at cell centers and renormalizes to unit mass.
// Analytic sources must hold >= 1 - 1e-6 of their mass inside the box.
DiscreteDensity ingest_density(const GridSpec& grid, const DensitySpec& spec);

// ---- operations ----

double integrate(const DiscreteDensity& rho);
double integrate(const ProductField& field);

// ||sqrt(rho)||_{H^1}^2 = int rho + int |grad sqrt(rho)|^2, central differences
// in the interior and one-sided at the box boundary.
double sqrt_density_h1(const DiscreteDensity& rho);

// i-th marginal of a plan (axis_i is 1-based); integrates to the plan's mass.
DiscreteDensity marginal(const ProductField& plan, int axis_i);

// Sum over all axes of the squared finite-difference gradient, times the cell
// volume of the full product grid. Shared by sqrt_density_h1 / kinetic_energy.
double grad_energy(const std::vector<double>& values, const GridSpec& grid, int num_axes);

// ---- indexing helpers ----

// Flat index <-> per-axis digits for a row-major field with `axes` axes of
// size n each (last axis fastest).
void decode_index(std::int64_t flat, int n, int axes, int* digits);
std::int64_t encode_index(const int* digits, int n, int axes);

// Cell index of one block (d consecutive axes) of a product-field flat index.
std::int64_t block_cell(std::int64_t flat, const GridSpec& grid, int arity, int block);

// Coordinates of a density cell (flat index over n^dim).
void cell_coordinates(const GridSpec& grid, std::int64_t cell, double* out);

}  // namespace mmot
