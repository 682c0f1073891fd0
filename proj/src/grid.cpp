#include "mmot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mmot/errors.hpp"

namespace mmot {

std::int64_t GridSpec::cells() const {
  std::int64_t c = 1;
  for (int a = 0; a < dim; ++a) c *= points_per_axis;
  return c;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing;
  return v;
}

bool GridSpec::same_geometry(const GridSpec& other) const {
  if (dim != other.dim || points_per_axis != other.points_per_axis) return false;
  for (int a = 0; a < dim; ++a) {
    if (box_min[a] != other.box_min[a] || box_max[a] != other.box_max[a]) return false;
  }
  return true;
}

GridSpec build_grid(int dim, const std::vector<double>& box_min,
                    const std::vector<double>& box_max, int n) {
  if (dim < 1) throw error("invalid-grid: dimension must be positive");
  if (n < 2) throw error("invalid-grid: need at least 2 points per axis");
  if (static_cast<int>(box_min.size()) != dim || static_cast<int>(box_max.size()) != dim)
    throw error("invalid-grid: box corner size does not match dimension");
  const double extent = box_max[0] - box_min[0];
  for (int a = 0; a < dim; ++a) {
    const double e = box_max[a] - box_min[a];
    if (!(e > 0.0)) throw error("invalid-grid: non-positive box extent");
    if (std::abs(e - extent) > 1e-12 * std::max(1.0, std::abs(extent)))
      throw error("invalid-grid: axes must share one spacing (cubic grid)");
  }
  GridSpec g;
  g.dim = dim;
  g.points_per_axis = n;
  g.box_min = box_min;
  g.box_max = box_max;
  g.spacing = extent / n;
  return g;
}

GridSpec build_grid(int dim, double box_min, double box_max, int n) {
  return build_grid(dim, std::vector<double>(dim, box_min), std::vector<double>(dim, box_max), n);
}

double DiscreteDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

std::int64_t ProductField::size() const {
  std::int64_t c = 1;
  for (int a = 0; a < grid.dim * arity; ++a) c *= grid.points_per_axis;
  return c;
}

double ProductField::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  double vol = 1.0;
  for (int a = 0; a < grid.dim * arity; ++a) vol *= grid.spacing;
  return s * vol;
}

std::string DensitySpec::describe() const {
  char buf[128];
  switch (kind) {
    case Kind::Gaussian:
      std::snprintf(buf, sizeof buf, "gaussian(sigma=%g)", components.empty() ? 0.0 : components[0].sigma);
      return buf;
    case Kind::Mixture:
      std::snprintf(buf, sizeof buf, "mixture(%zu)", components.size());
      return buf;
    case Kind::UniformBox:
      return "uniform-box";
    case Kind::Values:
      return "grid-values";
  }
  return "?";
}

namespace {

double gaussian_mass_inside(const GridSpec& g, const GaussianComponent& c) {
  double m = 1.0;
  const double s = c.sigma * std::sqrt(2.0);
  for (int a = 0; a < g.dim; ++a) {
    m *= 0.5 * (std::erf((g.box_max[a] - c.mean[a]) / s) - std::erf((g.box_min[a] - c.mean[a]) / s));
  }
  return m;
}

double gaussian_value(const GridSpec& g, const GaussianComponent& c, const double* x) {
  double q = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double d = x[a] - c.mean[a];
    q += d * d;
  }
  const double norm = std::pow(2.0 * M_PI * c.sigma * c.sigma, -0.5 * g.dim);
  return norm * std::exp(-0.5 * q / (c.sigma * c.sigma));
}

}  // namespace

DiscreteDensity ingest_density(const GridSpec& grid, const DensitySpec& spec) {
  const std::int64_t cells = grid.cells();
  DiscreteDensity rho;
  rho.grid = grid;
  rho.values.assign(cells, 0.0);
  std::vector<double> x(grid.dim);

  switch (spec.kind) {
    case DensitySpec::Kind::Gaussian:
    case DensitySpec::Kind::Mixture: {
      if (spec.components.empty()) throw error("invalid-data: no mixture components");
      double weight_sum = 0.0, inside = 0.0;
      for (const auto& c : spec.components) {
        if (!(c.sigma > 0.0) || c.weight < 0.0) throw error("invalid-data: bad gaussian component");
        if (static_cast<int>(c.mean.size()) != grid.dim)
          throw error("invalid-data: gaussian mean size does not match dimension");
        weight_sum += c.weight;
        inside += c.weight * gaussian_mass_inside(grid, c);
      }
      if (!(weight_sum > 0.0)) throw error("invalid-data: zero total weight");
      if (inside / weight_sum < 1.0 - 1e-6)
        throw error("truncation: analytic density has more than 1e-6 of its mass outside the box");
      for (std::int64_t i = 0; i < cells; ++i) {
        cell_coordinates(grid, i, x.data());
        double v = 0.0;
        for (const auto& c : spec.components) v += c.weight * gaussian_value(grid, c, x.data());
        rho.values[i] = v / weight_sum;
      }
      break;
    }
    case DensitySpec::Kind::UniformBox: {
      if (static_cast<int>(spec.lo.size()) != grid.dim || static_cast<int>(spec.hi.size()) != grid.dim)
        throw error("invalid-data: uniform box corner size does not match dimension");
      double vol = 1.0, vol_inside = 1.0;
      for (int a = 0; a < grid.dim; ++a) {
        const double e = spec.hi[a] - spec.lo[a];
        if (!(e > 0.0)) throw error("invalid-data: degenerate uniform box");
        vol *= e;
        const double clipped =
            std::min(spec.hi[a], grid.box_max[a]) - std::max(spec.lo[a], grid.box_min[a]);
        vol_inside *= std::max(0.0, clipped);
      }
      if (vol_inside / vol < 1.0 - 1e-6)
        throw error("truncation: uniform box has more than 1e-6 of its mass outside the grid");
      for (std::int64_t i = 0; i < cells; ++i) {
        cell_coordinates(grid, i, x.data());
        bool in = true;
        for (int a = 0; a < grid.dim; ++a)
          if (x[a] < spec.lo[a] || x[a] >= spec.hi[a]) in = false;
        rho.values[i] = in ? 1.0 / vol : 0.0;
      }
      break;
    }
    case DensitySpec::Kind::Values: {
      if (static_cast<std::int64_t>(spec.values.size()) != cells)
        throw error("invalid-data: value payload does not match grid size");
      for (double v : spec.values)
        if (v < 0.0 || !std::isfinite(v)) throw error("invalid-data: negative or non-finite density value");
      rho.values = spec.values;
      break;
    }
  }

  if (spec.floor_rel > 0.0) {
    const double top = *std::max_element(rho.values.begin(), rho.values.end());
    const double cut = spec.floor_rel * top;
    for (double& v : rho.values)
      if (v < cut) v = 0.0;
  }

  const double m = rho.mass();
  if (!(m > 0.0)) throw error("invalid-data: density has zero mass on the grid");
  for (double& v : rho.values) v /= m;
  return rho;
}

double integrate(const DiscreteDensity& rho) { return rho.mass(); }
double integrate(const ProductField& field) { return field.mass(); }

void decode_index(std::int64_t flat, int n, int axes, int* digits) {
  for (int a = axes - 1; a >= 0; --a) {
    digits[a] = static_cast<int>(flat % n);
    flat /= n;
  }
}

std::int64_t encode_index(const int* digits, int n, int axes) {
  std::int64_t flat = 0;
  for (int a = 0; a < axes; ++a) flat = flat * n + digits[a];
  return flat;
}

std::int64_t block_cell(std::int64_t flat, const GridSpec& grid, int arity, int block) {
  const int n = grid.points_per_axis;
  const int axes = grid.dim * arity;
  // strip the axes after the block, then take dim digits
  std::int64_t tail = 1;
  for (int a = (block + 1) * grid.dim; a < axes; ++a) tail *= n;
  std::int64_t head = flat / tail;
  std::int64_t mod = 1;
  for (int a = 0; a < grid.dim; ++a) mod *= n;
  return head % mod;
}

void cell_coordinates(const GridSpec& grid, std::int64_t cell, double* out) {
  const int n = grid.points_per_axis;
  for (int a = grid.dim - 1; a >= 0; --a) {
    out[a] = grid.center(a, static_cast<int>(cell % n));
    cell /= n;
  }
}

double grad_energy(const std::vector<double>& values, const GridSpec& grid, int num_axes) {
  const int n = grid.points_per_axis;
  const double h = grid.spacing;
  const std::int64_t total = static_cast<std::int64_t>(values.size());
  double vol = 1.0;
  for (int a = 0; a < num_axes; ++a) vol *= h;

  double energy = 0.0;
  std::int64_t stride = 1;
  for (int axis = num_axes - 1; axis >= 0; --axis) {
    double axis_sum = 0.0;
    for (std::int64_t i = 0; i < total; ++i) {
      const int digit = static_cast<int>((i / stride) % n);
      double diff;
      if (digit == 0) {
        diff = (values[i + stride] - values[i]) / h;
      } else if (digit == n - 1) {
        diff = (values[i] - values[i - stride]) / h;
      } else {
        diff = (values[i + stride] - values[i - stride]) / (2.0 * h);
      }
      axis_sum += diff * diff;
    }
    energy += axis_sum;
    stride *= n;
  }
  return energy * vol;
}

double sqrt_density_h1(const DiscreteDensity& rho) {
  std::vector<double> s(rho.values.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (rho.values[i] < 0.0) throw error("invalid-data: negative density value");
    s[i] = std::sqrt(rho.values[i]);
  }
  return rho.mass() + grad_energy(s, rho.grid, rho.grid.dim);
}

DiscreteDensity marginal(const ProductField& plan, int axis_i) {
  if (axis_i < 1 || axis_i > plan.arity) throw error("marginal: axis out of range");
  const GridSpec& g = plan.grid;
  const int block = axis_i - 1;
  DiscreteDensity out;
  out.grid = g;
  out.values.assign(g.cells(), 0.0);
  double weight = 1.0;
  for (int a = 0; a < g.dim * (plan.arity - 1); ++a) weight *= g.spacing;
  const std::int64_t total = plan.size();
  for (std::int64_t i = 0; i < total; ++i) {
    out.values[block_cell(i, g, plan.arity, block)] += plan.values[i];
  }
  for (double& v : out.values) v *= weight;
  return out;
}

}  // namespace mmot
