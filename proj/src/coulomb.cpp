#include "mmot/coulomb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"

namespace mmot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double pair_distance(const double* x, const double* y, int dim) {
  double q = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double d = x[a] - y[a];
    q += d * d;
  }
  return std::sqrt(q);
}

int pair_count(int arity) { return arity * (arity - 1) / 2; }

void block_coordinates(const GridSpec& g, std::int64_t cell, double* out) {
  cell_coordinates(g, cell, out);
}

}  // namespace

double coulomb_cost(const std::vector<double>& points, int arity, int dim) {
  double c = 0.0;
  for (int i = 0; i < arity; ++i) {
    for (int j = i + 1; j < arity; ++j) {
      const double r = pair_distance(&points[i * dim], &points[j * dim], dim);
      if (r == 0.0) return kInf;
      c += 1.0 / r;
    }
  }
  return c;
}

double truncated_cost(const std::vector<double>& points, int arity, int dim, double alpha) {
  if (!(alpha > 0.0)) throw error("truncated_cost: alpha must be positive");
  double c = 0.0;
  const double cut = alpha / 4.0;
  for (int i = 0; i < arity; ++i) {
    for (int j = i + 1; j < arity; ++j) {
      const double r = pair_distance(&points[i * dim], &points[j * dim], dim);
      c += (r >= cut) ? 1.0 / r : 4.0 / alpha;
    }
  }
  return c;
}

double cell_cost(const CoulombCost& cost, const GridSpec& grid, const std::int64_t* blocks) {
  std::array<double, 12> coords;  // up to arity 3 * dim 4
  for (int b = 0; b < cost.arity; ++b)
    block_coordinates(grid, blocks[b], coords.data() + b * grid.dim);
  double c = 0.0;
  for (int i = 0; i < cost.arity; ++i) {
    for (int j = i + 1; j < cost.arity; ++j) {
      if (blocks[i] == blocks[j]) {
        if (cost.policy == DiagonalPolicy::Forbid) return kInf;
        c += 4.0 / cost.trunc_alpha;
        continue;
      }
      const double r = pair_distance(&coords[i * grid.dim], &coords[j * grid.dim], grid.dim);
      if (cost.policy == DiagonalPolicy::Truncate && r < cost.trunc_alpha / 4.0)
        c += 4.0 / cost.trunc_alpha;
      else
        c += 1.0 / r;
    }
  }
  return c;
}

double cost_of_plan(const ProductField& plan, const CoulombCost& cost) {
  const GridSpec& g = plan.grid;
  const std::int64_t total = plan.size();
  double vol = 1.0;
  for (int a = 0; a < g.dim * plan.arity; ++a) vol *= g.spacing;
  std::array<std::int64_t, 3> blocks{};
  double sum = 0.0;
  for (std::int64_t i = 0; i < total; ++i) {
    const double w = plan.values[i];
    if (w == 0.0) continue;
    for (int b = 0; b < plan.arity; ++b) blocks[b] = block_cell(i, g, plan.arity, b);
    const double c = cell_cost(cost, g, blocks.data());
    if (c == kInf) return kInf;
    sum += c * w;
  }
  return sum * vol;
}

ProductField product_plan(const DiscreteDensity& rho, int arity, std::int64_t cap) {
  const GridSpec& g = rho.grid;
  std::int64_t total = 1;
  for (int a = 0; a < g.dim * arity; ++a) total *= g.points_per_axis;
  if (total > cap) throw cap_error("product_plan: instance exceeds the variable cap");
  ProductField plan;
  plan.grid = g;
  plan.arity = arity;
  plan.values.assign(total, 1.0);
  for (std::int64_t i = 0; i < total; ++i) {
    for (int b = 0; b < arity; ++b) plan.values[i] *= rho.values[block_cell(i, g, arity, b)];
  }
  return plan;
}

ProductField symmetrize(const ProductField& plan) {
  const GridSpec& g = plan.grid;
  const int N = plan.arity;
  const std::int64_t total = plan.size();
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  if (N == 1) {
    perms.push_back(p);
  } else if (N == 2) {
    perms.push_back({0, 1, 2});
    perms.push_back({1, 0, 2});
  } else if (N == 3) {
    std::array<int, 3> q{0, 1, 2};
    do {
      perms.push_back(q);
    } while (std::next_permutation(q.begin(), q.end()));
  } else {
    throw error("symmetrize: arity must be at most 3");
  }

  // strides of each block group
  std::vector<std::int64_t> block_stride(N);
  std::int64_t s = 1;
  std::int64_t block_mod = 1;
  for (int a = 0; a < g.dim; ++a) block_mod *= g.points_per_axis;
  for (int b = N - 1; b >= 0; --b) {
    block_stride[b] = s;
    s *= block_mod;
  }

  ProductField out;
  out.grid = g;
  out.arity = N;
  out.values.assign(total, 0.0);
  std::array<std::int64_t, 3> blocks{};
  const double w = 1.0 / static_cast<double>(perms.size());
  for (std::int64_t i = 0; i < total; ++i) {
    for (int b = 0; b < N; ++b) blocks[b] = block_cell(i, g, N, b);
    double acc = 0.0;
    for (const auto& perm : perms) {
      std::int64_t j = 0;
      for (int b = 0; b < N; ++b) j += blocks[perm[b]] * block_stride[b];
      acc += plan.values[j];
    }
    out.values[i] = acc * w;
  }
  return out;
}

double diagonal_mass(const ProductField& plan, double alpha) {
  if (alpha < 0.0) throw error("diagonal_mass: alpha must be nonnegative");
  const GridSpec& g = plan.grid;
  const std::int64_t total = plan.size();
  double vol = 1.0;
  for (int a = 0; a < g.dim * plan.arity; ++a) vol *= g.spacing;
  std::array<std::int64_t, 3> blocks{};
  std::array<double, 12> coords;
  double sum = 0.0;
  for (std::int64_t i = 0; i < total; ++i) {
    if (plan.values[i] == 0.0) continue;
    for (int b = 0; b < plan.arity; ++b) {
      blocks[b] = block_cell(i, g, plan.arity, b);
      block_coordinates(g, blocks[b], coords.data() + b * g.dim);
    }
    bool near = false;
    for (int a = 0; a < plan.arity && !near; ++a)
      for (int b = a + 1; b < plan.arity; ++b)
        if (pair_distance(&coords[a * g.dim], &coords[b * g.dim], g.dim) < alpha) {
          near = true;
          break;
        }
    if (near) sum += plan.values[i];
  }
  return sum * vol;
}

double support_gap(const ProductField& plan) {
  const GridSpec& g = plan.grid;
  const std::int64_t total = plan.size();
  std::array<std::int64_t, 3> blocks{};
  std::array<double, 12> coords;
  double gap = kInf;
  for (std::int64_t i = 0; i < total; ++i) {
    if (plan.values[i] <= 0.0) continue;
    for (int b = 0; b < plan.arity; ++b) {
      blocks[b] = block_cell(i, g, plan.arity, b);
      block_coordinates(g, blocks[b], coords.data() + b * g.dim);
    }
    for (int a = 0; a < plan.arity; ++a)
      for (int b = a + 1; b < plan.arity; ++b)
        gap = std::min(gap, pair_distance(&coords[a * g.dim], &coords[b * g.dim], g.dim));
  }
  return gap;
}

ConcentrationProfile concentration_profile(const DiscreteDensity& rho,
                                           const std::vector<double>& radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw error("concentration: radii must be positive");
    if (i > 0 && radii[i] < radii[i - 1]) throw error("concentration: radii must be sorted");
  }
  const GridSpec& g = rho.grid;
  const std::int64_t cells = g.cells();
  const double vol = g.cell_volume();

  // Pairwise distances once; the profile is a max over closed balls at centers.
  std::vector<double> xs(cells * g.dim);
  for (std::int64_t i = 0; i < cells; ++i) cell_coordinates(g, i, &xs[i * g.dim]);

  ConcentrationProfile prof;
  prof.radii = radii;
  prof.values.assign(radii.size(), 0.0);
  for (std::int64_t c = 0; c < cells; ++c) {
    // distances from this center, then a running cumulative mass per radius
    for (std::size_t t = 0; t < radii.size(); ++t) {
      double m = 0.0;
      for (std::int64_t j = 0; j < cells; ++j) {
        if (pair_distance(&xs[c * g.dim], &xs[j * g.dim], g.dim) <= radii[t])
          m += rho.values[j];
      }
      prof.values[t] = std::max(prof.values[t], m * vol);
    }
  }
  for (double& v : prof.values) v = std::min(v, 1.0);
  prof.limit_estimate = prof.values.empty() ? 0.0 : prof.values.front();
  return prof;
}

std::optional<double> offdiag_radius(const DiscreteDensity& rho, int arity) {
  if (arity < 2) throw error("offdiag_radius: arity must be at least 2");
  const double threshold = 1.0 / (arity * (arity - 1.0) * (arity - 1.0));
  const GridSpec& g = rho.grid;
  // Tabulate beta at multiples of the spacing up to the box diameter.
  double diam = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double e = g.box_max[a] - g.box_min[a];
    diam += e * e;
  }
  diam = std::sqrt(diam);
  // half-spacing resolution so single-cell balls are tabulated
  std::vector<double> radii;
  for (double b = 0.5 * g.spacing; b <= diam; b += 0.5 * g.spacing) radii.push_back(b);
  if (radii.empty()) return std::nullopt;
  ConcentrationProfile prof = concentration_profile(rho, radii);
  double best_beta = -1.0;
  for (std::size_t t = 0; t < radii.size(); ++t) {
    if (prof.values[t] < threshold) best_beta = radii[t];
  }
  if (best_beta <= 0.0) return std::nullopt;
  return (1.0 - 1e-6) * 2.0 * best_beta / (static_cast<double>(arity) * arity * (arity - 1.0));
}

HolderBound finite_cost_bound_detail(const DiscreteDensity& rho, int arity, double p, double a) {
  const int d = rho.grid.dim;
  if (d < 2) throw error("finite_cost_bound: requires dimension >= 2");
  if (!(a > 0.0)) throw error("finite_cost_bound: split radius must be positive");
  if (p < static_cast<double>(d) / (d - 1.0) - 1e-12)
    throw error("invalid-exponent: need p >= d/(d-1)");
  const double pprime = p / (p - 1.0);

  HolderBound out;
  out.g_sup = 1.0 / a;
  const double omega_d = std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  if (pprime >= static_cast<double>(d)) {
    out.f_radial_integral = kInf;  // log-divergent radial integral at p' = d
    out.f_norm = kInf;
  } else {
    out.f_radial_integral = omega_d * d / (d - pprime) * std::pow(a, d - pprime);
    out.f_norm = std::pow(out.f_radial_integral, 1.0 / pprime);
  }
  double lp = 0.0;
  for (double v : rho.values) lp += std::pow(v, p);
  out.rho_lp = std::pow(lp * rho.grid.cell_volume(), 1.0 / p);
  const double l1 = rho.mass();
  out.bound = pair_count(arity) * (out.rho_lp * out.f_norm + l1 * out.g_sup);
  return out;
}

double finite_cost_bound(const DiscreteDensity& rho, int arity, double p, double a) {
  return finite_cost_bound_detail(rho, arity, p, a).bound;
}

}  // namespace mmot
