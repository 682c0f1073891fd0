#include "mmot/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"
#include "mmot/rng.hpp"

namespace mmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDenomFloor = 1e-300;  // rho_eps at or below this counts as zero

struct BlockKernel {
  KernelTaps taps;
  std::vector<double> source_norm;  // W(i) = sum of in-box weights from cell i
};

BlockKernel build_kernel(const GridSpec& g, double eps) {
  if (eps < 2.0 * g.spacing - 1e-12)
    throw error("under-resolved-kernel: eps must be at least 2h");
  BlockKernel k;
  k.taps = sample_kernel(g.dim, eps, g.spacing);
  const std::int64_t cells = g.cells();
  k.source_norm.assign(cells, 0.0);
  const int n = g.points_per_axis;
  std::vector<int> digits(g.dim);
  for (std::int64_t i = 0; i < cells; ++i) {
    decode_index(i, n, g.dim, digits.data());
    double w = 0.0;
    for (std::size_t t = 0; t < k.taps.offsets.size(); ++t) {
      bool in = true;
      for (int a = 0; a < g.dim; ++a) {
        const int j = digits[a] + k.taps.offsets[t][a];
        if (j < 0 || j >= n) {
          in = false;
          break;
        }
      }
      if (in) w += k.taps.weights[t];
    }
    k.source_norm[i] = w;
  }
  return k;
}

// out(j) = sum_i T(j|i) in(i), T(j|i) = w(j-i) / W(i): forward smoothing of a
// density-like array indexed by grid cells.
std::vector<double> apply_forward_density(const BlockKernel& k, const GridSpec& g,
                                          const std::vector<double>& in) {
  const int n = g.points_per_axis;
  const std::int64_t cells = g.cells();
  std::vector<double> out(cells, 0.0);
  std::vector<int> digits(g.dim);
  for (std::int64_t j = 0; j < cells; ++j) {
    decode_index(j, n, g.dim, digits.data());
    double acc = 0.0;
    for (std::size_t t = 0; t < k.taps.offsets.size(); ++t) {
      bool in_box = true;
      std::int64_t i = 0;
      for (int a = 0; a < g.dim; ++a) {
        const int d = digits[a] - k.taps.offsets[t][a];
        if (d < 0 || d >= n) {
          in_box = false;
          break;
        }
        i = i * n + d;
      }
      if (!in_box) continue;
      acc += k.taps.weights[t] * in[i] / k.source_norm[i];
    }
    out[j] = acc;
  }
  return out;
}

// Applies a per-block linear map along one coordinate block of a product field.
// mode Forward:  out(.., x_b, ..) = sum_delta w(delta) in(.., x_b - delta, ..) / W(x_b - delta)
// mode Reverse:  out(.., x_b, ..) = rho(x_b)/W(x_b) sum_delta w(delta) in(.., x_b + delta, ..) / rho_eps(x_b + delta)
enum class BlockMode { Forward, Reverse };

void apply_block(const BlockKernel& k, const GridSpec& g, int arity, int block, BlockMode mode,
                 const std::vector<double>* rho, const std::vector<double>* rho_eps,
                 const std::vector<double>& in, std::vector<double>& out) {
  const int n = g.points_per_axis;
  const int axes = g.dim * arity;
  std::vector<std::int64_t> stride(axes);
  std::int64_t s = 1;
  for (int a = axes - 1; a >= 0; --a) {
    stride[a] = s;
    s *= n;
  }
  const std::int64_t total = s;

  parallel_for(total, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<int> digits(axes);
    for (std::int64_t x = lo; x < hi; ++x) {
      decode_index(x, n, axes, digits.data());
      std::int64_t cell = 0;
      for (int a = 0; a < g.dim; ++a) cell = cell * n + digits[block * g.dim + a];
      double acc = 0.0;
      for (std::size_t t = 0; t < k.taps.offsets.size(); ++t) {
        std::int64_t src = x;
        std::int64_t src_cell = 0;
        bool in_box = true;
        for (int a = 0; a < g.dim; ++a) {
          const int off = k.taps.offsets[t][a];
          const int d0 = digits[block * g.dim + a];
          const int d = mode == BlockMode::Forward ? d0 - off : d0 + off;
          if (d < 0 || d >= n) {
            in_box = false;
            break;
          }
          src += static_cast<std::int64_t>(d - d0) * stride[block * g.dim + a];
          src_cell = src_cell * n + d;
        }
        if (!in_box) continue;
        const double w = k.taps.weights[t];
        if (mode == BlockMode::Forward) {
          acc += w * in[src] / k.source_norm[src_cell];
        } else {
          const double denom = (*rho_eps)[src_cell];
          if (denom > kDenomFloor) acc += w * in[src] / denom;
        }
      }
      if (mode == BlockMode::Reverse) {
        const double r = (*rho)[cell];
        acc *= k.source_norm[cell] > 0.0 ? r / k.source_norm[cell] : 0.0;
      }
      out[x] = acc;
    }
  });
}

}  // namespace

DiscreteDensity mollify_density(const DiscreteDensity& rho, double eps) {
  BlockKernel k = build_kernel(rho.grid, eps);
  DiscreteDensity out;
  out.grid = rho.grid;
  out.values = apply_forward_density(k, rho.grid, rho.values);
  return out;
}

ProductField mollify_plan(const ProductField& plan, double eps) {
  BlockKernel k = build_kernel(plan.grid, eps);
  ProductField cur = plan;
  ProductField next = plan;
  for (int b = 0; b < plan.arity; ++b) {
    apply_block(k, plan.grid, plan.arity, b, BlockMode::Forward, nullptr, nullptr, cur.values,
                next.values);
    std::swap(cur.values, next.values);
  }
  return cur;
}

ProductField restore_marginals(const ProductField& p_tilde, const DiscreteDensity& rho,
                               double eps) {
  if (!p_tilde.grid.same_geometry(rho.grid))
    throw error("restore_marginals: plan and density live on different grids");
  BlockKernel k = build_kernel(rho.grid, eps);
  DiscreteDensity rho_eps;
  rho_eps.grid = rho.grid;
  rho_eps.values = apply_forward_density(k, rho.grid, rho.values);

  // consistency: marginals of p_tilde must match rho * eta_eps
  const double vol = rho.grid.cell_volume();
  for (int a = 1; a <= p_tilde.arity; ++a) {
    DiscreteDensity m = marginal(p_tilde, a);
    double l1 = 0.0;
    for (std::int64_t i = 0; i < rho.grid.cells(); ++i)
      l1 += std::abs(m.values[i] - rho_eps.values[i]) * vol;
    if (l1 > 1e-8)
      throw error("input-mismatch: p_tilde marginals deviate from rho * eta_eps");
  }

  ProductField cur = p_tilde;
  ProductField next = p_tilde;
  for (int b = 0; b < p_tilde.arity; ++b) {
    apply_block(k, rho.grid, p_tilde.arity, b, BlockMode::Reverse, &rho.values, &rho_eps.values,
                cur.values, next.values);
    std::swap(cur.values, next.values);
  }
  return cur;
}

std::vector<double> gamma_row(const DiscreteDensity& rho, double eps, std::int64_t y_cell) {
  BlockKernel k = build_kernel(rho.grid, eps);
  DiscreteDensity rho_eps;
  rho_eps.grid = rho.grid;
  rho_eps.values = apply_forward_density(k, rho.grid, rho.values);
  const GridSpec& g = rho.grid;
  const int n = g.points_per_axis;
  std::vector<double> row(g.cells(), 0.0);
  if (rho_eps.values[y_cell] <= kDenomFloor) return row;
  std::vector<int> digits(g.dim);
  decode_index(y_cell, n, g.dim, digits.data());
  for (std::size_t t = 0; t < k.taps.offsets.size(); ++t) {
    std::int64_t x = 0;
    bool in_box = true;
    for (int a = 0; a < g.dim; ++a) {
      const int d = digits[a] - k.taps.offsets[t][a];
      if (d < 0 || d >= n) {
        in_box = false;
        break;
      }
      x = x * n + d;
    }
    if (!in_box) continue;
    // density form: gamma(x|y) mass over h^d
    row[x] = rho.values[x] * k.taps.weights[t] / k.source_norm[x] / rho_eps.values[y_cell] /
             g.cell_volume();
  }
  return row;
}

double kinetic_energy(const ProductField& phi) {
  return grad_energy(phi.values, phi.grid, phi.grid.dim * phi.arity);
}

double kinetic_bound(const DiscreteDensity& rho, double eps, int arity) {
  if (!(eps > 0.0)) throw error("kinetic_bound: eps must be positive");
  auto [k, K] = mollifier_constant(rho.grid.dim);
  (void)k;
  return arity * (sqrt_density_h1(rho) + K / (4.0 * eps * eps));
}

SmoothedPlan smooth_plan(const ProductField& plan, const DiscreteDensity& rho, double eps,
                         const CoulombCost& cost) {
  SmoothedPlan out;
  out.eps = eps;
  out.p_tilde = mollify_plan(plan, eps);
  out.p_restored = restore_marginals(out.p_tilde, rho, eps);
  out.phi = out.p_restored;
  for (double& v : out.phi.values) v = std::sqrt(std::max(0.0, v));
  out.kinetic = kinetic_energy(out.phi);
  out.kinetic_bound = mmot::kinetic_bound(rho, eps, plan.arity);
  out.cost = cost_of_plan(out.p_restored, cost);
  out.recombined_cost = cost_of_plan(plan, cost);
  return out;
}

SmoothedPlan regularize_general(const ProductField& plan, const DiscreteDensity& rho, double r,
                                const CoulombCost& cost, const SolverParams& params) {
  if (!(r > 0.0)) throw error("regularize_general: r must be positive");
  const double strip = diagonal_mass(plan, r);
  if (strip == 0.0) return smooth_plan(plan, rho, r, cost);

  const double total_cost = cost_of_plan(plan, cost);
  if (total_cost == kInf) {
    SmoothedPlan out;
    out.eps = r;
    out.cost = kInf;
    out.skipped_infinite_cost = true;
    return out;
  }

  // the strip marginals are axis-independent only for symmetric plans
  ProductField sym = symmetrize(plan);
  const GridSpec& g = sym.grid;
  const int N = sym.arity;
  const std::int64_t total = sym.size();

  ProductField q_r = sym;           // off-strip part
  ProductField strip_part = sym;    // P|_{D_r}
  {
    std::array<std::int64_t, 3> blocks{};
    std::vector<double> coords(static_cast<std::size_t>(N) * g.dim);
    for (std::int64_t i = 0; i < total; ++i) {
      bool near = false;
      if (sym.values[i] != 0.0) {
        for (int b = 0; b < N; ++b) {
          blocks[b] = block_cell(i, g, N, b);
          cell_coordinates(g, blocks[b], &coords[b * g.dim]);
        }
        for (int a = 0; a < N && !near; ++a)
          for (int b = a + 1; b < N; ++b) {
            double qd = 0.0;
            for (int c = 0; c < g.dim; ++c) {
              const double dd = coords[a * g.dim + c] - coords[b * g.dim + c];
              qd += dd * dd;
            }
            if (std::sqrt(qd) < r) {
              near = true;
              break;
            }
          }
      }
      if (near) {
        q_r.values[i] = 0.0;
      } else {
        strip_part.values[i] = 0.0;
      }
    }
  }

  DiscreteDensity rho_tilde = marginal(strip_part, 1);
  const double strip_mass = rho_tilde.mass();  // 1/lambda_r
  const double lambda = 1.0 / strip_mass;
  DiscreteDensity scaled = rho_tilde;
  for (double& v : scaled.values) v *= lambda;

  std::int64_t vars = 1;
  for (int a = 0; a < g.dim * N; ++a) vars *= g.points_per_axis;
  const SolveMethod method = vars <= params.cap ? SolveMethod::ExactLp : SolveMethod::Entropic;
  PlanSolution replacement = solve_mmot(scaled, N, method, cost, params);
  if (!replacement.feasible)
    throw error("regularize_general: strip marginals admit no off-diagonal plan");
  ProductField strip_opt = symmetrize(replacement.plan);

  ProductField recombined = q_r;
  for (std::int64_t i = 0; i < total; ++i)
    recombined.values[i] += strip_opt.values[i] / lambda;

  return smooth_plan(recombined, rho, r, cost);
}

double bl_distance_diagnostic(const ProductField& a, const ProductField& b, std::uint64_t seed,
                              int num_test_functions) {
  if (a.size() != b.size() || a.arity != b.arity)
    throw error("bl_distance: mismatched plans");
  const GridSpec& g = a.grid;
  const int axes = g.dim * a.arity;
  double vol = 1.0;
  for (int i = 0; i < axes; ++i) vol *= g.spacing;
  Rng rng(seed);
  double worst = 0.0;
  std::vector<double> freq(axes), phase(axes);
  const std::int64_t total = a.size();
  std::vector<int> digits(axes);
  for (int f = 0; f < num_test_functions; ++f) {
    double norm = 0.0;
    for (int i = 0; i < axes; ++i) {
      freq[i] = rng.uniform(-1.0, 1.0);
      phase[i] = rng.uniform(0.0, 2.0 * M_PI);
      norm += freq[i] * freq[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) norm = 1.0;
    // test function cos(sum freq_i x_i / |freq| + phase_0): Lipschitz and sup norm <= 1
    double diff = 0.0;
    for (std::int64_t x = 0; x < total; ++x) {
      decode_index(x, g.points_per_axis, axes, digits.data());
      double arg = phase[0];
      for (int i = 0; i < axes; ++i)
        arg += freq[i] / norm * g.center(i % g.dim, digits[i]);
      diff += std::cos(arg) * (a.values[x] - b.values[x]);
    }
    worst = std::max(worst, std::abs(diff * vol));
  }
  return worst;
}

}  // namespace mmot
