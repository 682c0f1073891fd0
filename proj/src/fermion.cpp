#include "mmot/fermion.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mmot/coulomb.hpp"
#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"

namespace mmot {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
const std::complex<double> kXi(-0.5, 0.8660254037844386);  // primitive cube root of 1
const std::complex<double> kI(0.0, 1.0);

double trig_a(double t, double r) {
  if (t <= -r) return -1.0;
  if (t >= r) return 1.0;
  return std::sin(M_PI * t / (2.0 * r));
}
double trig_b(double t, double r) {
  if (t <= -r || t >= r) return 0.0;
  return std::cos(M_PI * t / (2.0 * r));
}
double trig_da(double t, double r) {
  if (t <= -r || t >= r) return 0.0;
  return M_PI / (2.0 * r) * std::cos(M_PI * t / (2.0 * r));
}
double trig_db(double t, double r) {
  if (t <= -r || t >= r) return 0.0;
  return -M_PI / (2.0 * r) * std::sin(M_PI * t / (2.0 * r));
}

// Equalized two-segment profile: a linear in t while |a| <= b, then b linear;
// both derivative sups equal sqrt(2)/r.
double smooth_a(double t, double r) {
  const double s = t < 0 ? -1.0 : 1.0;
  const double u = std::abs(t);
  if (u >= r) return s;
  if (u <= 0.5 * r) return s * kSqrt2 * u / r;
  const double b = kSqrt2 * (r - u) / r;
  return s * std::sqrt(1.0 - b * b);
}
double smooth_b(double t, double r) {
  const double u = std::abs(t);
  if (u >= r) return 0.0;
  if (u <= 0.5 * r) {
    const double a = kSqrt2 * u / r;
    return std::sqrt(1.0 - a * a);
  }
  return kSqrt2 * (r - u) / r;
}
double smooth_da(double t, double r) {
  const double u = std::abs(t);
  if (u >= r) return 0.0;
  if (u <= 0.5 * r) return kSqrt2 / r;
  const double b = kSqrt2 * (r - u) / r;
  const double a = std::sqrt(1.0 - b * b);
  return kSqrt2 / r * (b / a);  // a' = -b b'/a, b' = -sqrt2/r on this segment
}
double smooth_db(double t, double r) {
  const double s = t < 0 ? -1.0 : 1.0;
  const double u = std::abs(t);
  if (u >= r) return 0.0;
  if (u <= 0.5 * r) {
    const double a = kSqrt2 * u / r;
    const double b = std::sqrt(1.0 - a * a);
    return -s * kSqrt2 / r * (a / b);
  }
  return -s * kSqrt2 / r;
}

}  // namespace

double AuxiliaryPair::a(double t) const {
  return variant == AuxVariant::Trig ? trig_a(t, r) : smooth_a(t, r);
}
double AuxiliaryPair::b(double t) const {
  return variant == AuxVariant::Trig ? trig_b(t, r) : smooth_b(t, r);
}
double AuxiliaryPair::da(double t) const {
  return variant == AuxVariant::Trig ? trig_da(t, r) : smooth_da(t, r);
}
double AuxiliaryPair::db(double t) const {
  return variant == AuxVariant::Trig ? trig_db(t, r) : smooth_db(t, r);
}

AuxiliaryPair aux_pair(double r, AuxVariant variant) {
  if (!(r > 0.0)) throw error("aux_pair: transition radius must be positive");
  AuxiliaryPair p;
  p.r = r;
  p.variant = variant;
  p.k = variant == AuxVariant::Trig ? M_PI / 2.0 : kSqrt2;
  const int samples = 2049;
  p.sample_t.resize(samples);
  p.sample_a.resize(samples);
  p.sample_b.resize(samples);
  p.sample_da.resize(samples);
  p.sample_db.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = -1.25 * r + 2.5 * r * i / (samples - 1);
    p.sample_t[i] = t;
    p.sample_a[i] = p.a(t);
    p.sample_b[i] = p.b(t);
    p.sample_da[i] = p.da(t);
    p.sample_db[i] = p.db(t);
  }
  return p;
}

std::pair<std::complex<double>, std::complex<double>> g_factors(const double* x, const double* y,
                                                                int dim,
                                                                const AuxiliaryPair& aux) {
  if (dim != 3 && dim != 4) throw error("g_factors: dimension must be 3 or 4");
  double a[4], b[4];
  for (int j = 0; j < dim; ++j) {
    a[j] = aux.a(x[j] - y[j]);
    b[j] = aux.b(x[j] - y[j]);
  }
  if (dim == 3) {
    const double u = a[0], v = b[0] * a[1], w = b[0] * b[1] * a[2];
    const std::complex<double> g1((u + v + w) / std::sqrt(3.0), 0.0);
    const std::complex<double> gxi =
        kSqrt2 / std::sqrt(3.0) * (u + kXi * v + kXi * kXi * w);
    return {g1, gxi};
  }
  const double u = a[0], v = b[0] * a[1], w = b[0] * b[1] * a[2], z = b[0] * b[1] * b[2] * a[3];
  const std::complex<double> g1 = (u + kI * v + w + kI * z) / kSqrt2;
  const std::complex<double> g2 = (u + kI * v - w - kI * z) / kSqrt2;
  return {g1, g2};
}

namespace {

// per-cell finite-difference |grad|^2, accumulated over the given axes
void accumulate_gradsq(const std::vector<double>& v, int n, int axes, double h,
                       std::vector<double>& out) {
  const std::int64_t total = static_cast<std::int64_t>(v.size());
  std::int64_t stride = 1;
  for (int axis = axes - 1; axis >= 0; --axis) {
    const std::int64_t local = stride;
    parallel_for(total, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t i = lo; i < hi; ++i) {
        const int digit = static_cast<int>((i / local) % n);
        double diff;
        if (digit == 0)
          diff = (v[i + local] - v[i]) / h;
        else if (digit == n - 1)
          diff = (v[i] - v[i - local]) / h;
        else
          diff = (v[i + local] - v[i - local]) / (2.0 * h);
        out[i] += diff * diff;
      }
    });
    stride *= n;
  }
}

std::vector<double> gradsq_complex(const std::vector<std::complex<double>>& f, int n, int axes,
                                   double h) {
  std::vector<double> re(f.size()), im(f.size()), out(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    re[i] = f[i].real();
    im[i] = f[i].imag();
  }
  accumulate_gradsq(re, n, axes, h, out);
  accumulate_gradsq(im, n, axes, h, out);
  return out;
}

void check_symmetric(const ProductField& psi, double tol) {
  ProductField sym = symmetrize(psi);
  for (std::int64_t i = 0; i < psi.size(); ++i) {
    if (std::abs(sym.values[i] - psi.values[i]) > tol)
      throw error("invalid-input: psi is not permutation symmetric");
  }
}

// max |psi| over cells whose center has some pair closer than alpha
double max_on_strip(const ProductField& psi, double alpha) {
  const GridSpec& g = psi.grid;
  const std::int64_t total = psi.size();
  double worst = 0.0;
  double coords[12];
  int digits[12];
  for (std::int64_t i = 0; i < total; ++i) {
    if (psi.values[i] == 0.0) continue;
    decode_index(i, g.points_per_axis, g.dim * psi.arity, digits);
    for (int b = 0; b < psi.arity; ++b)
      for (int a = 0; a < g.dim; ++a) coords[b * g.dim + a] = g.center(a, digits[b * g.dim + a]);
    bool near = false;
    for (int p = 0; p < psi.arity && !near; ++p)
      for (int q = p + 1; q < psi.arity; ++q) {
        double sq = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          const double dd = coords[p * g.dim + a] - coords[q * g.dim + a];
          sq += dd * dd;
        }
        if (std::sqrt(sq) < alpha) {
          near = true;
          break;
        }
      }
    if (near) worst = std::max(worst, std::abs(psi.values[i]));
  }
  return worst;
}

std::int64_t permuted_index(std::int64_t flat, const GridSpec& g, int arity, const int* perm) {
  const int n = g.points_per_axis;
  const int axes = g.dim * arity;
  int digits[12];
  decode_index(flat, n, axes, digits);
  int permuted[12];
  for (int b = 0; b < arity; ++b)
    for (int a = 0; a < g.dim; ++a) permuted[b * g.dim + a] = digits[perm[b] * g.dim + a];
  return encode_index(permuted, n, axes);
}

}  // namespace

std::vector<double> SpinWaveFunction::density() const {
  std::vector<double> out(source.size(), 0.0);
  for (const auto& comp : components) {
    if (comp.empty()) continue;
    for (std::size_t i = 0; i < comp.size(); ++i) out[i] += std::norm(comp[i]);
  }
  return out;
}

double SpinWaveFunction::kinetic() const {
  const int n = grid.points_per_axis;
  const int axes = dim * arity;
  double vol = 1.0;
  for (int a = 0; a < axes; ++a) vol *= grid.spacing;
  double total = 0.0;
  for (const auto& comp : components) {
    if (comp.empty()) continue;
    std::vector<double> g2 = gradsq_complex(comp, n, axes, grid.spacing);
    double s = 0.0;
    for (double v : g2) s += v;
    total += s;
  }
  return total * vol;
}

SpinWaveFunction build_fermionic(const ProductField& psi, double alpha,
                                 const AuxiliaryPair& aux) {
  const GridSpec& g = psi.grid;
  const int N = psi.arity;
  const int d = g.dim;
  if (N != 2 && N != 3) throw error("build_fermionic: arity must be 2 or 3");
  if (d != 3 && d != 4) throw error("build_fermionic: dimension must be 3 or 4");
  if (!(alpha > 0.0)) throw error("build_fermionic: alpha must be positive");
  if (aux.r > alpha / std::sqrt(static_cast<double>(d)) + 1e-12)
    throw error("build_fermionic: aux transition radius exceeds alpha/sqrt(d)");

  // psi must vanish on the diagonal strip; the construction is wrong off that set
  if (max_on_strip(psi, alpha) > 1e-12)
    throw error("precondition-violation: psi does not vanish on D_alpha");
  check_symmetric(psi, 1e-10);

  SpinWaveFunction wf;
  wf.grid = g;
  wf.arity = N;
  wf.dim = d;
  wf.statistics = Statistics::Fermionic;
  wf.alpha = alpha;
  wf.aux_k = aux.k;
  wf.gradient_constant = (d == 3 ? 24.0 : 36.0) * aux.k * aux.k;
  wf.variant = aux.variant;
  wf.source = psi;
  const std::int64_t total = psi.size();
  wf.components.assign(std::size_t(1) << N, {});

  // component table: spin index packs particle 1 as the most significant bit
  struct Entry {
    int spin;
    int first, second;  // particle pair feeding the g factors
    double sign;
    bool use_second_factor;
  };
  std::vector<Entry> entries;
  double coef = 1.0;
  if (N == 2) {
    entries = {{0b00, 0, 1, 1.0, false}, {0b11, 0, 1, 1.0, true}};
  } else {
    coef = 1.0 / std::sqrt(3.0);
    entries = {{0b001, 0, 1, 1.0, false}, {0b010, 0, 2, -1.0, false}, {0b100, 1, 2, 1.0, false},
               {0b110, 0, 1, 1.0, true},  {0b101, 0, 2, -1.0, true},  {0b011, 1, 2, 1.0, true}};
  }

  for (const Entry& e : entries) {
    auto& comp = wf.components[e.spin];
    comp.assign(total, {0.0, 0.0});
    parallel_for(total, [&](std::int64_t lo, std::int64_t hi) {
      double coords[12];
      int digits[12];
      for (std::int64_t i = lo; i < hi; ++i) {
        const double p = psi.values[i];
        if (p == 0.0) continue;
        decode_index(i, g.points_per_axis, d * N, digits);
        for (int b = 0; b < N; ++b)
          for (int a = 0; a < d; ++a) coords[b * d + a] = g.center(a, digits[b * d + a]);
        auto [g1, g2] = g_factors(&coords[e.first * d], &coords[e.second * d], d, aux);
        comp[i] = (e.use_second_factor ? g2 : g1) * (e.sign * coef * p);
      }
    });
  }
  return wf;
}

SpinWaveFunction build_bosonic(const ProductField& psi) {
  for (double v : psi.values)
    if (v < 0.0) throw error("invalid-input: bosonic psi must be nonnegative");
  check_symmetric(psi, 1e-10);
  SpinWaveFunction wf;
  wf.grid = psi.grid;
  wf.arity = psi.arity;
  wf.dim = psi.grid.dim;
  wf.statistics = Statistics::Bosonic;
  wf.source = psi;
  wf.components.assign(std::size_t(1) << psi.arity, {});
  auto& comp = wf.components[0];
  comp.resize(psi.size());
  for (std::int64_t i = 0; i < psi.size(); ++i) comp[i] = {psi.values[i], 0.0};
  return wf;
}

StatisticsReport verify_statistics(const SpinWaveFunction& wf) {
  StatisticsReport rep;
  const GridSpec& g = wf.grid;
  const int N = wf.arity;
  const std::int64_t total = wf.source.size();

  // density identity
  std::vector<double> dens = wf.density();
  for (std::int64_t i = 0; i < total; ++i) {
    const double want = wf.source.values[i] * wf.source.values[i];
    rep.max_density_error = std::max(rep.max_density_error, std::abs(dens[i] - want));
  }

  // statistics under transpositions
  std::vector<std::array<int, 3>> transpositions;
  if (N == 2) transpositions = {{1, 0, 2}};
  if (N == 3) transpositions = {{1, 0, 2}, {2, 1, 0}, {0, 2, 1}};
  const int num_comp = 1 << N;
  for (const auto& perm : transpositions) {
    for (int s = 0; s < num_comp; ++s) {
      // permuted spin state: bit of particle p comes from particle perm[p]
      int ps = 0;
      for (int p = 0; p < N; ++p) {
        const int bit = (s >> (N - 1 - perm[p])) & 1;
        ps |= bit << (N - 1 - p);
      }
      const auto& cs = wf.components[s];
      const auto& cps = wf.components[ps];
      for (std::int64_t i = 0; i < total; ++i) {
        const std::int64_t j = permuted_index(i, g, N, perm.data());
        const std::complex<double> lhs = cps.empty() ? std::complex<double>(0.0) : cps[j];
        const std::complex<double> rhs = cs.empty() ? std::complex<double>(0.0) : cs[i];
        if (wf.statistics == Statistics::Fermionic) {
          rep.max_antisymmetry_violation =
              std::max(rep.max_antisymmetry_violation, std::abs(lhs + rhs));
        } else {
          rep.max_symmetry_violation = std::max(rep.max_symmetry_violation, std::abs(lhs - rhs));
        }
      }
    }
  }
  rep.antisymmetry_checked = wf.statistics == Statistics::Fermionic;

  // cellwise gradient bound margin
  const int axes = wf.dim * N;
  std::vector<double> lhs_grad(total, 0.0);
  for (const auto& comp : wf.components) {
    if (comp.empty()) continue;
    std::vector<double> g2 = gradsq_complex(comp, g.points_per_axis, axes, g.spacing);
    for (std::int64_t i = 0; i < total; ++i) lhs_grad[i] += g2[i];
  }
  std::vector<double> psi_grad(total, 0.0);
  accumulate_gradsq(wf.source.values, g.points_per_axis, axes, g.spacing, psi_grad);
  const double c_over_a2 =
      wf.alpha > 0.0 ? wf.gradient_constant / (wf.alpha * wf.alpha) : 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < total; ++i) {
    const double bound = psi_grad[i] + c_over_a2 * wf.source.values[i] * wf.source.values[i];
    margin = std::min(margin, bound - lhs_grad[i]);
  }
  rep.min_gradient_margin = margin;
  return rep;
}

}  // namespace mmot
