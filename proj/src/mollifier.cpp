#include "mmot/mollifier.hpp"

#include <cmath>
#include <functional>

#include "mmot/errors.hpp"

namespace mmot {

double bump_profile(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t2));
}

namespace {

// Adaptive Simpson on [a, b]; integrands here are smooth on [0, 1) and decay
// to 0 superpolynomially at 1, so plain bisection refinement converges fast.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_01(const std::function<double(double)>& f, double tol) {
  const double fa = f(0.0), fb = f(1.0), fm = f(0.5);
  const double whole = 1.0 / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole, tol, 48);
}

double unit_sphere_area(int d) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

std::pair<double, double> mollifier_constant(int d) {
  if (d < 1 || d > 4) throw error("mollifier: unsupported dimension");
  static std::pair<double, double> cache[5];
  static bool have[5] = {};
  if (have[d]) return cache[d];
  const double area = unit_sphere_area(d);
  const double mass_integral =
      integrate_01([d](double t) { return bump_profile(t) * std::pow(t, d - 1); }, 1e-14);
  const double k = 1.0 / (area * mass_integral);
  // int_B 4k |v|^2 / (1-|v|^2)^4 exp(-1/(1-|v|^2)) dv
  const double energy_integral = integrate_01(
      [d](double t) {
        const double one = 1.0 - t * t;
        if (one <= 0.0) return 0.0;
        return 4.0 * t * t / (one * one * one * one) * bump_profile(t) * std::pow(t, d - 1);
      },
      1e-14);
  const double K = k * area * energy_integral;
  cache[d] = {k, K};
  have[d] = true;
  return cache[d];
}

MollifierSpec make_mollifier(int d, double eps) {
  if (!(eps > 0.0)) throw error("mollifier: width must be positive");
  auto [k, K] = mollifier_constant(d);
  return MollifierSpec{d, eps, k, K};
}

double mollifier_value(const MollifierSpec& m, const double* u) {
  double t2 = 0.0;
  for (int a = 0; a < m.dim; ++a) t2 += (u[a] / m.eps) * (u[a] / m.eps);
  if (t2 >= 1.0) return 0.0;
  return m.normalization * std::pow(m.eps, -m.dim) * std::exp(-1.0 / (1.0 - t2));
}

KernelTaps sample_kernel(int dim, double eps, double h) {
  KernelTaps taps;
  taps.dim = dim;
  taps.reach = static_cast<int>(std::ceil(eps / h)) - 1;
  if (taps.reach < 0) taps.reach = 0;
  std::vector<int> off(dim, -taps.reach);
  while (true) {
    double t2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double u = off[a] * h / eps;
      t2 += u * u;
    }
    if (t2 < 1.0) {
      taps.offsets.push_back(off);
      taps.weights.push_back(std::exp(-1.0 / (1.0 - t2)));
    }
    int a = dim - 1;
    while (a >= 0 && ++off[a] > taps.reach) off[a--] = -taps.reach;
    if (a < 0) break;
  }
  return taps;
}

double discrete_kernel_energy(int dim, double eps, int samples) {
  // Midpoint sum of |grad eta_eps|^2 / eta_eps over a cube [-eps, eps]^dim
  // with `samples` points per axis. The ratio is evaluated from the closed
  // form of grad eta: finite differences are useless here because eta spans
  // hundreds of decades per cell near the support edge.
  auto [k, K] = mollifier_constant(dim);
  (void)K;
  const double h = 2.0 * eps / samples;
  std::int64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= samples;
  double sum = 0.0;
  std::vector<double> x(dim);
  for (std::int64_t i = 0; i < total; ++i) {
    std::int64_t r = i;
    double t2 = 0.0;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = -eps + (static_cast<int>(r % samples) + 0.5) * h;
      r /= samples;
      t2 += (x[a] / eps) * (x[a] / eps);
    }
    const double one = 1.0 - t2;
    if (one <= 0.0) continue;
    // |grad eta(v)|^2 / eta(v) = 4 k |v|^2 / (1-|v|^2)^4 exp(-1/(1-|v|^2))
    sum += 4.0 * k * t2 / (one * one * one * one) * std::exp(-1.0 / one);
  }
  double vol = 1.0;
  for (int a = 0; a < dim; ++a) vol *= h / eps;  // change of variables u = x/eps
  return sum * vol / (eps * eps);
}

}  // namespace mmot
