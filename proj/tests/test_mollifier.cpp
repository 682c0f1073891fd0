#include <doctest.h>

#include <cmath>

#include "mmot/errors.hpp"
#include "mmot/mollifier.hpp"

using namespace mmot;

// regression constants from a 30-digit quadrature of the radial integrals
namespace {
constexpr double kRef[5] = {0.0, 2.2522836210435810, 2.1435657757922366, 2.2671167396083265,
                            2.6111325086271232};
constexpr double kRefK[5] = {0.0, 12.576977273625816, 29.728531117906592, 50.921086711232914,
                             75.844512159603032};
}  // namespace

TEST_CASE("mollifier constants match the quadrature oracle") {
  for (int d = 1; d <= 4; ++d) {
    auto [k, K] = mollifier_constant(d);
    CHECK(k == doctest::Approx(kRef[d]).epsilon(1e-10));
    CHECK(K == doctest::Approx(kRefK[d]).epsilon(1e-10));
    CHECK(K > 0.0);
  }
  CHECK_THROWS_AS(mollifier_constant(5), error);
  CHECK_THROWS_AS(mollifier_constant(0), error);
}

TEST_CASE("unit mass under quadrature") {
  // midpoint sum of eta_eps over a fine grid covering the support
  for (int d = 1; d <= 2; ++d) {
    MollifierSpec m = make_mollifier(d, 0.7);
    const int n = 400;
    const double h = 2.0 * m.eps / n;
    double sum = 0.0;
    std::vector<double> x(d);
    long total = 1;
    for (int a = 0; a < d; ++a) total *= n;
    for (long i = 0; i < total; ++i) {
      long r = i;
      for (int a = d - 1; a >= 0; --a) {
        x[a] = -m.eps + (static_cast<int>(r % n) + 0.5) * h;
        r /= n;
      }
      sum += mollifier_value(m, x.data());
    }
    double vol = 1.0;
    for (int a = 0; a < d; ++a) vol *= h;
    CHECK(sum * vol == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("relative gradient energy scales as 1/eps^2") {
  // same absolute sample spacing across both widths, so the two sums probe
  // the kernel at genuinely different relative positions
  for (int d = 1; d <= 2; ++d) {
    const double e1 = discrete_kernel_energy(d, 1.0, 256);
    const double e2 = discrete_kernel_energy(d, 0.5, 128);
    CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.02));
    auto [k, K] = mollifier_constant(d);
    (void)k;
    CHECK(e1 == doctest::Approx(K).epsilon(0.02));
  }
}

TEST_CASE("kernel sampling stays inside the support") {
  KernelTaps taps = sample_kernel(2, 0.5, 0.1);
  for (std::size_t t = 0; t < taps.offsets.size(); ++t) {
    double q = 0.0;
    for (int a = 0; a < 2; ++a) q += taps.offsets[t][a] * 0.1 * taps.offsets[t][a] * 0.1;
    CHECK(q < 0.25);
    CHECK(taps.weights[t] > 0.0);
  }
}
