#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>

#include "mmot/dgf.hpp"
#include "mmot/errors.hpp"
#include "mmot/rng.hpp"

using namespace mmot;

TEST_CASE("dgf1 round-trips bit-exactly") {
  Rng rng(1234);
  std::vector<double> values(3 * 3 * 3 * 3);  // d=2, N=2, n=3
  for (auto& v : values) {
    // mix magnitudes and signs, plus a few special values
    v = (rng.next_double() - 0.5) * std::pow(10.0, rng.uniform(-12, 12));
  }
  values[0] = 0.0;
  values[1] = -0.0;
  values[2] = 1e-308;
  const std::string path = "roundtrip.dgf1";
  write_dgf1(path, 2, 2, 3, values);
  Dgf1Data d = read_dgf1(path);
  CHECK(d.dim == 2);
  CHECK(d.arity == 2);
  CHECK(d.points_per_axis == 3);
  REQUIRE(d.values.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(std::memcmp(&d.values[i], &values[i], 8) == 0);
  }
  std::remove(path.c_str());
}

TEST_CASE("dgf1 header validation") {
  const std::string path = "bad.dgf1";
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fwrite("NOPE", 1, 4, f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_dgf1(path), error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_dgf1("missing.dgf1"), error);
  CHECK_THROWS_AS(write_dgf1(path, 1, 1, 4, std::vector<double>(3, 0.0)), error);
}

TEST_CASE("density file ingest validates the grid") {
  GridSpec g = build_grid(1, 0.0, 1.0, 8);
  std::vector<double> v(8, 1.0);
  write_dgf1("rho.dgf1", 1, 1, 8, v);
  DiscreteDensity rho = read_density_dgf1("rho.dgf1", g);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-14));
  GridSpec wrong = build_grid(1, 0.0, 1.0, 16);
  CHECK_THROWS_AS(read_density_dgf1("rho.dgf1", wrong), error);
  std::remove("rho.dgf1");
}
