#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/grid.hpp"

namespace mmot {

// Grid file format "DGF1": magic bytes `DGF1`, little-endian u32 d, N, n,
// then n^(d*N) little-endian IEEE-754 doubles, row-major, last axis fastest.
// Densities use N = 1; plans and wavefunction components use N > 1.
struct Dgf1Data {
  std::uint32_t dim = 0;
  std::uint32_t arity = 0;
  std::uint32_t points_per_axis = 0;
  std::vector<double> values;
};

void write_dgf1(const std::string& path, std::uint32_t dim, std::uint32_t arity,
                std::uint32_t points_per_axis, const std::vector<double>& values);
void write_dgf1(const std::string& path, const DiscreteDensity& rho);
void write_dgf1(const std::string& path, const ProductField& field);

Dgf1Data read_dgf1(const std::string& path);

// Reads a density payload and ingests it onto the given grid (renormalizing).
DiscreteDensity read_density_dgf1(const std::string& path, const GridSpec& grid);

}  // namespace mmot
