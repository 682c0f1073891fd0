#include "mmot/dgf.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "mmot/errors.hpp"

namespace mmot {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'F', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u32(std::FILE* f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  if (std::fwrite(b, 1, 4, f) != 4) throw error("dgf1: short write");
}

std::uint32_t get_u32(std::FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw error("dgf1: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::FILE* f, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  if (std::fwrite(b, 1, 8, f) != 8) throw error("dgf1: short write");
}

double get_f64(std::FILE* f) {
  unsigned char b[8];
  if (std::fread(b, 1, 8, f) != 8) throw error("dgf1: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_dgf1(const std::string& path, std::uint32_t dim, std::uint32_t arity,
                std::uint32_t points_per_axis, const std::vector<double>& values) {
  std::uint64_t expect = 1;
  for (std::uint32_t a = 0; a < dim * arity; ++a) expect *= points_per_axis;
  if (values.size() != expect) throw error("dgf1: value count does not match header");
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw error("dgf1: cannot open for writing: " + path);
  if (std::fwrite(kMagic, 1, 4, f.get()) != 4) throw error("dgf1: short write");
  put_u32(f.get(), dim);
  put_u32(f.get(), arity);
  put_u32(f.get(), points_per_axis);
  for (double v : values) put_f64(f.get(), v);
}

void write_dgf1(const std::string& path, const DiscreteDensity& rho) {
  write_dgf1(path, static_cast<std::uint32_t>(rho.grid.dim), 1,
             static_cast<std::uint32_t>(rho.grid.points_per_axis), rho.values);
}

void write_dgf1(const std::string& path, const ProductField& field) {
  write_dgf1(path, static_cast<std::uint32_t>(field.grid.dim),
             static_cast<std::uint32_t>(field.arity),
             static_cast<std::uint32_t>(field.grid.points_per_axis), field.values);
}

Dgf1Data read_dgf1(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw error("dgf1: cannot open: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw error("dgf1: bad magic bytes");
  Dgf1Data d;
  d.dim = get_u32(f.get());
  d.arity = get_u32(f.get());
  d.points_per_axis = get_u32(f.get());
  if (d.dim == 0 || d.arity == 0 || d.points_per_axis < 2 || d.dim * d.arity > 16)
    throw error("dgf1: implausible header");
  std::uint64_t count = 1;
  for (std::uint32_t a = 0; a < d.dim * d.arity; ++a) {
    count *= d.points_per_axis;
    if (count > (1ull << 27)) throw error("dgf1: payload too large");
  }
  d.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) d.values[i] = get_f64(f.get());
  return d;
}

DiscreteDensity read_density_dgf1(const std::string& path, const GridSpec& grid) {
  Dgf1Data d = read_dgf1(path);
  if (d.arity != 1) throw error("dgf1: expected a density file (N = 1)");
  if (static_cast<int>(d.dim) != grid.dim ||
      static_cast<int>(d.points_per_axis) != grid.points_per_axis)
    throw error("dgf1: file header does not match the requested grid");
  DensitySpec spec;
  spec.kind = DensitySpec::Kind::Values;
  spec.values = std::move(d.values);
  return ingest_density(grid, spec);
}

}  // namespace mmot
