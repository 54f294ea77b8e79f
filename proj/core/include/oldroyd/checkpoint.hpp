#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "oldroyd/field.hpp"

namespace oldroyd {

// Binary field record, all integers and floats little-endian:
//
//   offset  size        content
//   0       4           magic "OLDB"
//   4       2  u16      format version (1)
//   6       1  u8       dimension n
//   7       4n u32      points per axis
//   7+4n    1  u8       representation (0 physical, 1 spectral)
//   8+4n    2  u16      component count
//   10+4n   ...         f64 payload, component by component
//
// A physical component is size^n values in row-major order. A spectral
// component is the half layout size^(n-1) * (size/2+1) in row-major order,
// each coefficient written as (real, imaginary). The dealiasing fraction is
// not part of the record; readers supply it.
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct FieldRecord {
  Grid grid;
  Representation representation;
  int components;
  /// Flattened payload exactly as stored (complex values as re/im pairs).
  std::vector<double> payload;
};

void write_record(std::ostream& out, const FieldRecord& record);
FieldRecord read_record(std::istream& in, double dealias_fraction = Grid::kDefaultDealias);

template <class Shape>
FieldRecord to_record(const Field<Shape>& f) {
  FieldRecord r{f.grid(), f.representation(), f.components(), {}};
  if (f.is_spectral()) {
    const auto c = f.all_coefficients();
    r.payload.reserve(2 * c.size());
    for (const auto& z : c) {
      r.payload.push_back(z.real());
      r.payload.push_back(z.imag());
    }
  } else {
    const auto v = f.all_values();
    r.payload.assign(v.begin(), v.end());
  }
  return r;
}

template <class Shape>
Field<Shape> from_record(const FieldRecord& r) {
  if (r.components != Shape::components(r.grid.dim())) {
    throw IoError("checkpoint component count does not match the requested field type");
  }
  Field<Shape> f(r.grid, r.representation);
  if (f.is_spectral()) {
    auto c = f.all_coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = Complex(r.payload[2 * i], r.payload[2 * i + 1]);
  } else {
    auto v = f.all_values();
    std::copy(r.payload.begin(), r.payload.end(), v.begin());
  }
  return f;
}

void save_record(const std::filesystem::path& path, const FieldRecord& record);
FieldRecord load_record(const std::filesystem::path& path,
                        double dealias_fraction = Grid::kDefaultDealias);

template <class Shape>
void save_field(const std::filesystem::path& path, const Field<Shape>& f) {
  save_record(path, to_record(f));
}

template <class Shape>
Field<Shape> load_field(const std::filesystem::path& path,
                        double dealias_fraction = Grid::kDefaultDealias) {
  return from_record<Shape>(load_record(path, dealias_fraction));
}

}  // namespace oldroyd
