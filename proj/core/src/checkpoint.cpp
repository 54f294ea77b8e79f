#include "oldroyd/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "oldroyd/errors.hpp"

namespace oldroyd {
namespace {

constexpr std::array<char, 4> kMagic{'O', 'L', 'D', 'B'};

template <class T>
void put(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                     std::uint8_t>>>;
  auto bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  }
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                     std::uint8_t>>>;
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw IoError("checkpoint truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

std::size_t payload_size(const Grid& grid, Representation rep, int components) {
  const std::size_t per = rep == Representation::physical ? grid.physical_points()
                                                          : 2 * grid.spectral_modes();
  return per * static_cast<std::size_t>(components);
}

}  // namespace

void write_record(std::ostream& out, const FieldRecord& r) {
  if (r.payload.size() != payload_size(r.grid, r.representation, r.components)) {
    throw IoError("checkpoint payload size does not match its header");
  }
  out.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(out, kCheckpointVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(r.grid.dim()));
  for (int a = 0; a < r.grid.dim(); ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(r.grid.size()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(r.representation));
  put<std::uint16_t>(out, static_cast<std::uint16_t>(r.components));
  for (double v : r.payload) put<double>(out, v);
  if (!out) throw IoError("checkpoint write failed");
}

FieldRecord read_record(std::istream& in, double dealias_fraction) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not a field checkpoint (bad magic)");
  const auto version = get<std::uint16_t>(in);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  const int dim = get<std::uint8_t>(in);
  if (dim != 2 && dim != 3) throw IoError("checkpoint dimension must be 2 or 3");
  std::uint32_t size = 0;
  for (int a = 0; a < dim; ++a) {
    const auto s = get<std::uint32_t>(in);
    if (a > 0 && s != size) throw IoError("checkpoint grid is not isotropic");
    size = s;
  }
  const auto rep_tag = get<std::uint8_t>(in);
  if (rep_tag > 1) throw IoError("checkpoint has an unknown representation tag");
  const int components = get<std::uint16_t>(in);

  FieldRecord r{Grid(dim, static_cast<int>(size), dealias_fraction),
                static_cast<Representation>(rep_tag), components, {}};
  r.payload.resize(payload_size(r.grid, r.representation, components));
  for (auto& v : r.payload) v = get<double>(in);
  return r;
}

void save_record(const std::filesystem::path& path, const FieldRecord& record) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_record(out, record);
}

FieldRecord load_record(const std::filesystem::path& path, double dealias_fraction) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_record(in, dealias_fraction);
}

}  // namespace oldroyd
