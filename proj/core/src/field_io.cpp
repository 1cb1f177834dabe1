#include "fiolab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace fiolab {

namespace {

constexpr char kMagic[8] = {'F', 'I', 'O', 'L', 'A', 'B', '0', '1'};

template <class T>
void put_le(std::string& buf, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  buf.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(const char* p) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_field(const Field& f, const std::string& path) {
  std::string buf;
  buf.reserve(32 + 16 * f.values.size());
  buf.append(kMagic, 8);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.n));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.points_per_axis));
  put_le<double>(buf, f.grid.extent);
  buf.append(8, '\0');
  for (const cplx& v : f.values) {
    put_le<double>(buf, v.real());
    put_le<double>(buf, v.imag());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 32 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw std::runtime_error("not a field file: " + path);
  Grid g;
  g.n = static_cast<int>(get_le<std::uint32_t>(buf.data() + 8));
  g.points_per_axis = static_cast<int>(get_le<std::uint32_t>(buf.data() + 12));
  g.extent = get_le<double>(buf.data() + 16);
  if (g.n < 1 || g.n > kMaxDim || g.points_per_axis < 1)
    throw std::runtime_error("corrupt field header: " + path);
  const std::size_t count = g.size();
  if (buf.size() != 32 + 16 * count) throw std::runtime_error("field length mismatch: " + path);
  std::ifstream side(path + ".json");
  if (side) {
    const auto meta = nlohmann::json::parse(side, nullptr, false);
    if (meta.is_object() && meta.contains("center"))
      for (int d = 0; d < g.n && d < static_cast<int>(meta["center"].size()); ++d)
        g.center[d] = meta["center"][d].get<double>();
  }
  Field f(g);
  const char* p = buf.data() + 32;
  for (std::size_t i = 0; i < count; ++i, p += 16)
    f.values[i] = cplx(get_le<double>(p), get_le<double>(p + 8));
  return f;
}

nlohmann::json grid_metadata(const Grid& g) {
  nlohmann::json j;
  j["n"] = g.n;
  j["points_per_axis"] = g.points_per_axis;
  j["extent"] = g.extent;
  j["spacing"] = g.spacing();
  j["center"] = std::vector<double>(g.center.begin(), g.center.begin() + g.n);
  j["layout"] = "row-major, last axis fastest, little-endian (re, im) float64";
  return j;
}

void write_field_with_sidecar(const Field& f, const std::string& path) {
  write_field(f, path);
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("cannot open " + path + ".json for writing");
  side << grid_metadata(f.grid).dump(2) << "\n";
}

}  // namespace fiolab
