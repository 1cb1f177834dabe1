#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "fiolab/field_io.hpp"

using namespace fiolab;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

Field sample(const Point& center) {
  Grid g;
  g.n = 2;
  g.extent = 1.5;
  g.points_per_axis = 12;
  g.center = center;
  return sample_field(g, [](const Point& x) { return cplx(x[0] * x[1], std::cos(x[0])); });
}

}  // namespace

TEST(FieldIo, RoundTripIsBitExact) {
  const auto p = temp_path("fiolab_io_roundtrip.bin");
  const Field f = sample(Point{});
  write_field(f, p.string());
  const Field g = read_field(p.string());
  EXPECT_EQ(g.grid.n, 2);
  EXPECT_EQ(g.grid.points_per_axis, 12);
  EXPECT_EQ(g.grid.extent, 1.5);
  EXPECT_EQ(g.values, f.values);
  std::filesystem::remove(p);
}

TEST(FieldIo, HeaderLayout) {
  const auto p = temp_path("fiolab_io_header.bin");
  const Field f = sample(Point{});
  write_field(f, p.string());
  std::ifstream in(p, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_EQ(bytes.size(), 32u + f.values.size() * 16u);
  EXPECT_EQ(std::string(bytes.data(), 8), "FIOLAB01");
  std::uint32_t n = 0, pts = 0;
  double extent = 0.0, re = 0.0;
  std::memcpy(&n, bytes.data() + 8, 4);
  std::memcpy(&pts, bytes.data() + 12, 4);
  std::memcpy(&extent, bytes.data() + 16, 8);
  std::memcpy(&re, bytes.data() + 32, 8);
  EXPECT_EQ(n, 2u);
  EXPECT_EQ(pts, 12u);
  EXPECT_EQ(extent, 1.5);
  EXPECT_EQ(re, f.values[0].real());
  std::filesystem::remove(p);
}

TEST(FieldIo, SidecarCarriesCentre) {
  const auto p = temp_path("fiolab_io_sidecar.bin");
  const Field f = sample(Point{2.0, -1.0, 0.0});
  write_field_with_sidecar(f, p.string());
  const Field g = read_field(p.string());
  EXPECT_EQ(g.grid.center[0], 2.0);
  EXPECT_EQ(g.grid.center[1], -1.0);
  const auto meta = grid_metadata(f.grid);
  EXPECT_EQ(meta["points_per_axis"], 12);
  std::filesystem::remove(p);
  std::filesystem::remove(p.string() + ".json");
}

TEST(FieldIo, ErrorsOnBadInput) {
  EXPECT_THROW(read_field("/nonexistent/field.bin"), std::runtime_error);
  const auto p = temp_path("fiolab_io_bad.bin");
  {
    std::ofstream out(p, std::ios::binary);
    out << "NOTAFIELD_________________________________";
  }
  EXPECT_THROW(read_field(p.string()), std::runtime_error);
  std::filesystem::remove(p);
}
