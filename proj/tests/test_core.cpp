#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>

#include "tryon/core/bilinear.hpp"
#include "tryon/core/camera.hpp"
#include "tryon/core/config.hpp"
#include "tryon/core/io.hpp"
#include "tryon/core/mesh.hpp"
#include "tryon/core/rng.hpp"

using namespace tryon;

namespace {

Raster random_raster(int h, int w, int c, Rng& rng) {
  Raster r(h, w, c);
  for (auto& v : r.data) v = static_cast<float>(rng.uniform());
  return r;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "tryon3d_core_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("bilinear_sample with the identity grid reproduces the input exactly") {
  Rng rng(1);
  const Raster map = random_raster(9, 13, 3, rng);
  const Raster out = bilinear_sample(map, identity_grid(9, 13));
  for (size_t i = 0; i < map.data.size(); ++i) CHECK(out.data[i] == map.data[i]);
}

TEST_CASE("bilinear_sample at the center of a 2x2 map averages all four taps") {
  Raster map(2, 2, 1);
  map.at(0, 0, 0) = 0.0f;
  map.at(0, 1, 0) = 1.0f;
  map.at(1, 0, 0) = 2.0f;
  map.at(1, 1, 0) = 3.0f;
  Raster coords(1, 1, 2);
  coords.at(0, 0, 0) = 0.5f;
  coords.at(0, 0, 1) = 0.5f;
  const Raster out = bilinear_sample(map, coords);
  CHECK(out.at(0, 0, 0) == doctest::Approx(1.5).epsilon(1e-7));
}

TEST_CASE("half-pixel shift on a horizontal ramp lands on neighbor midpoints") {
  const int h = 6, w = 10;
  Raster ramp(h, w, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) ramp.at(y, x, 0) = static_cast<float>(x);
  Raster coords = identity_grid(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) coords.at(y, x, 0) += 0.5f;
  const Raster out = bilinear_sample(ramp, coords);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x) {
      const float mid = 0.5f * (ramp.at(y, x, 0) + ramp.at(y, x + 1, 0));
      CHECK(out.at(y, x, 0) == doctest::Approx(mid).epsilon(1e-6));
    }
}

TEST_CASE("bilinear_sample is linear in the map argument") {
  Rng rng(2);
  const Raster x = random_raster(7, 7, 2, rng);
  const Raster y = random_raster(7, 7, 2, rng);
  Raster coords(5, 5, 2);
  for (auto& v : coords.data) v = static_cast<float>(rng.uniform(-1.0, 8.0));
  const float a = 0.7f, b = -1.3f;
  Raster combo(7, 7, 2);
  for (size_t i = 0; i < combo.data.size(); ++i) combo.data[i] = a * x.data[i] + b * y.data[i];
  const Raster lhs = bilinear_sample(combo, coords);
  const Raster sx = bilinear_sample(x, coords);
  const Raster sy = bilinear_sample(y, coords);
  for (size_t i = 0; i < lhs.data.size(); ++i)
    CHECK(lhs.data[i] == doctest::Approx(a * sx.data[i] + b * sy.data[i]).epsilon(1e-6));
}

TEST_CASE("bilinear_sample clamps to the border and rejects non-finite coords") {
  Rng rng(3);
  const Raster map = random_raster(4, 4, 1, rng);
  Raster coords(1, 2, 2);
  coords.at(0, 0, 0) = -5.0f;  // far left -> clamp to column 0
  coords.at(0, 0, 1) = 1.0f;
  coords.at(0, 1, 0) = 100.0f;  // far right -> clamp to last column
  coords.at(0, 1, 1) = 1.0f;
  const Raster out = bilinear_sample(map, coords);
  CHECK(out.at(0, 0, 0) == map.at(1, 0, 0));
  CHECK(out.at(0, 1, 0) == map.at(1, 3, 0));

  coords.at(0, 0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(bilinear_sample(map, coords), ValidationError);
}

TEST_CASE("ParsingMap one-hot invariants and re_one_hot") {
  ParsingMap p(4, 4, 5);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) p.set_label(y, x, (y + x) % 5);
  CHECK(p.is_one_hot());
  p.at(1, 1, 0) = 0.4f;
  p.at(1, 1, 2) = 0.6f;
  CHECK_FALSE(p.is_one_hot());
  p.re_one_hot();
  CHECK(p.is_one_hot());
  CHECK(p.label_at(1, 1) == 2);
}

TEST_CASE("tetrahedron is watertight; open fan is not") {
  TexturedMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  mesh.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  CHECK(mesh.is_watertight());
  CHECK(mesh.indices_in_range());
  mesh.triangles.pop_back();
  CHECK_FALSE(mesh.is_watertight());
}

TEST_CASE("degenerate triangle removal") {
  TexturedMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  mesh.triangles = {{0, 1, 2}, {0, 1, 1}};
  mesh.triangle_regions = {4, 7};
  mesh.remove_degenerate_triangles();
  REQUIRE(mesh.triangles.size() == 1);
  CHECK(mesh.triangle_regions == std::vector<int>{4});
}

TEST_CASE("weak-perspective projection identities") {
  WeakPerspectiveCamera cam;  // identity rotation, scale 1, zero offsets
  const auto p = project(cam, {0.3f, -0.2f, 0.9f});
  CHECK(p.x == doctest::Approx(0.3));
  CHECK(p.y == doctest::Approx(-0.2));
  CHECK(p.z == doctest::Approx(0.9));

  const auto flip = WeakPerspectiveCamera::turntable(180.0f, 1.0f, 0.0f, 0.0f);
  CHECK(flip.valid());
  const auto q = project(flip, {0.3f, -0.2f, 0.9f});
  CHECK(q.x == doctest::Approx(-0.3).epsilon(1e-5));
  CHECK(q.y == doctest::Approx(-0.2));
  CHECK(q.z == doctest::Approx(-0.9).epsilon(1e-5));
}

TEST_CASE("field persistence round-trips bit-exactly") {
  Rng rng(4);
  Raster r = random_raster(5, 7, 4, rng);
  r.at(0, 0, 0) = 1e-30f;  // denormal-ish values must survive too
  const auto path = (temp_dir() / "field.tfld").string();
  write_field(r, path);
  const Raster back = read_field(path);
  REQUIRE(back.same_shape(r));
  for (size_t i = 0; i < r.data.size(); ++i)
    CHECK(std::memcmp(&back.data[i], &r.data[i], sizeof(float)) == 0);
}

TEST_CASE("PPM preview round-trips to 8-bit accuracy") {
  Rng rng(5);
  Raster r = random_raster(8, 8, 3, rng);
  const auto path = (temp_dir() / "img.ppm").string();
  write_ppm(r, path);
  const Image back = read_ppm(path);
  for (size_t i = 0; i < r.data.size(); ++i)
    CHECK(std::fabs(back.data[i] - r.data[i]) <= 0.5f / 255.0f + 1e-6f);
}

TEST_CASE("PLY round-trip preserves geometry and quantized colors") {
  TexturedMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  mesh.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  mesh.vertex_colors = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5f, 0.5f, 0.5f}};
  const auto path = (temp_dir() / "mesh.ply").string();
  write_ply(mesh, path);
  const TexturedMesh back = read_ply(path);
  REQUIRE(back.vertices.size() == 4);
  REQUIRE(back.triangles.size() == 4);
  CHECK(back.vertices[1].x == doctest::Approx(1.0));
  CHECK(back.vertex_colors[0].x == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(back.is_watertight());
}

TEST_CASE("volume dump round-trips") {
  OccupancyGrid g;
  g.nx = 3; g.ny = 4; g.nz = 5;
  g.bbox_lo = {-1, -2, -3};
  g.bbox_hi = {1, 2, 3};
  g.values.resize(60);
  for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = static_cast<float>(i) * 0.25f;
  const auto path = (temp_dir() / "vol.vol").string();
  write_volume(g, path);
  const OccupancyGrid back = read_volume(path);
  CHECK(back.nx == 3);
  CHECK(back.bbox_hi.z == doctest::Approx(3.0));
  CHECK(back.values == g.values);
}

TEST_CASE("TrainConfig JSON round-trip and validation") {
  TrainConfig cfg;
  cfg.alpha = 50.0;
  cfg.patch_n = 7;
  cfg.lambdas = {1, 2, 3, 4, 5, 6};
  const auto path = (temp_dir() / "cfg.json").string();
  save_config(cfg, path);
  const TrainConfig back = load_config(path);
  CHECK(back.alpha == doctest::Approx(50.0));
  CHECK(back.patch_n == 7);
  CHECK(back.lambdas[5] == doctest::Approx(6.0));
  CHECK(config_hash(back) == config_hash(cfg));

  TrainConfig bad;
  bad.patch_n = 4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.patch_n = 5;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("Rng streams are deterministic and independent") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng s1 = sub_rng(7, 1, 2), s2 = sub_rng(7, 2, 1);
  CHECK(s1.next_u64() != s2.next_u64());
}
