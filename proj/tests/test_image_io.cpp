#include <doctest.h>

#include <cstdio>
#include <random>
#include <string>

#include "msd/image.hpp"
#include "msd/io_util.hpp"

using namespace msd;

namespace {
std::string tmp_path(const std::string& name) { return "/tmp/msd_test_" + name; }
} // namespace

TEST_CASE("csv image round trip is lossless") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  ImageGrid g(5, 7);
  for (double& v : g.v) v = d(rng);
  const std::string path = tmp_path("roundtrip.csv");
  save_csv_image(g, path);
  ImageGrid h = load_csv_image(path);
  REQUIRE(h.width == 5);
  REQUIRE(h.height == 7);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.v[i] == h.v[i]);
  std::remove(path.c_str());
}

TEST_CASE("p2 normalization maps maxval to 1.0") {
  const std::string path = tmp_path("p2.pgm");
  write_text_file(path, "P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n");
  ImageGrid g = load_pgm(path);
  REQUIRE(g.width == 3);
  REQUIRE(g.height == 2);
  CHECK(g.at(2, 0) == 1.0);
  CHECK(g.at(0, 0) == 0.0);
  CHECK(g.at(1, 0) == doctest::Approx(128.0 / 255.0));
  std::remove(path.c_str());
}

TEST_CASE("p2 and p5 encodings of the same image load identically") {
  ImageGrid g(4, 3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (double& v : g.v) v = d(rng);
  const std::string pa = tmp_path("a.pgm"), pb = tmp_path("b.pgm");
  save_pgm(g, pa, 255, false);
  save_pgm(g, pb, 255, true);
  ImageGrid ga = load_pgm(pa), gb = load_pgm(pb);
  for (std::size_t i = 0; i < ga.size(); ++i) CHECK(ga.v[i] == gb.v[i]);
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

TEST_CASE("16-bit pgm round trip") {
  ImageGrid g(3, 3);
  for (std::size_t i = 0; i < g.size(); ++i) g.v[i] = static_cast<double>(i) / 8.0;
  const std::string p = tmp_path("wide.pgm");
  save_pgm(g, p, 65535, true);
  ImageGrid h = load_pgm(p);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(h.v[i] == doctest::Approx(g.v[i]).epsilon(1e-4));
  std::remove(p.c_str());
}

TEST_CASE("malformed pgm headers carry a byte offset") {
  const std::string p = tmp_path("bad.pgm");
  write_text_file(p, "P2\n3 2\n");
  CHECK_THROWS_WITH_AS(load_pgm(p), doctest::Contains("byte"), std::runtime_error);
  write_text_file(p, "P7\n3 2\n255\n");
  CHECK_THROWS(load_pgm(p));
  write_text_file(p, "P2\n3 2\n70000\n0 0 0 0 0 0\n");
  CHECK_THROWS(load_pgm(p));
  // truncated binary raster
  write_text_file(p, std::string("P5\n3 2\n255\n") + "ab");
  CHECK_THROWS(load_pgm(p));
  std::remove(p.c_str());
}

TEST_CASE("save clamps and quantizes") {
  ImageGrid g(2, 1);
  g.v = {-0.5, 2.0};
  const std::string p = tmp_path("clamp.pgm");
  save_pgm(g, p, 255, false);
  ImageGrid h = load_pgm(p);
  CHECK(h.v[0] == 0.0);
  CHECK(h.v[1] == 1.0);
  std::remove(p.c_str());
}

TEST_CASE("grid norms use the h measure") {
  ImageGrid g(2, 2, 3.0, 0.5);
  // ||g||_2 = sqrt(sum 9 * h^2) = sqrt(36) * 0.5... four pixels of value 3
  CHECK(g.l2_norm() == doctest::Approx(std::sqrt(4.0 * 9.0) * 0.5));
  CHECK(g.l1_norm() == doctest::Approx(4.0 * 3.0 * 0.25));
}
