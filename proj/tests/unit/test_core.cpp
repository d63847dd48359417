#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "mixncut/error.hpp"
#include "mixncut/graph.hpp"
#include "mixncut/image.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/rng.hpp"

using namespace mixncut;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& bytes) {
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << bytes;
  return p;
}

Errc load_error(const fs::path& p) {
  try {
    load_image(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("load_image did not throw");
  return Errc::invalid_argument;
}

// Reads "w h d\n v v v ..." written by make_fixtures.py from Pillow.
AppearanceImage reference(const std::string& name) {
  std::ifstream in(testing::data_path(name));
  std::size_t w = 0, h = 0, d = 0;
  in >> w >> h >> d;
  std::vector<double> v(w * h * d);
  for (double& x : v) in >> x;
  REQUIRE(in);
  return AppearanceImage(w, h, d, std::move(v));
}

}  // namespace

TEST_CASE("load_image: 2x2 all-black graymap") {
  const auto dir = testing::scratch_dir("core_black");
  for (const std::string& bytes :
       {std::string("P5\n2 2\n255\n") + std::string(4, '\0'),
        std::string("P2\n# comment\n2 2\n255\n0 0\n0 0\n")}) {
    const auto img = load_image(write_file(dir, "black.pgm", bytes));
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.dim() == 1);
    for (double v : img.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("load_image: 1x1 white graymap") {
  const auto dir = testing::scratch_dir("core_white");
  const auto img =
      load_image(write_file(dir, "white.pgm", "P5 1 1 255\n\xff"));
  REQUIRE(img.data().size() == 1);
  CHECK(img.at(0) == 255.0);
}

TEST_CASE("load_image: maxval and 16-bit samples scale to [0, 255]") {
  const auto dir = testing::scratch_dir("core_maxval");
  auto img = load_image(write_file(dir, "a.pgm", "P2 3 1 15 0 15 5"));
  CHECK(img.at(0) == 0.0);
  CHECK(img.at(1) == 255.0);
  CHECK(img.at(2) == doctest::Approx(85.0));
  img = load_image(write_file(dir, "b.pgm",
                              std::string("P5 2 1 65535\n\xff\xff\x80\x00", 18)));
  CHECK(img.at(0) == 255.0);
  CHECK(img.at(1) == doctest::Approx(32768 * 255.0 / 65535.0));
}

TEST_CASE("load_image: pixmaps are dim 3") {
  const auto dir = testing::scratch_dir("core_ppm");
  const auto img = load_image(
      write_file(dir, "c.ppm", "P3 2 1 255  10 20 30  40 50 60"));
  CHECK(img.dim() == 3);
  CHECK(img.data().size() == 6);
  CHECK(img.pixel(1)[2] == 60.0);
  const auto bin = load_image(write_file(
      dir, "d.ppm", std::string("P6 1 1 255\n") + "\x01\x02\x03"));
  CHECK(bin.dim() == 3);
  CHECK(bin.pixel(0)[1] == 2.0);
}

TEST_CASE("load_image: PNG fixtures match an independent decoder") {
  for (const char* name : {"rgb_5x4", "rgba_3x3", "gray_3x2", "gray16_2x2"}) {
    CAPTURE(name);
    const auto img = load_image(testing::data_path(std::string(name) + ".png"));
    const auto ref = reference(std::string(name) + ".txt");
    CHECK(img.width() == ref.width());
    CHECK(img.height() == ref.height());
    CHECK(img.dim() == ref.dim());
    REQUIRE(img.data().size() == ref.width() * ref.height() * ref.dim());
    for (std::size_t k = 0; k < ref.data().size(); ++k)
      CHECK(img.data()[k] == doctest::Approx(ref.data()[k]).epsilon(1e-12));
  }
}

TEST_CASE("load_image: error kinds are distinct") {
  const auto dir = testing::scratch_dir("core_errors");
  CHECK(load_error(dir / "missing.pgm") == Errc::unreadable_file);
  CHECK(load_error(write_file(dir, "x.bmp", "BM not an image")) ==
        Errc::unsupported_format);
  CHECK(load_error(write_file(dir, "z.pgm", "P5 0 3 255\n")) ==
        Errc::zero_size_image);
  CHECK(load_error(write_file(dir, "t.pgm", "P5 4 4 255\nabc")) ==
        Errc::malformed_image);
  CHECK(load_error(write_file(dir, "m.pgm", "P2 2 1 10 3 11")) ==
        Errc::malformed_image);
  auto png = std::string("\x89PNG\r\n\x1a\n", 8) + "garbage";
  CHECK(load_error(write_file(dir, "bad.png", png)) == Errc::malformed_image);
}

TEST_CASE("graymap and PNG round trips are lossless") {
  const auto dir = testing::scratch_dir("core_roundtrip");
  std::mt19937_64 gen(3);
  std::vector<double> v(7 * 5);
  for (double& x : v) x = static_cast<double>(gen() % 256);
  const AppearanceImage img(7, 5, 1, v);
  save_pnm(dir / "r.pgm", img);
  CHECK(load_image(dir / "r.pgm") == img);
  save_png(dir / "r.png", img);
  CHECK(load_image(dir / "r.png") == img);

  std::vector<double> c(4 * 3 * 3);
  for (double& x : c) x = static_cast<double>(gen() % 256);
  const AppearanceImage color(4, 3, 3, c);
  save_png(dir / "c.png", color);
  CHECK(load_image(dir / "c.png") == color);
  save_pnm(dir / "c.ppm", color);
  CHECK(load_image(dir / "c.ppm") == color);
}

TEST_CASE("index_to_location") {
  CHECK(index_to_location(0, 5, 1) == PixelLocation{0, 0});
  CHECK(index_to_location(5, 5, 2) == PixelLocation{1, 0});
  for (std::size_t j = 0; j < 21; ++j) {
    const auto loc = index_to_location(j, 7, 3);
    CHECK(location_to_index(loc, 7, 3) == j);
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t j = 0; j < 21; ++j) {
    const auto loc = index_to_location(j, 7, 3);
    seen.insert({loc.row, loc.col});
  }
  CHECK(seen.size() == 21);
  CHECK_THROWS_AS(index_to_location(21, 7, 3), Error);
  CHECK_THROWS_AS(location_to_index({3, 0}, 7, 3), Error);
}

TEST_CASE("AppearanceImage invariants") {
  CHECK_THROWS_AS(AppearanceImage(0, 2, 1, {}), Error);
  CHECK_THROWS_AS(AppearanceImage(2, 2, 1, {1, 2, 3}), Error);
  const auto img = AppearanceImage::filled(3, 2, 3, 7.0);
  CHECK(img.data().size() == 18);
  CHECK(img.squared_distance(0, 5) == 0.0);
  const AppearanceImage two(2, 1, 3, {0, 0, 0, 3, 4, 0});
  CHECK(two.squared_distance(0, 1) == 25.0);
}

TEST_CASE("SparseGraph degrees are recomputable; self-loops count once") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const auto g = testing::random_graph(9, 0.5, gen, true);
    const auto deg = g.recompute_degrees();
    for (std::size_t i = 0; i < g.vertex_count(); ++i)
      CHECK(deg[i] == g.degree(i));
  }
  const SparseGraph loop(2, {{0, 0, 2.0}, {0, 1, 1.0}});
  CHECK(loop.degree(0) == 3.0);
  CHECK(loop.degree(1) == 1.0);
  CHECK_THROWS_AS(SparseGraph(2, {{0, 2, 1.0}}), Error);
  CHECK_THROWS_AS(SparseGraph(2, {{0, 1, -1.0}}), Error);
}

TEST_CASE("Rng streams are reproducible and well spread") {
  Rng a = Rng::stream(42, 7), b = Rng::stream(42, 7), c = Rng::stream(42, 8);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);

  Rng r(1);
  std::vector<int> counts(10, 0);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    ++counts[r.below(10)];
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  for (int c10 : counts) CHECK(std::abs(c10 - n / 10) < 0.03 * n / 10);
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (int k = 0; k < 1000; ++k) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("parallel_for_blocks covers the range once for any thread cap") {
  for (unsigned cap : {1u, 2u, 3u, 8u}) {
    set_max_threads(cap);
    std::vector<int> hits(1001, 0);
    parallel_for_blocks(hits.size(), 10, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (int h : hits) CHECK(h == 1);
  }
  set_max_threads(0);
  CHECK_THROWS_AS(parallel_for_blocks(100, 1,
                                      [](std::size_t b, std::size_t) {
                                        if (b == 0) fail(Errc::invalid_argument, "x");
                                      }),
                  Error);
}

TEST_CASE("render_scalar_field and to_grayscale") {
  const std::vector<double> f{-1.0, 0.0, 1.0, 3.0};
  const auto r = render_scalar_field(f, 2, 2);
  CHECK(r.pixels[0] == 0);
  CHECK(r.pixels[3] == 255);
  CHECK(r.pixels[1] == 64);
  const auto flat = render_scalar_field(std::vector<double>(4, 2.0), 2, 2);
  for (auto p : flat.pixels) CHECK(p == 0);
  const AppearanceImage color(1, 1, 3, {30, 60, 90});
  CHECK(to_grayscale(color).at(0) == 60.0);
}
