#include <doctest.h>

#include <numbers>
#include <set>

#include "helpers.hpp"
#include "mixncut/bench.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/pipeline.hpp"

using namespace mixncut;

namespace {

Composite flat_halves(std::size_t size) {
  return compose(AppearanceImage::filled(size, size, 1, 64.0),
                 AppearanceImage::filled(size, size, 1, 192.0),
                 make_pattern(PatternKind::vertical_halves, size, size));
}

Composite two_gratings(std::size_t size) {
  TextureParams p;
  p.kind = TextureKind::grating;
  p.mean = 128;
  p.contrast = 80;
  p.wavelength = 8;
  const auto a = synth_texture(p, size, size, 0);
  p.orientation = std::numbers::pi / 2;
  const auto b = synth_texture(p, size, size, 0);
  return compose(a, b, make_pattern(PatternKind::vertical_halves, size, size));
}

double jac_of(const SegmentResult& r, const Composite& c) {
  return jaccard_accuracy(r.labels.to_bipartition(), c.truth);
}

}  // namespace

TEST_CASE("segment_mixncut: flat halves are recovered exactly") {
  const auto c = flat_halves(32);
  MixConfig cfg;
  cfg.num_clusters = 64;
  const auto r = segment_mixncut(c.image, cfg);
  CHECK(jac_of(r, c) == 1.0);
  const auto& d = r.diagnostics;
  CHECK(d.converged);
  REQUIRE(d.eigenvalues.size() == 2);
  CHECK(std::abs(d.eigenvalues[0] - 1.0) <= 1e-8);
  for (double res : d.residuals) CHECK(res <= 1e-8);
  CHECK(d.second_eigenvector.size() == 32 * 32);
  CHECK(d.realized_clusters == 2);
  CHECK(d.sampled_edges > 0);
  REQUIRE(d.objective.has_value());
  CHECK(!d.objective_subsampled);
  const DenseGraphSpec spec(c.image, cfg.sigma);
  CHECK(*d.objective == doctest::Approx(mixncut_objective(build_grid_graph(32, 32), spec,
                                                          c.truth, cfg.lambda))
                           .epsilon(1e-10));
  std::set<std::string> stages;
  for (const auto& t : d.timings) {
    stages.insert(t.stage);
    CHECK(t.seconds >= 0.0);
  }
  CHECK(stages.count("eigensolver") == 1);
  CHECK(stages.count("sampling") == 1);
  CHECK(d.total_seconds() >= 0.0);
}

TEST_CASE("segment_mixncut: deterministic across runs and thread counts") {
  std::mt19937_64 gen(1);
  const auto img = testing::random_image(30, 24, 3, gen);
  MixConfig cfg;
  cfg.num_clusters = 50;
  cfg.seed = 17;
  set_max_threads(1);
  const auto a = segment_mixncut(img, cfg);
  const auto b = segment_mixncut(img, cfg);
  set_max_threads(4);
  const auto c = segment_mixncut(img, cfg);
  set_max_threads(0);
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(a.labels.labels == c.labels.labels);
  CHECK(a.diagnostics.second_eigenvector == c.diagnostics.second_eigenvector);
  CHECK(a.diagnostics.eigenvalues == c.diagnostics.eigenvalues);
  CHECK(a.diagnostics.objective == c.diagnostics.objective);
}

TEST_CASE("segment_mixncut: three regions") {
  std::vector<double> v(36 * 36);
  for (std::size_t r = 0; r < 36; ++r)
    for (std::size_t col = 0; col < 36; ++col)
      v[r * 36 + col] = col < 12 ? 30.0 : col < 24 ? 128.0 : 220.0;
  const AppearanceImage img(36, 36, 1, v);
  MixConfig cfg;
  cfg.regions = 3;
  cfg.num_clusters = 16;
  // At the default lambda smooth grid modes rival the stripe indicators.
  cfg.lambda = 0.9;
  const auto r = segment_mixncut(img, cfg);
  CHECK(r.labels.k == 3);
  CHECK(r.diagnostics.eigenvalues.size() == 3);
  CHECK(!r.diagnostics.objective.has_value());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const auto col = j % 36;
    CHECK(r.labels.labels[j] == (col < 12 ? 0 : col < 24 ? 1 : 2));
  }
  CHECK_THROWS_AS(r.labels.to_bipartition(), Error);
}

TEST_CASE("segment_mixncut: config validation") {
  const auto img = AppearanceImage::filled(4, 4, 1, 1.0);
  MixConfig cfg;
  cfg.lambda = 1.5;
  CHECK_THROWS_AS(segment_mixncut(img, cfg), Error);
  cfg = MixConfig{};
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(segment_mixncut(img, cfg), Error);
  cfg = MixConfig{};
  cfg.regions = 1;
  CHECK_THROWS_AS(segment_mixncut(img, cfg), Error);
  cfg = MixConfig{};
  cfg.regions = 17;
  CHECK_THROWS_AS(segment_mixncut(img, cfg), Error);
}

TEST_CASE("segment_mixncut: grid-only chain") {
  std::mt19937_64 gen(2);
  const auto img = testing::random_image(16, 16, 1, gen);
  MixConfig cfg;
  cfg.lambda = 1.0;
  cfg.num_clusters = 20;
  const auto r = segment_mixncut(img, cfg);
  const auto p = r.labels.to_bipartition();
  const auto grid = build_grid_graph(16, 16);
  const double got = ncut_weight(grid, p);
  const double halves = ncut_weight(grid, make_pattern(PatternKind::vertical_halves, 16, 16).mask);
  MESSAGE("grid ncut of the grid-only result " << got << " vs halves " << halves
                                              << ", sides " << p.count(0) << "/"
                                              << p.count(1));
  CHECK(r.diagnostics.converged);
}

TEST_CASE("mixncut objective evaluator agrees with the graph module; gap to optimum") {
  std::mt19937_64 gen(3);
  const auto img = testing::random_image(4, 4, 1, gen);
  const double sigma = 40.0, lambda = 0.9;
  const auto grid = build_grid_graph(4, 4);
  const DenseGraphSpec spec(img, sigma);
  double best = INFINITY;
  for (unsigned mask = 1; mask < (1u << 15); ++mask) {
    std::vector<std::uint8_t> l(16, 0);
    for (int b = 0; b < 15; ++b) l[b + 1] = (mask >> b) & 1u;
    const Bipartition p(l);
    const double fast = (1 - lambda) * dense_ncut(spec, p) + lambda * ncut_weight(grid, p);
    const double brute =
        (1 - lambda) * dense_ncut_bruteforce(spec, p) + lambda * ncut_weight(grid, p);
    REQUIRE(std::abs(fast - brute) <= 1e-10 * brute);
    REQUIRE(mixncut_objective(grid, spec, p, lambda) == doctest::Approx(fast).epsilon(1e-12));
    best = std::min(best, fast);
  }
  MixConfig cfg;
  cfg.lambda = lambda;
  cfg.sigma = sigma;
  cfg.num_clusters = 16;
  cfg.edges_per_pixel = 50;
  const auto r = segment_mixncut(img, cfg);
  REQUIRE(r.diagnostics.objective.has_value());
  CHECK(*r.diagnostics.objective >= best - 1e-12);
  MESSAGE("spectral mixncut " << *r.diagnostics.objective << ", optimum " << best);
}

TEST_CASE("segment_mixncut: large images use a subsampled objective") {
  std::mt19937_64 gen(4);
  const auto img = testing::random_image(70, 70, 1, gen);
  MixConfig cfg;
  cfg.num_clusters = 100;
  const auto r = segment_mixncut(img, cfg);
  CHECK(r.diagnostics.objective_subsampled);
}

TEST_CASE("segment_ncut: flat halves and determinism") {
  const auto c = flat_halves(40);
  NcutConfig cfg;
  const auto r = segment_ncut(c.image, cfg);
  CHECK(jac_of(r, c) >= 0.99);
  CHECK(r.diagnostics.converged);
  set_max_threads(3);
  const auto r3 = segment_ncut(c.image, cfg);
  set_max_threads(0);
  CHECK(r3.labels.labels == r.labels.labels);
  CHECK(r3.diagnostics.second_eigenvector == r.diagnostics.second_eigenvector);
}

TEST_CASE("segment_ncut_with_pairs matches segment_ncut") {
  std::mt19937_64 gen(5);
  const auto img = testing::random_image(24, 20, 1, gen);
  NcutConfig cfg;
  cfg.sigma_x = 10;
  cfg.edges_per_pixel = 40;
  cfg.seed = 8;
  const auto pairs = ncut_pair_counts(24, 20, cfg);
  for (double si : {20.0, 60.0}) {
    cfg.sigma_i = si;
    const auto a = segment_ncut(img, cfg);
    const auto b = segment_ncut_with_pairs(img, cfg, pairs);
    CHECK(a.labels.labels == b.labels.labels);
    CHECK(a.diagnostics.second_eigenvector == b.diagnostics.second_eigenvector);
  }
  CHECK_THROWS_AS(segment_ncut_with_pairs(img, cfg, ncut_pair_counts(20, 20, cfg)), Error);
}

TEST_CASE("segment_ncut: Gabor features help on a two-grating composite") {
  const auto c = two_gratings(64);
  double raw = 0.0, gabor = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    NcutConfig cfg;
    cfg.seed = seed;
    cfg.sigma_x = 20;
    raw += jac_of(segment_ncut(c.image, cfg), c);
    cfg.use_gabor = true;
    gabor += jac_of(segment_ncut(c.image, cfg), c);
  }
  MESSAGE("raw " << raw / 3 << " gabor " << gabor / 3);
  CHECK(gabor > raw);
}

TEST_CASE("SolverFailure carries diagnostics") {
  std::mt19937_64 gen(6);
  const auto img = testing::random_image(30, 30, 1, gen);
  MixConfig cfg;
  cfg.num_clusters = 30;
  cfg.solver.max_matvecs = 3;
  try {
    segment_mixncut(img, cfg);
    FAIL("expected a SolverFailure");
  } catch (const SolverFailure& f) {
    CHECK(f.code() == Errc::no_convergence);
    CHECK(!f.diagnostics().converged);
    CHECK(f.diagnostics().matvecs <= 3 + cfg.solver.krylov_dim);
  }
}
