#include <doctest.h>

#include <map>
#include <numeric>

#include "helpers.hpp"
#include "mixncut/error.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/rng.hpp"
#include "mixncut/sparsify.hpp"

using namespace mixncut;
using testing::rel_err;

namespace {

double ssd_of(const AppearanceImage& img, const std::vector<std::size_t>& pix) {
  const std::size_t d = img.dim();
  std::vector<double> mean(d, 0.0);
  for (auto j : pix)
    for (std::size_t c = 0; c < d; ++c) mean[c] += img.at(j, c);
  for (double& m : mean) m /= double(pix.size());
  double s = 0.0;
  for (auto j : pix)
    for (std::size_t c = 0; c < d; ++c) s += (img.at(j, c) - mean[c]) * (img.at(j, c) - mean[c]);
  return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Upper quantile of chi-square with k degrees of freedom (Wilson-Hilferty),
// z = 3.09 for p = 0.001.
double chi2_critical(double k, double z = 3.09) {
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

}  // namespace

TEST_CASE("variance_split_partition: spec examples") {
  const auto flat = AppearanceImage::filled(5, 4, 1, 42.0);
  const auto c1 = variance_split_partition(flat, 5, 0);
  CHECK(c1.cluster_count() == 1);
  CHECK(c1.requested == 5);

  std::mt19937_64 gen(1);
  std::vector<double> v(30);
  for (double& x : v) x = (gen() % 2) ? 255.0 : 0.0;
  v[0] = 0.0;
  v[1] = 255.0;
  const AppearanceImage two(6, 5, 1, v);
  const auto c2 = variance_split_partition(two, 2, 3);
  REQUIRE(c2.cluster_count() == 2);
  for (std::size_t j = 0; j < 30; ++j)
    CHECK((c2.assignment[j] == c2.assignment[0]) == (v[j] == v[0]));
  CHECK(c2.total_variance() == 0.0);

  CHECK_THROWS_AS(variance_split_partition(flat, 0, 0), Error);
  CHECK_THROWS_AS(variance_split_partition(flat, 21, 0), Error);
}

TEST_CASE("variance_split_partition: merges never reduce total variance") {
  std::mt19937_64 gen(2);
  const auto img = testing::random_image(8, 6, 1, gen);
  const auto c = variance_split_partition(img, 8, 4);
  REQUIRE(c.cluster_count() == 8);
  const double total = c.total_variance();
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = a + 1; b < 8; ++b) {
      std::vector<std::size_t> merged;
      for (std::size_t j = 0; j < img.pixel_count(); ++j)
        if (c.assignment[j] == a || c.assignment[j] == b) merged.push_back(j);
      std::vector<std::size_t> pa, pb;
      for (auto j : merged) (c.assignment[j] == a ? pa : pb).push_back(j);
      const double merged_total =
          total - c.variances[a] - c.variances[b] + ssd_of(img, merged);
      CHECK(total <= merged_total + 1e-9 * std::max(1.0, total));
      CHECK(rel_err(c.variances[a], ssd_of(img, pa)) <= 1e-9);
    }
}

TEST_CASE("PixelClustering invariants and recomputation") {
  std::mt19937_64 gen(3);
  const auto img = testing::random_image(9, 7, 3, gen);
  const auto c = variance_split_partition(img, 12, 9);
  CHECK(c.cluster_count() == 12);
  CHECK(std::accumulate(c.sizes.begin(), c.sizes.end(), std::size_t{0}) == 63);
  for (auto s : c.sizes) CHECK(s > 0);
  const auto again = make_clustering(img, c.assignment, 12);
  CHECK(again.sizes == c.sizes);
  for (std::size_t k = 0; k < c.means.size(); ++k)
    CHECK(rel_err(again.means[k], c.means[k]) <= 1e-12);
  for (std::size_t a = 0; a < 12; ++a) {
    CHECK(rel_err(again.variances[a], c.variances[a]) <= 1e-9);
    for (auto j : c.cluster(a)) CHECK(c.assignment[j] == a);
  }
  // Pure function of (image, L, seed).
  const auto c_same = variance_split_partition(img, 12, 9);
  CHECK(c_same.assignment == c.assignment);
}

TEST_CASE("ClusterPairTable: q values") {
  const AppearanceImage img(4, 1, 1, {10, 10, 10, 10});
  const auto c = make_clustering(img, {0, 0, 1, 1}, 2);
  const ClusterPairTable t(c, 5.0);
  CHECK(t.q(0, 1) == 4.0);
  CHECK(t.q(0, 0) == 4.0);

  const double sigma = 9.0, gap = sigma * std::sqrt(2 * std::log(2.0));
  const AppearanceImage img2(3, 1, 1, {0, 0, gap});
  const auto c2 = make_clustering(img2, {0, 0, 1}, 2);
  CHECK(ClusterPairTable(c2, sigma).q(0, 1) == doctest::Approx(0.5 * 2 * 1).epsilon(1e-14));

  std::mt19937_64 gen(4);
  const auto img3 = testing::random_image(6, 5, 3, gen);
  const auto c3 = variance_split_partition(img3, 7, 1);
  const ClusterPairTable t3(c3, 40.0);
  double total = 0.0, ordered = 0.0;
  for (std::size_t a = 0; a < 7; ++a)
    for (std::size_t b = 0; b < 7; ++b) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double t = c3.mean(a)[k] - c3.mean(b)[k];
        d2 += t * t;
      }
      const double q = double(c3.sizes[a] * c3.sizes[b]) * std::exp(-d2 / 3200.0);
      CHECK(rel_err(t3.q(a, b), q) <= 1e-14);
      ordered += q;
      if (a <= b) total += t3.pair_probability(a, b);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rel_err(t3.ordered_mass(), ordered) <= 1e-12);
}

TEST_CASE("sample_data_edges: basic contract") {
  std::mt19937_64 gen(5);
  const auto img = testing::random_image(8, 8, 1, gen);
  const auto c = variance_split_partition(img, 6, 0);
  CHECK(sample_data_edges(img, c, 30.0, 0, 1).edges().empty());

  const auto g = sample_data_edges(img, c, 30.0, 500, 1);
  CHECK(g.vertex_count() == 64);
  CHECK(g.edges().size() <= 500);
  for (const Edge& e : g.edges()) {
    CHECK(e.i < e.j);
    CHECK(e.w > 0.0);
    CHECK(std::isfinite(e.w));
  }

  // Constant image: every draw contributes exactly 1.
  const auto flat = AppearanceImage::filled(5, 5, 1, 9.0);
  const auto cf = variance_split_partition(flat, 10, 0);
  const auto gf = sample_data_edges(flat, cf, 30.0, 300, 2);
  double total = 0.0;
  for (const Edge& e : gf.edges()) {
    CHECK(e.w == std::round(e.w));
    total += e.w;
  }
  CHECK(total == 300.0);
}

TEST_CASE("sample_data_edges: identical across thread counts") {
  std::mt19937_64 gen(6);
  const auto img = testing::random_image(20, 15, 3, gen);
  const auto c = variance_split_partition(img, 20, 0);
  set_max_threads(1);
  const auto a = sample_data_edges(img, c, 20.0, 20000, 77);
  set_max_threads(4);
  const auto b = sample_data_edges(img, c, 20.0, 20000, 77);
  set_max_threads(0);
  CHECK(a == b);
  CHECK(!(a == sample_data_edges(img, c, 20.0, 20000, 78)));
}

TEST_CASE("sample_data_edges: exact enumeration gives weight proportional to w") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 5; ++rep) {
    const auto img = testing::random_image(4, 3, 1, gen);  // 12 pixels
    const auto c = variance_split_partition(img, 3, rep);
    const double sigma = 30.0;
    const ClusterPairTable t(c, sigma);
    const std::size_t n = 12;
    // Ordered-pair masses recomputed from the clustering alone.
    double M = 0.0;
    for (std::size_t a = 0; a < c.cluster_count(); ++a)
      for (std::size_t b = 0; b < c.cluster_count(); ++b) M += t.q(a, b);
    std::vector<double> expected(n * n, 0.0);
    double reject = 0.0;
    for (std::size_t a = 0; a < c.cluster_count(); ++a)
      for (std::size_t b = a; b < c.cluster_count(); ++b) {
        const double p_pair = t.pair_probability(a, b);
        const auto sa = c.cluster(a), sb = c.cluster(b);
        for (auto i : sa)
          for (auto j : sb) {
            const double p = p_pair / double(sa.size() * sb.size());
            if (i == j) {
              reject += p;
              continue;
            }
            const double w = std::exp(-img.squared_distance(i, j) / (2 * sigma * sigma));
            const double wp = double(sa.size() * sb.size()) * w / t.q(a, b);
            expected[std::min(i, j) * n + std::max(i, j)] += p * wp;
          }
      }
    CHECK(rel_err(reject, double(n) / M) <= 1e-12);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double w = std::exp(-img.squared_distance(i, j) / (2 * sigma * sigma));
        const double per_accepted = expected[i * n + j] / (1.0 - reject);
        CHECK(rel_err(per_accepted * t.edge_normalizer(), w) <= 1e-12);
      }
  }
}

TEST_CASE("sample_baseline_edges: basic contract") {
  std::mt19937_64 gen(8);
  const auto img = testing::random_image(10, 10, 1, gen);
  CHECK(sample_baseline_edges(img, 20, 5, 0, 1).edges().empty());
  const auto flat = AppearanceImage::filled(6, 6, 1, 3.0);
  const auto gf = sample_baseline_edges(flat, 20, 3, 1000, 1);
  double total = 0.0;
  for (const Edge& e : gf.edges()) {
    CHECK(e.i < e.j);
    CHECK(e.w == std::round(e.w));
    total += e.w;
  }
  CHECK(total == 1000.0);
  CHECK_THROWS_AS(sample_baseline_edges(img, 0.0, 5, 10, 1), Error);
  CHECK(sample_baseline_edges(AppearanceImage::filled(1, 1, 1, 0), 1, 1, 10, 1)
            .edges()
            .empty());
}

TEST_CASE("sample_baseline_edges: same as accumulating the per-draw edges") {
  std::mt19937_64 gen(9);
  const auto img = testing::random_image(12, 9, 3, gen);
  const double si = 35, sx = 4;
  const std::size_t m = 5000;
  EdgeAccumulator acc(img.pixel_count());
  for (std::size_t t = 0; t < m; ++t) {
    const auto [i, j] = baseline_draw(12, 9, sx, 5, t);
    CHECK(i != j);
    acc.add(Vertex(i), Vertex(j), std::exp(-img.squared_distance(i, j) * (1.0 / (2 * si * si))));
  }
  const auto reference = std::move(acc).freeze();
  CHECK(sample_baseline_edges(img, si, sx, m, 5) == reference);
  set_max_threads(3);
  CHECK(sample_baseline_edges(img, si, sx, m, 5) == reference);
  set_max_threads(0);
}

TEST_CASE("sample_baseline_edges: offsets follow the folded discrete normal") {
  // 1 x N image: the row offset always clamps to 0, so |col(i) - col(j)|
  // carries the whole distribution.
  const std::size_t N = 64;
  const double sx = 20.0;
  const std::size_t draws = 100000;
  std::vector<double> observed(N, 0.0), expected(N, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    const auto [i, j] = baseline_draw(N, 1, sx, 123, t);
    observed[i > j ? i - j : j - i] += 1.0;
  }
  for (std::size_t col = 0; col < N; ++col) {
    std::vector<double> p(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      const double lo = k == 0 ? -INFINITY : (double(k) - 0.5 - double(col)) / sx;
      const double hi = k + 1 == N ? INFINITY : (double(k) + 0.5 - double(col)) / sx;
      p[k] = normal_cdf(hi) - normal_cdf(lo);
    }
    const double keep = 1.0 - p[col];
    for (std::size_t k = 0; k < N; ++k)
      if (k != col) expected[k > col ? k - col : col - k] += p[k] / keep / double(N);
  }
  // Merge tail bins until every expected count is at least 5.
  double chi2 = 0.0, e_acc = 0.0, o_acc = 0.0;
  int bins = 0;
  for (std::size_t k = 1; k < N; ++k) {
    e_acc += expected[k] * draws;
    o_acc += observed[k];
    if (e_acc >= 5.0 || k + 1 == N) {
      chi2 += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
      ++bins;
      e_acc = o_acc = 0.0;
    }
  }
  CHECK(observed[0] == 0.0);
  CAPTURE(chi2);
  CHECK(chi2 < chi2_critical(bins - 1));
}

TEST_CASE("baseline pair counts and weighting compose to the sampler") {
  std::mt19937_64 gen(10);
  const auto img = testing::random_image(16, 16, 1, gen);
  const auto counts = sample_baseline_pairs(16, 16, 6.0, 20000, 3);
  double total = 0.0;
  for (const Edge& e : counts.edges()) total += e.w;
  CHECK(total == 20000.0);
  for (double si : {10.0, 50.0})
    CHECK(weight_baseline_pairs(counts, img, si) ==
          sample_baseline_edges(img, si, 6.0, 20000, 3));
}
