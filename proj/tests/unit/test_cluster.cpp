#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "mixncut/cluster.hpp"
#include "mixncut/error.hpp"

using namespace mixncut;

namespace {

EigenPair pair_from(std::vector<double> v, double value = 0.5) {
  EigenPair p;
  p.value = value;
  p.vector = std::move(v);
  return p;
}

// Plain Lloyd from k distinct points picked uniformly at random.
double random_restart_objective(const std::vector<double>& pts, std::size_t dim,
                                std::size_t k, std::mt19937_64& gen) {
  const std::size_t n = pts.size() / dim;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), gen);
  std::vector<double> c(k * dim);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t d = 0; d < dim; ++d) c[j * dim + d] = pts[idx[j] * dim + d];
  std::vector<std::size_t> lab(n, k);
  double obj = 0.0;
  for (int it = 0; it < 1000; ++it) {
    bool changed = false;
    obj = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t best = 0;
      double bd = INFINITY;
      for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double t = pts[p * dim + d] - c[j * dim + d];
          s += t * t;
        }
        if (s < bd) bd = s, best = j;
      }
      changed |= lab[p] != best;
      lab[p] = best;
      obj += bd;
    }
    if (!changed) break;
    std::vector<double> sum(k * dim, 0.0), cnt(k, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      cnt[lab[p]] += 1;
      for (std::size_t d = 0; d < dim; ++d) sum[lab[p] * dim + d] += pts[p * dim + d];
    }
    for (std::size_t j = 0; j < k; ++j)
      if (cnt[j] > 0)
        for (std::size_t d = 0; d < dim; ++d) c[j * dim + d] = sum[j * dim + d] / cnt[j];
  }
  return obj;
}

}  // namespace

TEST_CASE("kmeans: small examples") {
  const std::vector<double> pts{0, 0, 10, 10};
  const auto r = kmeans(pts, 1, 2, 0);
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[2] == r.labels[3]);
  CHECK(r.labels[0] != r.labels[2]);
  std::vector<double> c = r.centers;
  std::sort(c.begin(), c.end());
  CHECK(c == std::vector<double>{0, 10});
  CHECK(r.objective() == 0.0);
  CHECK(r.converged);

  const std::vector<double> pts2{1, 2, 3, 4, 5, 6};  // three 2-D points
  const auto one = kmeans(pts2, 2, 1, 5);
  for (int l : one.labels) CHECK(l == 0);
  CHECK(one.centers[0] == doctest::Approx(3.0));
  CHECK(one.centers[1] == doctest::Approx(4.0));

  CHECK_THROWS_AS(kmeans(pts, 1, 5, 0), Error);
  CHECK_THROWS_AS(kmeans(pts, 1, 0, 0), Error);
  CHECK_THROWS_AS(kmeans(std::vector<double>{1, 2, 3}, 2, 1, 0), Error);
}

TEST_CASE("kmeans: objective trace is monotone; result beats the worst restart") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> pts(100);
    for (double& x : pts) x = u(gen);
    const auto r = kmeans(pts, 2, 3, rep);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
      CHECK(r.objective_trace[t] <= r.objective_trace[t - 1]);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s)
      worst = std::max(worst, random_restart_objective(pts, 2, 3, gen));
    CHECK(r.objective() <= worst);
    CHECK(kmeans(pts, 2, 3, rep).labels == r.labels);
  }
}

TEST_CASE("kmeans: duplicate points with more clusters than distinct values") {
  const std::vector<double> pts{1, 1, 1, 1, 5};
  const auto r = kmeans(pts, 1, 3, 0);
  CHECK(r.labels.size() == 5);
  for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
    CHECK(r.objective_trace[t] <= r.objective_trace[t - 1]);
  CHECK(r.objective() == 0.0);
}

TEST_CASE("canonical_labels") {
  CHECK(canonical_labels(std::vector<int>{2, 2, 0, 1, 0}) ==
        std::vector<int>{0, 0, 1, 2, 1});
  CHECK(canonical_labels(std::vector<int>{}).empty());
}

TEST_CASE("embed_and_label: sign vector is recovered exactly") {
  std::vector<double> v{-1, -1, 1, -1, 1, 1};
  const std::vector<EigenPair> pairs{pair_from(std::vector<double>(6, 0.4), 1.0),
                                     pair_from(v)};
  const auto l = embed_and_label(pairs, 2, 0);
  CHECK(l.labels == std::vector<int>{0, 0, 1, 0, 1, 1});
  CHECK(l.k == 2);
  CHECK_THROWS_AS(embed_and_label(pairs, 3, 0), Error);
  CHECK_THROWS_AS(embed_and_label(pairs, 1, 0), Error);
}

TEST_CASE("embed_and_label: three separated clouds") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> noise(0.0, 0.01);
  const double cx[3] = {0.0, 1.0, 0.0}, cy[3] = {0.0, 0.0, 1.0};
  std::vector<double> v2, v3;
  std::vector<int> truth;
  for (int p = 0; p < 90; ++p) {
    const int c = (p * 7) % 3;
    truth.push_back(c);
    v2.push_back(cx[c] + noise(gen));
    v3.push_back(cy[c] + noise(gen));
  }
  const std::vector<EigenPair> pairs{pair_from(std::vector<double>(90, 0.1), 1.0),
                                     pair_from(v2), pair_from(v3, 0.4)};
  const auto l = embed_and_label(pairs, 3, 4);
  CHECK(l.labels == canonical_labels(truth));
}

TEST_CASE("embed_and_label: k = 2 labels are a threshold of v2") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(200);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = z(gen) + (i % 3 == 0 ? 2.0 : 0.0);
    const std::vector<EigenPair> pairs{pair_from(std::vector<double>(200, 0.07), 1.0),
                                       pair_from(v)};
    const auto l = embed_and_label(pairs, 2, rep);
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    int switches = 0;
    for (std::size_t k = 1; k < order.size(); ++k)
      if (l.labels[order[k]] != l.labels[order[k - 1]]) ++switches;
    CHECK(switches == 1);
  }
}

TEST_CASE("embed_and_label: permutation equivariance") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v2(60), v3(60);
  for (std::size_t i = 0; i < 60; ++i) {
    v2[i] = z(gen) + 4.0 * double(i % 3 == 1);
    v3[i] = z(gen) + 4.0 * double(i % 3 == 2);
  }
  const std::vector<EigenPair> pairs{pair_from(std::vector<double>(60, 0.1), 1.0),
                                     pair_from(v2), pair_from(v3)};
  const auto base = embed_and_label(pairs, 3, 1);

  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<double> p2(60), p3(60);
  for (std::size_t i = 0; i < 60; ++i) {
    p2[i] = v2[perm[i]];
    p3[i] = v3[perm[i]];
  }
  const std::vector<EigenPair> permuted{pair_from(std::vector<double>(60, 0.1), 1.0),
                                        pair_from(p2), pair_from(p3)};
  const auto moved = embed_and_label(permuted, 3, 1);
  std::vector<int> back(60);
  for (std::size_t i = 0; i < 60; ++i) back[perm[i]] = moved.labels[i];
  CHECK(canonical_labels(back) == base.labels);
}
