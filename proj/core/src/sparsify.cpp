#include "mixncut/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixncut/cluster.hpp"
#include "mixncut/error.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/rng.hpp"

namespace mixncut {

namespace {

// Mean and sum of squared deviations of a pixel group, two-pass.
void group_moments(const AppearanceImage& image,
                   std::span<const std::uint32_t> group, double* mean,
                   double& ssd) {
  const std::size_t d = image.dim();
  std::fill(mean, mean + d, 0.0);
  for (auto j : group)
    for (std::size_t t = 0; t < d; ++t) mean[t] += image.at(j, t);
  for (std::size_t t = 0; t < d; ++t) mean[t] /= static_cast<double>(group.size());
  ssd = 0.0;
  for (auto j : group)
    for (std::size_t t = 0; t < d; ++t) {
      const double dev = image.at(j, t) - mean[t];
      ssd += dev * dev;
    }
}

}  // namespace

double PixelClustering::total_variance() const noexcept {
  return std::accumulate(variances.begin(), variances.end(), 0.0);
}

PixelClustering make_clustering(const AppearanceImage& image,
                                std::vector<std::uint32_t> assignment,
                                std::size_t requested) {
  require(assignment.size() == image.pixel_count(), Errc::size_mismatch,
          "assignment length must equal pixel count");
  PixelClustering out;
  out.dim = image.dim();
  out.requested = requested;
  const std::size_t L =
      assignment.empty()
          ? 0
          : *std::max_element(assignment.begin(), assignment.end()) + std::size_t{1};
  out.sizes.assign(L, 0);
  for (auto a : assignment) ++out.sizes[a];
  for (auto s : out.sizes)
    require(s > 0, Errc::invalid_argument, "cluster ids must be dense");
  out.member_offsets.assign(L + 1, 0);
  for (std::size_t a = 0; a < L; ++a)
    out.member_offsets[a + 1] = out.member_offsets[a] + out.sizes[a];
  out.members.resize(assignment.size());
  {
    std::vector<std::size_t> cursor(out.member_offsets.begin(),
                                    out.member_offsets.end() - 1);
    for (std::size_t j = 0; j < assignment.size(); ++j)
      out.members[cursor[assignment[j]]++] = static_cast<std::uint32_t>(j);
  }
  out.means.assign(L * out.dim, 0.0);
  out.variances.assign(L, 0.0);
  for (std::size_t a = 0; a < L; ++a)
    group_moments(image, out.cluster(a), &out.means[a * out.dim],
                  out.variances[a]);
  out.assignment = std::move(assignment);
  return out;
}

PixelClustering variance_split_partition(const AppearanceImage& image,
                                         std::size_t L, std::uint64_t seed) {
  require(L >= 1, Errc::invalid_argument, "cluster count L must be at least 1");
  const std::size_t n = image.pixel_count();
  const std::size_t d = image.dim();
  require(L <= n, Errc::invalid_argument, "cluster count L exceeds pixel count");

  std::vector<std::vector<std::uint32_t>> groups(1);
  groups[0].resize(n);
  std::iota(groups[0].begin(), groups[0].end(), 0u);
  std::vector<double> ssd(1);
  std::vector<char> splittable(1, 1);
  std::vector<double> mean(d);
  group_moments(image, groups[0], mean.data(), ssd[0]);

  std::vector<double> points;
  std::uint64_t attempt = 0;
  while (groups.size() < L) {
    std::size_t best = groups.size();
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (!splittable[c] || !(ssd[c] > 0.0)) continue;
      if (best == groups.size() || ssd[c] > ssd[best]) best = c;
    }
    if (best == groups.size()) break;

    const auto& group = groups[best];
    points.resize(group.size() * d);
    for (std::size_t p = 0; p < group.size(); ++p)
      for (std::size_t t = 0; t < d; ++t) points[p * d + t] = image.at(group[p], t);
    const auto km = kmeans(points, d, 2, Rng::mix(seed + attempt++));

    std::vector<std::uint32_t> left, right;
    for (std::size_t p = 0; p < group.size(); ++p)
      (km.labels[p] == 0 ? left : right).push_back(group[p]);
    if (left.empty() || right.empty()) {
      splittable[best] = 0;
      continue;
    }
    groups[best] = std::move(left);
    groups.push_back(std::move(right));
    ssd.push_back(0.0);
    splittable.push_back(1);
    group_moments(image, groups[best], mean.data(), ssd[best]);
    group_moments(image, groups.back(), mean.data(), ssd.back());
  }

  std::vector<std::uint32_t> assignment(n);
  for (std::size_t c = 0; c < groups.size(); ++c)
    for (auto j : groups[c]) assignment[j] = static_cast<std::uint32_t>(c);
  return make_clustering(image, std::move(assignment), L);
}

// ---------------------------------------------------------------------------
// ClusterPairTable

ClusterPairTable::ClusterPairTable(const PixelClustering& clustering,
                                   double sigma)
    : L_(clustering.cluster_count()),
      pixel_count_(clustering.assignment.size()),
      sigma_(sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), Errc::invalid_argument,
          "sigma must be positive");
  require(L_ >= 1, Errc::invalid_argument, "clustering is empty");
  const std::size_t d = clustering.dim;
  const std::size_t count = L_ * (L_ + 1) / 2;
  q_.reserve(count);
  cumulative_.reserve(count);
  pairs_.reserve(count);
  double acc = 0.0;
  for (std::size_t a = 0; a < L_; ++a) {
    const auto ma = clustering.mean(a);
    const auto sa = static_cast<double>(clustering.sizes[a]);
    for (std::size_t b = a; b < L_; ++b) {
      const auto mb = clustering.mean(b);
      double d2 = 0.0;
      for (std::size_t t = 0; t < d; ++t) d2 += (ma[t] - mb[t]) * (ma[t] - mb[t]);
      const double q = sa * static_cast<double>(clustering.sizes[b]) *
                       std::exp(-d2 / (2.0 * sigma * sigma));
      q_.push_back(q);
      acc += a == b ? q : 2.0 * q;
      cumulative_.push_back(acc);
      pairs_.emplace_back(static_cast<std::uint32_t>(a),
                          static_cast<std::uint32_t>(b));
    }
  }
  ordered_mass_ = acc;
}

std::size_t ClusterPairTable::packed(std::size_t a, std::size_t b) const noexcept {
  if (a > b) std::swap(a, b);
  // Row a starts after rows 0..a-1 of lengths L, L-1, ...
  return a * L_ - a * (a - 1) / 2 + (b - a);
}

double ClusterPairTable::q(std::size_t a, std::size_t b) const noexcept {
  return q_[packed(a, b)];
}

double ClusterPairTable::pair_probability(std::size_t a,
                                          std::size_t b) const noexcept {
  return (a == b ? 1.0 : 2.0) * q(a, b) / ordered_mass_;
}

double ClusterPairTable::edge_normalizer() const noexcept {
  return 0.5 * (ordered_mass_ - static_cast<double>(pixel_count_));
}

std::pair<std::size_t, std::size_t> ClusterPairTable::sample(
    double u) const noexcept {
  const double target = u * ordered_mass_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // u * mass rounded up to the total: take the last pair with mass.
    it = std::prev(cumulative_.end());
    while (it != cumulative_.begin() && *std::prev(it) == *it) --it;
  }
  const auto& pr = pairs_[static_cast<std::size_t>(it - cumulative_.begin())];
  return {pr.first, pr.second};
}

// ---------------------------------------------------------------------------
// Samplers

namespace {

constexpr std::size_t kDrawBlock = 4096;

}  // namespace

SparseGraph sample_data_edges(const AppearanceImage& image,
                              const PixelClustering& clustering, double sigma,
                              std::size_t m, std::uint64_t seed) {
  return sample_data_edges(image, clustering, ClusterPairTable(clustering, sigma),
                           m, seed);
}

SparseGraph sample_data_edges(const AppearanceImage& image,
                              const PixelClustering& clustering,
                              const ClusterPairTable& table, std::size_t m,
                              std::uint64_t seed) {
  const std::size_t n = image.pixel_count();
  require(clustering.assignment.size() == n, Errc::size_mismatch,
          "clustering does not match image");
  if (m == 0) return SparseGraph(n, {});
  // Every draw landing on i = j is rejected; with all mass on self pairs no
  // draw can ever be accepted.
  require(table.edge_normalizer() > 0.0, Errc::invalid_argument,
          "appearance sampling distribution has no mass off the diagonal");

  const double inv_two_s2 = 1.0 / (2.0 * table.sigma() * table.sigma());
  std::vector<Edge> draws(m);
  parallel_for_blocks(m, kDrawBlock, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::stream(seed, t);
      for (;;) {
        const auto [a, b] = table.sample(rng.uniform());
        const auto sa = clustering.cluster(a);
        const auto sb = clustering.cluster(b);
        const auto i = sa[rng.below(sa.size())];
        const auto j = sb[rng.below(sb.size())];
        if (i == j) continue;
        // w' = |S_a||S_b| w(i,j) / q(a,b), folded into one exponent.
        const auto ma = clustering.mean(a);
        const auto mb = clustering.mean(b);
        double dm = 0.0;
        for (std::size_t t2 = 0; t2 < clustering.dim; ++t2)
          dm += (ma[t2] - mb[t2]) * (ma[t2] - mb[t2]);
        const double w = std::exp((dm - image.squared_distance(i, j)) * inv_two_s2);
        draws[t] = {i, j, w};
        break;
      }
    }
  });

  EdgeAccumulator acc(n);
  for (const Edge& e : draws)
    if (e.w > 0.0) acc.add(e.i, e.j, e.w);
  return std::move(acc).freeze();
}

std::pair<std::size_t, std::size_t> baseline_draw(std::size_t width,
                                                  std::size_t height,
                                                  double sigma_x,
                                                  std::uint64_t seed,
                                                  std::uint64_t t) {
  const std::size_t n = width * height;
  Rng rng = Rng::stream(seed, t);
  const std::size_t i = rng.below(n);
  const auto row = static_cast<double>(i / width);
  const auto col = static_cast<double>(i % width);
  const auto max_row = static_cast<double>(height - 1);
  const auto max_col = static_cast<double>(width - 1);
  for (;;) {
    const auto [dr, dc] = rng.normal_pair();
    const double r = std::clamp(std::floor(row + sigma_x * dr + 0.5), 0.0,
                                max_row);
    const double c = std::clamp(std::floor(col + sigma_x * dc + 0.5), 0.0,
                                max_col);
    const std::size_t j =
        static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c);
    if (j != i) return {i, j};
  }
}

SparseGraph sample_baseline_pairs(std::size_t width, std::size_t height,
                                  double sigma_x, std::size_t m,
                                  std::uint64_t seed) {
  require(sigma_x > 0.0, Errc::invalid_argument, "sigma_x must be positive");
  const std::size_t n = width * height;
  if (m == 0 || n < 2) return SparseGraph(n, {});
  std::vector<std::pair<Vertex, Vertex>> draws(m);
  parallel_for_blocks(m, kDrawBlock, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const auto [i, j] = baseline_draw(width, height, sigma_x, seed, t);
      draws[t] = {static_cast<Vertex>(i), static_cast<Vertex>(j)};
    }
  });
  EdgeAccumulator acc(n);
  for (const auto& [i, j] : draws) acc.add(i, j, 1.0);
  return std::move(acc).freeze();
}

SparseGraph weight_baseline_pairs(const SparseGraph& pair_counts,
                                  const AppearanceImage& image,
                                  double sigma_i) {
  require(sigma_i > 0.0, Errc::invalid_argument, "sigma_i must be positive");
  require(pair_counts.vertex_count() == image.pixel_count(), Errc::size_mismatch,
          "pair counts do not match the image size");
  const double inv_two_s2 = 1.0 / (2.0 * sigma_i * sigma_i);
  const auto pairs = pair_counts.edges();
  std::vector<Edge> weighted(pairs.size());
  parallel_for_blocks(pairs.size(), kDrawBlock,
                      [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Edge& e = pairs[k];
      const double w = std::exp(-image.squared_distance(e.i, e.j) * inv_two_s2);
      double sum = 0.0;
      for (double c = 0.0; c < e.w; c += 1.0) sum += w;
      weighted[k] = {e.i, e.j, sum};
    }
  });
  std::erase_if(weighted, [](const Edge& e) { return !(e.w > 0.0); });
  return SparseGraph(pair_counts.vertex_count(), std::move(weighted));
}

SparseGraph sample_baseline_edges(const AppearanceImage& image, double sigma_i,
                                  double sigma_x, std::size_t m,
                                  std::uint64_t seed) {
  require(sigma_i > 0.0 && sigma_x > 0.0, Errc::invalid_argument,
          "sigma_i and sigma_x must be positive");
  return weight_baseline_pairs(
      sample_baseline_pairs(image.width(), image.height(), sigma_x, m, seed),
      image, sigma_i);
}

}  // namespace mixncut
