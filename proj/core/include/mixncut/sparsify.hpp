#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixncut/graph.hpp"
#include "mixncut/image.hpp"

namespace mixncut {

/// Partition of the pixels into clusters of low appearance variance.
struct PixelClustering {
  std::size_t dim = 0;
  std::size_t requested = 0;        ///< L asked for
  std::vector<std::uint32_t> assignment;  ///< pixel -> cluster id
  std::vector<std::size_t> sizes;
  std::vector<double> means;        ///< cluster-major, dim values each
  std::vector<double> variances;    ///< sum of squared deviations
  std::vector<std::size_t> member_offsets;  ///< CSR into members
  std::vector<std::uint32_t> members;       ///< pixels grouped by cluster

  std::size_t cluster_count() const noexcept { return sizes.size(); }
  std::span<const double> mean(std::size_t a) const noexcept {
    return {means.data() + a * dim, dim};
  }
  std::span<const std::uint32_t> cluster(std::size_t a) const noexcept {
    return {members.data() + member_offsets[a],
            members.data() + member_offsets[a + 1]};
  }
  double total_variance() const noexcept;
};

/// Builds a clustering from an assignment, computing sizes, means and
/// sums of squared deviations from scratch. Cluster ids must be dense.
PixelClustering make_clustering(const AppearanceImage& image,
                                std::vector<std::uint32_t> assignment,
                                std::size_t requested);

/// Greedy top-down split: starting from one cluster holding every pixel,
/// repeatedly 2-means the cluster of largest total variance until L clusters
/// exist. Stops early once no cluster with positive variance can be split.
PixelClustering variance_split_partition(const AppearanceImage& image,
                                         std::size_t L, std::uint64_t seed);

/// q(a, b) = |S_a||S_b| exp(-|m_a - m_b|^2 / (2 sigma^2)) over unordered
/// pairs a <= b, plus the sampling distribution over those pairs.
///
/// Pairs are drawn with mass q(a, b) for a = b and 2 q(a, b) for a < b, the
/// unordered folding of ordered cluster pairs, so every unordered pixel pair
/// {i, j} ends up with expected contributed weight proportional to w(i, j)
/// whether or not it straddles two clusters.
class ClusterPairTable {
 public:
  ClusterPairTable(const PixelClustering& clustering, double sigma);

  std::size_t cluster_count() const noexcept { return L_; }
  double sigma() const noexcept { return sigma_; }
  double q(std::size_t a, std::size_t b) const noexcept;
  /// Probability that one (pre-rejection) draw picks unordered pair {a, b}.
  double pair_probability(std::size_t a, std::size_t b) const noexcept;
  /// Sum of the ordered-pair masses, sum_{a,b} q(a, b).
  double ordered_mass() const noexcept { return ordered_mass_; }
  /// Divisor turning one accepted draw into an unbiased estimate of a cut:
  /// E[weight added to edge {i,j} per draw] = w(i,j) / edge_normalizer().
  double edge_normalizer() const noexcept;
  std::pair<std::size_t, std::size_t> sample(double u) const noexcept;

 private:
  std::size_t packed(std::size_t a, std::size_t b) const noexcept;

  std::size_t L_;
  std::size_t pixel_count_;
  double sigma_;
  std::vector<double> q_;
  std::vector<double> cumulative_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  double ordered_mass_ = 0.0;
};

/// Sparsifies the dense appearance graph with m independent draws. Draw t
/// uses the RNG stream (seed, t). Self pairs are rejected and redrawn;
/// repeated edges accumulate; zero-weight draws are dropped.
SparseGraph sample_data_edges(const AppearanceImage& image,
                              const PixelClustering& clustering, double sigma,
                              std::size_t m, std::uint64_t seed);
SparseGraph sample_data_edges(const AppearanceImage& image,
                              const PixelClustering& clustering,
                              const ClusterPairTable& table, std::size_t m,
                              std::uint64_t seed);

/// Sparsifies the classical appearance-times-distance graph: pick i
/// uniformly, offset its location by an isotropic normal of std sigma_x,
/// snap to the nearest pixel inside the image (redrawing the offset when it
/// lands on i), and weight the edge by exp(-|I(i)-I(j)|^2 / (2 sigma_i^2)).
SparseGraph sample_baseline_edges(const AppearanceImage& image, double sigma_i,
                                  double sigma_x, std::size_t m,
                                  std::uint64_t seed);

/// The pair-drawing half of sample_baseline_edges: edge weights are the
/// number of draws that hit each pixel pair. Depends on sigma_x only.
SparseGraph sample_baseline_pairs(std::size_t width, std::size_t height,
                                  double sigma_x, std::size_t m,
                                  std::uint64_t seed);

/// The weighting half: each pair drawn c times gets c copies of
/// exp(-|I(i)-I(j)|^2 / (2 sigma_i^2)) summed; pairs whose weight
/// underflows to 0 are dropped.
SparseGraph weight_baseline_pairs(const SparseGraph& pair_counts,
                                  const AppearanceImage& image, double sigma_i);

/// The (i, j) pair produced by baseline draw t, before weighting. Exposed for
/// distribution tests.
std::pair<std::size_t, std::size_t> baseline_draw(std::size_t width,
                                                  std::size_t height,
                                                  double sigma_x,
                                                  std::uint64_t seed,
                                                  std::uint64_t t);

}  // namespace mixncut
