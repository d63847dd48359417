#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixncut/graph.hpp"
#include "mixncut/spectral.hpp"

namespace mixncut {

struct KMeansResult {
  std::vector<int> labels;
  std::vector<double> centers;          ///< k rows of dim values
  std::vector<double> objective_trace;  ///< after every assignment step
  std::size_t iterations = 0;
  bool converged = false;

  double objective() const noexcept {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

/// Lloyd's algorithm from k-means++ seeding. points holds one row of dim
/// values per point. Ties in assignment go to the lowest center index; an
/// emptied cluster is re-seeded with the point farthest from its center.
KMeansResult kmeans(std::span<const double> points, std::size_t dim,
                    std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 100);

/// Relabels so labels appear in order of first occurrence (0, 1, ...).
std::vector<int> canonical_labels(std::span<const int> labels);

/// Embeds pixel i as (v_2[i], ..., v_k[i]) using the eigenvectors of rank 2
/// to k, then runs k-means with k clusters. normalize_rows scales every
/// embedding row to unit length (off by default).
Labeling embed_and_label(std::span<const EigenPair> pairs, int k,
                         std::uint64_t seed, bool normalize_rows = false);

}  // namespace mixncut
