#include "mixncut/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "mixncut/error.hpp"
#include "mixncut/rng.hpp"

namespace mixncut {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t t = 0; t < dim; ++t) {
    const double d = a[t] - b[t];
    sum += d * d;
  }
  return sum;
}

// Greedy k-means++: first center uniform; every further center is the best
// of a few candidates drawn with probability proportional to the squared
// distance to the nearest chosen center, "best" meaning the lowest total
// squared distance once it is added.
std::vector<double> seed_centers(std::span<const double> points, std::size_t n,
                                 std::size_t dim, std::size_t k, Rng& rng) {
  std::vector<double> centers;
  centers.reserve(k * dim);
  auto push = [&](std::size_t p) {
    centers.insert(centers.end(), points.begin() + static_cast<std::ptrdiff_t>(p * dim),
                   points.begin() + static_cast<std::ptrdiff_t>((p + 1) * dim));
  };
  push(rng.below(n));
  std::vector<double> nearest(n), trial(n), best_trial(n);
  for (std::size_t p = 0; p < n; ++p)
    nearest[p] = squared_distance(&points[p * dim], centers.data(), dim);
  const auto trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    if (!(total > 0.0)) {
      push(rng.below(n));
      continue;
    }
    std::size_t chosen = n - 1;
    double best_potential = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
      const double target = rng.uniform() * total;
      std::size_t candidate = n - 1;
      double acc = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        acc += nearest[p];
        if (acc > target) {
          candidate = p;
          break;
        }
      }
      double potential = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        trial[p] = std::min(nearest[p], squared_distance(&points[p * dim],
                                                         &points[candidate * dim], dim));
        potential += trial[p];
      }
      if (potential < best_potential) {
        best_potential = potential;
        chosen = candidate;
        best_trial.swap(trial);
      }
    }
    push(chosen);
    nearest.swap(best_trial);
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dim,
                    std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  require(dim >= 1, Errc::invalid_argument, "dimension must be positive");
  require(points.size() % dim == 0, Errc::size_mismatch,
          "point buffer is not a whole number of rows");
  const std::size_t n = points.size() / dim;
  require(k >= 1, Errc::invalid_argument, "k must be at least 1");
  require(k <= n, Errc::invalid_argument, "k exceeds the number of points");

  Rng rng = Rng::stream(seed, 0);
  KMeansResult result;
  result.centers = seed_centers(points, n, dim, k, rng);
  result.labels.assign(n, -1);

  std::vector<double> dist(n);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);

  for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iter, 1); ++iter) {
    // Assignment.
    bool changed = false;
    double objective = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double* x = &points[p * dim];
      int best = 0;
      double best_d = squared_distance(x, result.centers.data(), dim);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(x, &result.centers[c * dim], dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (result.labels[p] != best) changed = true;
      result.labels[p] = best;
      dist[p] = best_d;
      objective += best_d;
    }
    result.objective_trace.push_back(objective);
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }

    // Update.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      const auto c = static_cast<std::size_t>(result.labels[p]);
      ++counts[c];
      for (std::size_t t = 0; t < dim; ++t) sums[c * dim + t] += points[p * dim + t];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed from the point farthest from its own center and move it.
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        std::copy_n(&points[far * dim], dim, &result.centers[c * dim]);
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t t = 0; t < dim; ++t)
        result.centers[c * dim + t] =
            sums[c * dim + t] / static_cast<double>(counts[c]);
    }
  }
  return result;
}

std::vector<int> canonical_labels(std::span<const int> labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] =
        remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

Labeling embed_and_label(std::span<const EigenPair> pairs, int k,
                         std::uint64_t seed, bool normalize_rows) {
  require(k >= 2, Errc::invalid_argument, "need at least two regions");
  require(pairs.size() >= static_cast<std::size_t>(k), Errc::invalid_argument,
          "embedding needs k eigenpairs");
  const std::size_t n = pairs[0].vector.size();
  const auto dim = static_cast<std::size_t>(k - 1);
  std::vector<double> embedding(n * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const auto& v = pairs[r + 1].vector;
    require(v.size() == n, Errc::size_mismatch, "eigenvector length mismatch");
    for (std::size_t i = 0; i < n; ++i) embedding[i * dim + r] = v[i];
  }
  if (normalize_rows) {
    for (std::size_t i = 0; i < n; ++i) {
      double norm = 0.0;
      for (std::size_t r = 0; r < dim; ++r)
        norm += embedding[i * dim + r] * embedding[i * dim + r];
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (std::size_t r = 0; r < dim; ++r) embedding[i * dim + r] /= norm;
    }
  }
  const auto km = kmeans(embedding, dim, static_cast<std::size_t>(k), seed);
  return Labeling{canonical_labels(km.labels), k};
}

}  // namespace mixncut
