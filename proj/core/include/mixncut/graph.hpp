#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixncut/image.hpp"

namespace mixncut {

using Vertex = std::uint32_t;

struct Edge {
  Vertex i = 0;
  Vertex j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph stored as an edge list, each unordered pair at
/// most once. A self-loop counts its weight once towards its vertex degree.
class SparseGraph {
 public:
  SparseGraph() = default;
  SparseGraph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> degrees() const noexcept { return degrees_; }
  double degree(std::size_t i) const noexcept { return degrees_[i]; }
  double total_volume() const noexcept;

  /// Degrees recomputed from the edge list, ignoring the cache.
  std::vector<double> recompute_degrees() const;

  friend bool operator==(const SparseGraph&, const SparseGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
};

/// Collects weighted edges, merging repeats. Weights of a repeated pair are
/// summed in insertion order; freeze() emits edges sorted by (min, max).
class EdgeAccumulator {
 public:
  explicit EdgeAccumulator(std::size_t vertex_count);

  void add(Vertex i, Vertex j, double w);
  std::size_t pending() const noexcept { return keys_.size(); }
  SparseGraph freeze() &&;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> keys_;
  std::vector<double> weights_;
};

/// Two-way split of the vertex set: label 0 is side A, label 1 is side B.
class Bipartition {
 public:
  Bipartition() = default;
  explicit Bipartition(std::vector<std::uint8_t> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return labels_[i]; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::size_t count(std::uint8_t side) const noexcept;
  std::vector<std::size_t> members(std::uint8_t side) const;
  Bipartition swapped() const;

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  std::vector<std::uint8_t> labels_;
};

/// k-way region assignment.
struct Labeling {
  std::vector<int> labels;
  int k = 2;

  /// Interprets labels {0, 1} as a bipartition; throws for any other label.
  Bipartition to_bipartition() const;
  std::size_t distinct_labels() const;
};

// ---------------------------------------------------------------------------
// Sparse graphs

/// 4-neighbour grid over a W x H image, every edge of weight 1.
SparseGraph build_grid_graph(std::size_t width, std::size_t height);

double cut_weight(const SparseGraph& g, const Bipartition& p);
double volume(const SparseGraph& g, std::span<const std::size_t> side);
double volume(const SparseGraph& g, const Bipartition& p, std::uint8_t side);

/// cut/vol(A) + cut/vol(B). Throws Errc::undefined_ncut when a side is empty
/// or has zero volume.
double ncut_weight(const SparseGraph& g, const Bipartition& p);
/// vol(V) * cut / (vol(A) vol(B)); algebraically equal to ncut_weight.
double ncut_weight_product_form(const SparseGraph& g, const Bipartition& p);

/// Number of 4-neighbour pixel pairs carrying different labels.
std::size_t grid_boundary_length(const Bipartition& p, std::size_t width,
                                 std::size_t height);

/// (|V|/4) * boundary / (|A| |B|): the grid ncut for a region pair with the
/// boundary length measured as the grid cut.
double grid_ncut_approximation(const Bipartition& p, std::size_t width,
                               std::size_t height);

// ---------------------------------------------------------------------------
// Dense appearance graph

/// Implicit complete graph over the pixels of an image with weights
/// w(i, j) = exp(-|I(i) - I(j)|^2 / (2 sigma^2)) and w(i, i) = 1.
/// Holds a reference: the image must outlive the spec.
class DenseGraphSpec {
 public:
  DenseGraphSpec(const AppearanceImage& image, double sigma);

  const AppearanceImage& image() const noexcept { return *image_; }
  double sigma() const noexcept { return sigma_; }
  double weight(std::size_t i, std::size_t j) const noexcept;

 private:
  const AppearanceImage* image_;
  double sigma_;
};

/// Exact double loop over A x B.
double dense_cut_bruteforce(const DenseGraphSpec& spec, const Bipartition& p);
/// Sum over i in side, j in V (self terms included).
double dense_volume_bruteforce(const DenseGraphSpec& spec, const Bipartition& p,
                               std::uint8_t side);
/// cut/vol(A) + cut/vol(B) from the brute-force cut and volumes.
double dense_ncut_bruteforce(const DenseGraphSpec& spec, const Bipartition& p);

enum class KdeMode {
  analytic,    ///< Gaussian convolution identity, exact up to rounding
  quadrature,  ///< trapezoid rule over appearance space, d = 1 only
};

/// (2 pi sigma^2)^(d/2) |A| |B| <g_A, g_B>.
double kde_cut_closed_form(const DenseGraphSpec& spec, const Bipartition& p,
                           KdeMode mode = KdeMode::analytic);

/// <g_V, g_V> <g_A, g_B> / (<g_A, g_V> <g_B, g_V>).
double dense_ncut(const DenseGraphSpec& spec, const Bipartition& p);

/// (1 - lambda) ncut(G_data) + lambda ncut(G_grid).
double mixncut_objective(const SparseGraph& grid, const DenseGraphSpec& spec,
                         const Bipartition& p, double lambda);

}  // namespace mixncut
