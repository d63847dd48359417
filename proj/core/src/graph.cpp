#include "mixncut/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "mixncut/error.hpp"
#include "mixncut/kde.hpp"

namespace mixncut {

// ---------------------------------------------------------------------------
// SparseGraph

SparseGraph::SparseGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : n_(vertex_count), edges_(std::move(edges)) {
  require(n_ <= std::numeric_limits<Vertex>::max(), Errc::out_of_range,
          "graph too large for 32-bit vertex ids");
  for (const Edge& e : edges_) {
    require(e.i < n_ && e.j < n_, Errc::out_of_range, "edge endpoint out of range");
    require(e.w >= 0.0 && std::isfinite(e.w), Errc::invalid_argument,
            "edge weights must be finite and non-negative");
  }
  degrees_ = recompute_degrees();
}

std::vector<double> SparseGraph::recompute_degrees() const {
  std::vector<double> deg(n_, 0.0);
  for (const Edge& e : edges_) {
    deg[e.i] += e.w;
    if (e.j != e.i) deg[e.j] += e.w;
  }
  return deg;
}

double SparseGraph::total_volume() const noexcept {
  return std::accumulate(degrees_.begin(), degrees_.end(), 0.0);
}

// ---------------------------------------------------------------------------
// EdgeAccumulator

EdgeAccumulator::EdgeAccumulator(std::size_t vertex_count) : n_(vertex_count) {
  require(n_ <= std::numeric_limits<Vertex>::max(), Errc::out_of_range,
          "graph too large for 32-bit vertex ids");
}

void EdgeAccumulator::add(Vertex i, Vertex j, double w) {
  if (i > j) std::swap(i, j);
  keys_.push_back((static_cast<std::uint64_t>(i) << 32) | j);
  weights_.push_back(w);
}

SparseGraph EdgeAccumulator::freeze() && {
  // Two stable counting sorts (larger endpoint, then smaller) order the
  // draws by (min, max) while keeping repeats in insertion order.
  struct Keyed {
    std::uint64_t key;
    double w;
  };
  const std::size_t m = keys_.size();
  std::vector<Keyed> a(m), b(m);
  for (std::size_t k = 0; k < m; ++k) a[k] = {keys_[k], weights_[k]};
  keys_ = {};
  weights_ = {};
  std::vector<std::size_t> offsets(n_ + 1);
  auto counting_pass = [&](const std::vector<Keyed>& in, std::vector<Keyed>& out,
                           int shift) {
    std::fill(offsets.begin(), offsets.end(), 0);
    for (const Keyed& e : in) ++offsets[((e.key >> shift) & 0xffffffffULL) + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    for (const Keyed& e : in) out[offsets[(e.key >> shift) & 0xffffffffULL]++] = e;
  };
  counting_pass(a, b, 0);
  counting_pass(b, a, 32);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (const Keyed& e : a) {
    const auto i = static_cast<Vertex>(e.key >> 32);
    const auto j = static_cast<Vertex>(e.key & 0xffffffffULL);
    if (!edges.empty() && edges.back().i == i && edges.back().j == j)
      edges.back().w += e.w;
    else
      edges.push_back({i, j, e.w});
  }
  edges.shrink_to_fit();
  return SparseGraph(n_, std::move(edges));
}

// ---------------------------------------------------------------------------
// Bipartition / Labeling

Bipartition::Bipartition(std::vector<std::uint8_t> labels)
    : labels_(std::move(labels)) {
  for (auto l : labels_)
    require(l <= 1, Errc::invalid_argument, "bipartition labels must be 0 or 1");
}

std::size_t Bipartition::count(std::uint8_t side) const noexcept {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), side));
}

std::vector<std::size_t> Bipartition::members(std::uint8_t side) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == side) out.push_back(i);
  return out;
}

Bipartition Bipartition::swapped() const {
  std::vector<std::uint8_t> flipped(labels_.size());
  std::transform(labels_.begin(), labels_.end(), flipped.begin(),
                 [](std::uint8_t l) { return static_cast<std::uint8_t>(1 - l); });
  return Bipartition(std::move(flipped));
}

Bipartition Labeling::to_bipartition() const {
  std::vector<std::uint8_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] == 0 || labels[i] == 1, Errc::invalid_argument,
            "labeling is not a bipartition");
    out[i] = static_cast<std::uint8_t>(labels[i]);
  }
  return Bipartition(std::move(out));
}

std::size_t Labeling::distinct_labels() const {
  return std::set<int>(labels.begin(), labels.end()).size();
}

// ---------------------------------------------------------------------------
// Sparse graph measures

SparseGraph build_grid_graph(std::size_t width, std::size_t height) {
  require(width >= 1 && height >= 1, Errc::invalid_argument,
          "grid dimensions must be at least 1");
  std::vector<Edge> edges;
  edges.reserve(width * (height - 1) + height * (width - 1));
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto j = static_cast<Vertex>(r * width + c);
      if (c + 1 < width) edges.push_back({j, j + 1, 1.0});
      if (r + 1 < height)
        edges.push_back({j, static_cast<Vertex>(j + width), 1.0});
    }
  }
  return SparseGraph(width * height, std::move(edges));
}

double cut_weight(const SparseGraph& g, const Bipartition& p) {
  require(p.size() == g.vertex_count(), Errc::size_mismatch,
          "partition size must equal vertex count");
  double cut = 0.0;
  for (const Edge& e : g.edges())
    if (p[e.i] != p[e.j]) cut += e.w;
  return cut;
}

double volume(const SparseGraph& g, std::span<const std::size_t> side) {
  double vol = 0.0;
  for (std::size_t i : side) {
    require(i < g.vertex_count(), Errc::out_of_range, "vertex out of range");
    vol += g.degree(i);
  }
  return vol;
}

double volume(const SparseGraph& g, const Bipartition& p, std::uint8_t side) {
  require(p.size() == g.vertex_count(), Errc::size_mismatch,
          "partition size must equal vertex count");
  double vol = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] == side) vol += g.degree(i);
  return vol;
}

namespace {

struct CutParts {
  double cut;
  double vol_a;
  double vol_b;
};

CutParts cut_parts(const SparseGraph& g, const Bipartition& p) {
  const double cut = cut_weight(g, p);
  if (p.count(0) == 0 || p.count(1) == 0)
    fail(Errc::undefined_ncut, "ncut needs two non-empty sides");
  const double va = volume(g, p, 0);
  const double vb = volume(g, p, 1);
  if (!(va > 0.0) || !(vb > 0.0))
    fail(Errc::undefined_ncut, "ncut needs two sides of positive volume");
  return {cut, va, vb};
}

}  // namespace

double ncut_weight(const SparseGraph& g, const Bipartition& p) {
  const auto [cut, va, vb] = cut_parts(g, p);
  return cut / va + cut / vb;
}

double ncut_weight_product_form(const SparseGraph& g, const Bipartition& p) {
  const auto [cut, va, vb] = cut_parts(g, p);
  return g.total_volume() * cut / (va * vb);
}

std::size_t grid_boundary_length(const Bipartition& p, std::size_t width,
                                 std::size_t height) {
  require(p.size() == width * height, Errc::size_mismatch,
          "partition size must equal width * height");
  std::size_t length = 0;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t j = r * width + c;
      if (c + 1 < width && p[j] != p[j + 1]) ++length;
      if (r + 1 < height && p[j] != p[j + width]) ++length;
    }
  }
  return length;
}

double grid_ncut_approximation(const Bipartition& p, std::size_t width,
                               std::size_t height) {
  const std::size_t length = grid_boundary_length(p, width, height);
  const auto a = static_cast<double>(p.count(0));
  const auto b = static_cast<double>(p.count(1));
  if (a == 0.0 || b == 0.0)
    fail(Errc::undefined_ncut, "ncut needs two non-empty sides");
  const auto n = static_cast<double>(p.size());
  return (n / 4.0) * static_cast<double>(length) / (a * b);
}

// ---------------------------------------------------------------------------
// Dense appearance graph

DenseGraphSpec::DenseGraphSpec(const AppearanceImage& image, double sigma)
    : image_(&image), sigma_(sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), Errc::invalid_argument,
          "sigma must be positive");
}

double DenseGraphSpec::weight(std::size_t i, std::size_t j) const noexcept {
  return std::exp(-image_->squared_distance(i, j) / (2.0 * sigma_ * sigma_));
}

namespace {

void check_partition(const DenseGraphSpec& spec, const Bipartition& p) {
  require(p.size() == spec.image().pixel_count(), Errc::size_mismatch,
          "partition size must equal pixel count");
}

}  // namespace

double dense_cut_bruteforce(const DenseGraphSpec& spec, const Bipartition& p) {
  check_partition(spec, p);
  double cut = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0) continue;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[j] == 1) cut += spec.weight(i, j);
  }
  return cut;
}

double dense_volume_bruteforce(const DenseGraphSpec& spec, const Bipartition& p,
                               std::uint8_t side) {
  check_partition(spec, p);
  double vol = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != side) continue;
    for (std::size_t j = 0; j < p.size(); ++j) vol += spec.weight(i, j);
  }
  return vol;
}

double dense_ncut_bruteforce(const DenseGraphSpec& spec, const Bipartition& p) {
  check_partition(spec, p);
  if (p.count(0) == 0 || p.count(1) == 0)
    fail(Errc::undefined_ncut, "ncut needs two non-empty sides");
  const double cut = dense_cut_bruteforce(spec, p);
  return cut / dense_volume_bruteforce(spec, p, 0) +
         cut / dense_volume_bruteforce(spec, p, 1);
}

double kde_cut_closed_form(const DenseGraphSpec& spec, const Bipartition& p,
                           KdeMode mode) {
  check_partition(spec, p);
  const auto& image = spec.image();
  const double sigma = spec.sigma();
  if (mode == KdeMode::quadrature)
    require(image.dim() == 1, Errc::invalid_argument,
            "quadrature mode supports one-dimensional appearance only");
  const auto side_a = p.members(0);
  const auto side_b = p.members(1);
  if (side_a.empty() || side_b.empty()) return 0.0;
  const GaussianKde ga(image, side_a, sigma);
  const GaussianKde gb(image, side_b, sigma);
  const double inner = mode == KdeMode::analytic
                           ? ga.inner_product(gb)
                           : ga.inner_product_quadrature(gb);
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma,
                               0.5 * static_cast<double>(image.dim()));
  return norm * static_cast<double>(side_a.size()) *
         static_cast<double>(side_b.size()) * inner;
}

double dense_ncut(const DenseGraphSpec& spec, const Bipartition& p) {
  check_partition(spec, p);
  const auto side_a = p.members(0);
  const auto side_b = p.members(1);
  if (side_a.empty() || side_b.empty())
    fail(Errc::undefined_ncut, "ncut needs two non-empty sides");
  std::vector<std::size_t> all(p.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto& image = spec.image();
  const GaussianKde ga(image, side_a, spec.sigma());
  const GaussianKde gb(image, side_b, spec.sigma());
  const GaussianKde gv(image, all, spec.sigma());
  const double ab = ga.inner_product(gb);
  const double av = ga.inner_product(gv);
  const double bv = gb.inner_product(gv);
  const double vv = gv.inner_product(gv);
  if (!(av > 0.0) || !(bv > 0.0))
    fail(Errc::undefined_ncut, "ncut needs two sides of positive volume");
  return vv * ab / (av * bv);
}

double mixncut_objective(const SparseGraph& grid, const DenseGraphSpec& spec,
                         const Bipartition& p, double lambda) {
  require(lambda >= 0.0 && lambda <= 1.0, Errc::invalid_argument,
          "lambda must lie in [0, 1]");
  if (lambda == 1.0) return ncut_weight(grid, p);
  if (lambda == 0.0) return dense_ncut(spec, p);
  return (1.0 - lambda) * dense_ncut(spec, p) + lambda * ncut_weight(grid, p);
}

}  // namespace mixncut
