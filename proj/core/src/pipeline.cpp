#include "mixncut/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mixncut/cluster.hpp"
#include "mixncut/error.hpp"
#include "mixncut/features.hpp"
#include "mixncut/rng.hpp"
#include "mixncut/sparsify.hpp"

namespace mixncut {

void MixConfig::validate() const {
  require(lambda >= 0.0 && lambda <= 1.0, Errc::invalid_argument,
          "lambda must lie in [0, 1]");
  require(sigma > 0.0 && std::isfinite(sigma), Errc::invalid_argument,
          "sigma must be positive");
  require(edges_per_pixel > 0.0 && std::isfinite(edges_per_pixel),
          Errc::invalid_argument, "edges per pixel must be positive");
  require(num_clusters >= 1, Errc::invalid_argument, "L must be at least 1");
  require(regions >= 2, Errc::invalid_argument, "need at least two regions");
}

void NcutConfig::validate() const {
  require(sigma_i > 0.0 && sigma_x > 0.0, Errc::invalid_argument,
          "sigma_i and sigma_x must be positive");
  require(edges_per_pixel > 0.0 && std::isfinite(edges_per_pixel),
          Errc::invalid_argument, "edges per pixel must be positive");
  require(regions >= 2, Errc::invalid_argument, "need at least two regions");
}

double SegmentDiagnostics::total_seconds() const noexcept {
  double total = 0.0;
  for (const auto& t : timings) total += t.seconds;
  return total;
}

namespace {

class StageClock {
 public:
  explicit StageClock(SegmentDiagnostics& diag) : diag_(diag) {}

  void lap(const char* stage) {
    const auto now = std::chrono::steady_clock::now();
    diag_.timings.push_back(
        {stage, std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  SegmentDiagnostics& diag_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Per-stage seeds so that changing one stage's consumption never shifts
// another's stream.
std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) {
  return Rng::mix(seed ^ Rng::mix(stage * 0x9e3779b97f4a7c15ULL + 1));
}

std::size_t edge_budget(double per_pixel, std::size_t n) {
  return static_cast<std::size_t>(std::llround(per_pixel * static_cast<double>(n)));
}

Labeling solve_and_label(const MarkovOperator& op, int regions,
                         EigenOptions solver, std::uint64_t seed,
                         SegmentDiagnostics& diag, StageClock& clock) {
  solver.count = static_cast<std::size_t>(regions);
  solver.seed = stage_seed(seed, 3);
  const EigenSolution eig = top_eigenpairs(op, solver);
  for (const auto& p : eig.pairs) {
    diag.eigenvalues.push_back(p.value);
    diag.eigenvalue_imag.push_back(p.imag);
    diag.residuals.push_back(p.residual);
  }
  diag.matvecs = eig.matvecs;
  diag.converged = eig.converged;
  diag.complex_pair = eig.complex_pair;
  diag.warnings.insert(diag.warnings.end(), eig.warnings.begin(),
                       eig.warnings.end());
  if (eig.pairs.size() >= 2) diag.second_eigenvector = eig.pairs[1].vector;
  clock.lap("eigensolver");
  if (!eig.converged) {
    std::ostringstream msg;
    msg << "eigensolver did not converge after " << eig.matvecs
        << " matrix applications (max residual " << eig.max_residual
        << ", tolerance " << solver.tol << ")";
    throw SolverFailure(msg.str(), diag);
  }
  Labeling labels = embed_and_label(eig.pairs, regions, stage_seed(seed, 4));
  clock.lap("kmeans");
  return labels;
}

// Dense ncut of a bipartition on a uniform pixel subsample.
std::optional<double> subsampled_dense_ncut(const AppearanceImage& image,
                                            const Bipartition& p, double sigma,
                                            std::size_t samples,
                                            std::uint64_t seed) {
  const std::size_t n = image.pixel_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, 0);
  for (std::size_t k = 0; k < samples; ++k)
    std::swap(order[k], order[k + rng.below(n - k)]);
  std::vector<double> data;
  std::vector<std::uint8_t> labels;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto v = image.pixel(order[k]);
    data.insert(data.end(), v.begin(), v.end());
    labels.push_back(p[order[k]]);
  }
  const AppearanceImage sub(samples, 1, image.dim(), std::move(data));
  const Bipartition sub_p(std::move(labels));
  if (sub_p.count(0) == 0 || sub_p.count(1) == 0) return std::nullopt;
  return dense_ncut(DenseGraphSpec(sub, sigma), sub_p);
}

}  // namespace

SegmentResult segment_mixncut(const AppearanceImage& image,
                              const MixConfig& config) {
  config.validate();
  const std::size_t n = image.pixel_count();
  require(n >= static_cast<std::size_t>(config.regions), Errc::invalid_argument,
          "image has fewer pixels than regions");
  SegmentResult result;
  auto& diag = result.diagnostics;
  StageClock clock(diag);

  const auto clustering = variance_split_partition(
      image, std::min(config.num_clusters, n), stage_seed(config.seed, 1));
  diag.realized_clusters = clustering.cluster_count();
  clock.lap("clustering");

  const SparseGraph data =
      sample_data_edges(image, clustering, config.sigma,
                        edge_budget(config.edges_per_pixel, n),
                        stage_seed(config.seed, 2));
  diag.sampled_edges = data.edges().size();
  clock.lap("sampling");

  const SparseGraph grid = build_grid_graph(image.width(), image.height());
  // The appearance chain is followed with probability 1 - lambda and the
  // grid chain with probability lambda, matching the weights of the
  // two normalized cut terms.
  const MixedOperator op(build_transition(data), build_transition(grid),
                         config.lambda);
  clock.lap("operators");

  result.labels = solve_and_label(op, config.regions, config.solver,
                                  config.seed, diag, clock);

  if (config.regions == 2 && config.evaluate_objective) {
    const Bipartition p = result.labels.to_bipartition();
    if (p.count(0) > 0 && p.count(1) > 0) {
      const double grid_term = ncut_weight(grid, p);
      std::optional<double> dense_term;
      if (n <= kExactObjectiveLimit) {
        dense_term = dense_ncut(DenseGraphSpec(image, config.sigma), p);
      } else {
        dense_term = subsampled_dense_ncut(image, p, config.sigma,
                                           kExactObjectiveLimit,
                                           stage_seed(config.seed, 5));
        diag.objective_subsampled = true;
      }
      if (dense_term)
        diag.objective =
            (1.0 - config.lambda) * *dense_term + config.lambda * grid_term;
    }
    clock.lap("objective");
  }
  return result;
}

SparseGraph ncut_pair_counts(std::size_t width, std::size_t height,
                             const NcutConfig& config) {
  config.validate();
  return sample_baseline_pairs(width, height, config.sigma_x,
                               edge_budget(config.edges_per_pixel, width * height),
                               stage_seed(config.seed, 2));
}

namespace {

void ncut_from_pairs(const AppearanceImage& appearance,
                     const NcutConfig& config, const SparseGraph& pair_counts,
                     SegmentResult& result, StageClock& clock) {
  auto& diag = result.diagnostics;
  const SparseGraph graph =
      weight_baseline_pairs(pair_counts, appearance, config.sigma_i);
  diag.sampled_edges = graph.edges().size();
  clock.lap("weighting");

  const TransitionOperator op = build_transition(graph);
  clock.lap("operators");

  result.labels = solve_and_label(op, config.regions, config.solver,
                                  config.seed, diag, clock);
}

}  // namespace

SegmentResult segment_ncut_with_pairs(const AppearanceImage& appearance,
                                      const NcutConfig& config,
                                      const SparseGraph& pair_counts) {
  config.validate();
  require(appearance.pixel_count() >= static_cast<std::size_t>(config.regions),
          Errc::invalid_argument, "image has fewer pixels than regions");
  require(pair_counts.vertex_count() == appearance.pixel_count(),
          Errc::size_mismatch, "pair counts do not match the image size");
  SegmentResult result;
  StageClock clock(result.diagnostics);
  ncut_from_pairs(appearance, config, pair_counts, result, clock);
  return result;
}

SegmentResult segment_ncut(const AppearanceImage& image,
                           const NcutConfig& config) {
  config.validate();
  const std::size_t n = image.pixel_count();
  require(n >= static_cast<std::size_t>(config.regions), Errc::invalid_argument,
          "image has fewer pixels than regions");
  SegmentResult result;
  StageClock clock(result.diagnostics);

  AppearanceImage features;
  if (config.use_gabor) {
    features = gabor_features(image);
    clock.lap("gabor");
  }
  const AppearanceImage& appearance = config.use_gabor ? features : image;

  const SparseGraph pairs =
      ncut_pair_counts(image.width(), image.height(), config);
  clock.lap("sampling");
  ncut_from_pairs(appearance, config, pairs, result, clock);
  return result;
}

}  // namespace mixncut
