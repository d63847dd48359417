#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mixncut/config.hpp"
#include "mixncut/error.hpp"
#include "mixncut/graph.hpp"
#include "mixncut/image.hpp"
#include "mixncut/spectral.hpp"

namespace mixncut {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct SegmentDiagnostics {
  std::vector<double> eigenvalues;
  std::vector<double> eigenvalue_imag;
  std::vector<double> residuals;
  std::size_t matvecs = 0;
  bool converged = false;
  bool complex_pair = false;
  std::vector<std::string> warnings;
  std::size_t realized_clusters = 0;  ///< mixncut only
  std::size_t sampled_edges = 0;
  std::optional<double> objective;     ///< mixncut value of a bipartition
  bool objective_subsampled = false;
  std::vector<double> second_eigenvector;
  std::vector<StageTiming> timings;

  double total_seconds() const noexcept;
};

/// Thrown when the eigensolver exhausts its budget; carries everything
/// computed up to that point.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, SegmentDiagnostics diagnostics)
      : Error(Errc::no_convergence, what), diagnostics_(std::move(diagnostics)) {}
  const SegmentDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  SegmentDiagnostics diagnostics_;
};

struct SegmentResult {
  Labeling labels;
  SegmentDiagnostics diagnostics;
};

/// Variance-split clustering, importance-sampled appearance graph, grid
/// graph, mixed transition operator, leading eigenvectors, k-means.
/// Throws Errc::no_convergence when the eigensolver gives up.
SegmentResult segment_mixncut(const AppearanceImage& image,
                              const MixConfig& config);

/// Classical normalized cut on the sampled appearance-times-distance graph,
/// optionally on Gabor features instead of raw intensities.
SegmentResult segment_ncut(const AppearanceImage& image,
                           const NcutConfig& config);

/// Pixel-pair draw counts segment_ncut samples for a width x height image.
/// They depend on sigma_x, edges_per_pixel and seed only, so runs that
/// differ in sigma_i alone can share them.
SparseGraph ncut_pair_counts(std::size_t width, std::size_t height,
                             const NcutConfig& config);

/// segment_ncut from pre-drawn pair counts. appearance is used as given:
/// the Gabor step, if wanted, must already have been applied.
SegmentResult segment_ncut_with_pairs(const AppearanceImage& appearance,
                                      const NcutConfig& config,
                                      const SparseGraph& pair_counts);

/// Largest image for which the mixncut objective is evaluated exactly;
/// above it the dense term is estimated on a pixel subsample.
inline constexpr std::size_t kExactObjectiveLimit = 4096;

}  // namespace mixncut
