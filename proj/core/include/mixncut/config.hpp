#pragma once

#include <cstddef>
#include <cstdint>

namespace mixncut {

struct EigenOptions {
  std::size_t count = 2;
  double tol = 1e-8;
  std::size_t max_matvecs = 5000;
  std::size_t krylov_dim = 30;
  std::uint64_t seed = 0;
};

/// Parameters of the mixed grid/appearance segmentation.
struct MixConfig {
  double lambda = 0.995;          ///< weight of the grid chain
  double sigma = 30.0;            ///< appearance bandwidth of the dense graph
  double edges_per_pixel = 2.0;   ///< m = edges_per_pixel * |V|
  std::size_t num_clusters = 1000;
  int regions = 2;
  std::uint64_t seed = 0;
  bool evaluate_objective = true;  ///< k = 2 mixncut value in diagnostics
  EigenOptions solver{};

  void validate() const;
};

/// Parameters of the classical single-graph normalized cut baseline.
struct NcutConfig {
  double sigma_i = 40.0;
  double sigma_x = 50.0;
  double edges_per_pixel = 100.0;
  bool use_gabor = false;
  int regions = 2;
  std::uint64_t seed = 0;
  EigenOptions solver{};

  void validate() const;
};

}  // namespace mixncut
