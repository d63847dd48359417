#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "mixncut/graph.hpp"
#include "mixncut/image.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(MIXNCUT_TEST_DATA) / name;
}

// Fresh scratch directory per call site.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("mixncut_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline mixncut::AppearanceImage random_image(std::size_t w, std::size_t h,
                                             std::size_t d, std::mt19937_64& gen,
                                             double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(w * h * d);
  for (double& x : v) x = u(gen);
  return mixncut::AppearanceImage(w, h, d, std::move(v));
}

// Random bipartition with both sides non-empty.
inline mixncut::Bipartition random_split(std::size_t n, std::mt19937_64& gen) {
  std::vector<std::uint8_t> l(n);
  std::bernoulli_distribution b(0.5);
  for (auto& x : l) x = b(gen);
  l[0] = 0;
  l[n - 1] = 1;
  return mixncut::Bipartition(std::move(l));
}

inline mixncut::SparseGraph random_graph(std::size_t n, double density,
                                         std::mt19937_64& gen,
                                         bool self_loops = false) {
  std::vector<mixncut::Edge> edges;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = self_loops ? i : i + 1; j < n; ++j)
      if (u(gen) < density)
        edges.push_back({static_cast<mixncut::Vertex>(i),
                         static_cast<mixncut::Vertex>(j), 0.1 + u(gen)});
  return mixncut::SparseGraph(n, std::move(edges));
}

// A connected random graph: a spanning path plus random extra edges.
inline mixncut::SparseGraph random_connected_graph(std::size_t n, double density,
                                                   std::mt19937_64& gen) {
  std::vector<mixncut::Edge> edges;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (j == i + 1 || u(gen) < density)
        edges.push_back({static_cast<mixncut::Vertex>(i),
                         static_cast<mixncut::Vertex>(j), 0.1 + u(gen)});
  return mixncut::SparseGraph(n, std::move(edges));
}

}  // namespace testing
