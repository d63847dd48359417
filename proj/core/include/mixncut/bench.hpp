#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixncut/graph.hpp"
#include "mixncut/image.hpp"

namespace mixncut {

// ---------------------------------------------------------------------------
// Ground truth and textures

enum class PatternKind { vertical_halves, centered_disk, two_corners_diagonal };

std::string to_string(PatternKind kind);
std::optional<PatternKind> parse_pattern(const std::string& name);

/// mask label 1 marks the second texture.
struct GroundTruthPattern {
  PatternKind kind = PatternKind::vertical_halves;
  std::size_t width = 0;
  std::size_t height = 0;
  Bipartition mask;
};

/// vertical-halves: columns >= W/2. centered-disk: within 0.3 min(W, H) of
/// the center. two-corners-diagonal: within min(W, H)/2 of the top-left or
/// bottom-right corner. Distances are measured between pixel centers.
GroundTruthPattern make_pattern(PatternKind kind, std::size_t width,
                                std::size_t height);

enum class TextureKind { grating, checker, blue_noise, filtered_noise };

struct TextureParams {
  TextureKind kind = TextureKind::grating;
  double mean = 128.0;
  double contrast = 64.0;     ///< values span [mean - contrast, mean + contrast]
  double wavelength = 8.0;    ///< grating period in pixels
  double orientation = 0.0;   ///< radians; 0 varies along columns
  std::size_t cell = 4;       ///< checker cell size
  double scale = 2.0;         ///< blue-noise: blur std removed from white noise
  double bandwidth = 0.15;    ///< filtered-noise: across/along std ratio
};

struct TextureSpec {
  std::string name;
  TextureParams params;
  std::uint64_t seed = 0;
};

/// Procedural grayscale texture. Throws Errc::invalid_argument for
/// non-positive sizes, periods, scales or bandwidths.
AppearanceImage synth_texture(const TextureParams& params, std::size_t width,
                              std::size_t height, std::uint64_t seed);

struct Composite {
  AppearanceImage image;
  Bipartition truth;
};

/// Takes texture_a where the mask is 0 and texture_b where it is 1.
Composite compose(const AppearanceImage& texture_a,
                  const AppearanceImage& texture_b,
                  const GroundTruthPattern& pattern);

AppearanceImage resize_nearest(const AppearanceImage& image, std::size_t width,
                               std::size_t height);
Bipartition resize_nearest(const Bipartition& mask, std::size_t width,
                           std::size_t height, std::size_t new_width,
                           std::size_t new_height);

/// Built-in texture library and the ten pairs used by default.
const std::vector<TextureSpec>& builtin_textures();
std::vector<std::pair<std::size_t, std::size_t>> builtin_texture_pairs();

// ---------------------------------------------------------------------------
// Accuracy

/// |S n Q| / |S u Q| with J(empty, empty) = 1.
double jaccard_index(const Bipartition& a, std::uint8_t side_a,
                     const Bipartition& b, std::uint8_t side_b);
/// max over the two label pairings of the mean per-region Jaccard index.
double jaccard_accuracy(const Bipartition& pred, const Bipartition& truth);

// ---------------------------------------------------------------------------
// Sweeps

enum class Method { ncut, ncut_gabor, mixncut };

std::string to_string(Method method);
std::optional<Method> parse_method(const std::string& name);

struct GridPoint {
  double sigma = 0.0;    ///< mixncut only
  double sigma_i = 0.0;  ///< ncut only
  double sigma_x = 0.0;  ///< ncut only
  double lambda = 0.0;   ///< mixncut only

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct SweepConfig {
  std::vector<Method> methods{Method::ncut, Method::ncut_gabor,
                              Method::mixncut};
  std::vector<PatternKind> patterns{PatternKind::vertical_halves,
                                    PatternKind::centered_disk,
                                    PatternKind::two_corners_diagonal};
  std::vector<TextureSpec> textures = builtin_textures();
  /// When non-empty, replaces the procedural textures (names + images).
  std::vector<std::pair<std::string, AppearanceImage>> texture_images;
  std::vector<std::pair<std::size_t, std::size_t>> pairs =
      builtin_texture_pairs();
  std::size_t size = 320;
  std::uint64_t seed = 0;

  std::vector<double> mix_lambdas{0.990, 0.995, 0.997};
  std::vector<double> mix_sigmas{0.1, 1.0, 10.0, 30.0};
  std::vector<double> ncut_sigma_is{20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<double> ncut_sigma_xs{20, 30, 40, 50, 60, 70, 80, 90, 100};
  double mix_edges_per_pixel = 2.0;
  double ncut_edges_per_pixel = 100.0;
  std::size_t clusters = 1000;

  /// Loads every PGM/PPM/PNG in dir as a texture (sorted by file name) and
  /// switches to all unordered pairs.
  void use_texture_dir(const std::filesystem::path& dir);
};

struct RunRecord {
  std::size_t run_index = 0;
  Method method = Method::mixncut;
  PatternKind pattern = PatternKind::vertical_halves;
  std::string texture_a;
  std::string texture_b;
  GridPoint params;
  double m_per_pixel = 0.0;
  std::size_t clusters = 0;
  std::uint64_t seed = 0;
  double jac = 0.0;
  double seconds = 0.0;
  bool failed = false;
  std::string message;
};

struct SummaryRow {
  Method method = Method::mixncut;
  PatternKind pattern = PatternKind::vertical_halves;
  GridPoint best;
  double mean_jac = 0.0;
  double mean_seconds = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

struct SweepResult {
  std::vector<RunRecord> runs;      ///< canonical run-index order
  std::vector<SummaryRow> summary;  ///< method-major, pattern-minor
};

std::size_t texture_count(const SweepConfig& config);
std::string texture_name(const SweepConfig& config, std::size_t index);
/// Texture index rendered at size x size.
AppearanceImage texture_image(const SweepConfig& config, std::size_t index);

/// The parameter grid a method is swept over.
std::vector<GridPoint> method_grid(const SweepConfig& config, Method method);

/// RNG seed derived from a sweep seed and a run index. mixncut runs use
/// their own index; ncut runs that differ only in sigma_i use the index of
/// the first of them, so they share one pixel-pair draw.
std::uint64_t run_seed(std::uint64_t sweep_seed, std::size_t run_index);

/// Segments one composite with one method and grid point; returns jac.
double evaluate_run(const Composite& composite, Method method,
                    const GridPoint& point, const SweepConfig& config,
                    std::uint64_t seed);

/// Runs every method x pattern x texture pair x grid point. Failed runs are
/// recorded with jac = 0. progress, when set, gets one line per run.
SweepResult run_sweep(const SweepConfig& config,
                      std::ostream* progress = nullptr);

/// Best-mean-jac grid point per (method, pattern) recomputed from runs.
std::vector<SummaryRow> summarize(const SweepConfig& config,
                                  const std::vector<RunRecord>& runs);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
/// Aligned text table: one column per (pattern, method), jac and time rows.
std::string format_summary_table(const std::vector<SummaryRow>& rows);

}  // namespace mixncut
