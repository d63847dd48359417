#include "mixncut/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mixncut/error.hpp"
#include "mixncut/features.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/pipeline.hpp"
#include "mixncut/rng.hpp"

namespace mixncut {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> gaussian_taps(double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * double(k * k) / (sigma * sigma));
    sum += taps[k + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// White noise on a (w + 2 pad) x (h + 2 pad) field, row-major.
std::vector<double> white_noise(std::size_t w, std::size_t h, std::size_t pad,
                                std::uint64_t seed) {
  const std::size_t pw = w + 2 * pad, ph = h + 2 * pad;
  std::vector<double> field(pw * ph);
  Rng rng = Rng::stream(seed, 0);
  for (double& v : field) v = rng.normal();
  return field;
}

AppearanceImage rescale_to_range(const std::vector<double>& values,
                                 std::size_t w, std::size_t h, double lo,
                                 double hi) {
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double range = *mx - *mn;
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j)
    out[j] = range > 0 ? lo + (hi - lo) * (values[j] - *mn) / range
                       : 0.5 * (lo + hi);
  return AppearanceImage(w, h, 1, std::move(out));
}

std::vector<double> blue_noise(std::size_t w, std::size_t h, double scale,
                               std::uint64_t seed) {
  const std::vector<double> taps = gaussian_taps(scale);
  const std::size_t r = taps.size() / 2;
  const std::size_t pad = 2 * r;
  const std::size_t pw = w + 2 * pad, ph = h + 2 * pad;
  const std::vector<double> noise = white_noise(w, h, pad, seed);
  // Horizontal pass over the rows that the vertical pass needs.
  std::vector<double> horiz(pw * ph, 0.0);
  for (std::size_t y = 0; y < ph; ++y)
    for (std::size_t x = r; x + r < pw; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < taps.size(); ++k)
        s += taps[k] * noise[y * pw + x + k - r];
      horiz[y * pw + x] = s;
    }
  std::vector<double> out(w * h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t py = y + pad, px = x + pad;
      double s = 0.0;
      for (std::size_t k = 0; k < taps.size(); ++k)
        s += taps[k] * horiz[(py + k - r) * pw + px];
      out[y * w + x] = noise[py * pw + px] - s;
    }
  return out;
}

std::vector<double> oriented_noise(std::size_t w, std::size_t h, double scale,
                                   double bandwidth, double orientation,
                                   std::uint64_t seed) {
  const double across = scale;
  const double along = scale / bandwidth;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * along));
  const double c = std::cos(orientation), s = std::sin(orientation);
  struct Tap {
    std::ptrdiff_t dy, dx;
    double w;
  };
  std::vector<Tap> taps;
  double sum = 0.0;
  for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy)
    for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx) {
      // x runs along columns, orientation measured from the column axis.
      const double u = dx * c + dy * s;
      const double v = -dx * s + dy * c;
      const double g = std::exp(-0.5 * (u * u / (along * along) +
                                        v * v / (across * across)));
      if (g < 1e-6) continue;
      taps.push_back({dy, dx, g});
      sum += g;
    }
  for (Tap& t : taps) t.w /= sum;
  const auto pad = static_cast<std::size_t>(radius);
  const std::size_t pw = w + 2 * pad;
  const std::vector<double> noise = white_noise(w, h, pad, seed);
  std::vector<double> out(w * h);
  parallel_for_blocks(h, 8, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const auto py = static_cast<std::ptrdiff_t>(y + pad);
        const auto px = static_cast<std::ptrdiff_t>(x + pad);
        double acc = 0.0;
        for (const Tap& t : taps)
          acc += t.w * noise[static_cast<std::size_t>(py + t.dy) * pw +
                             static_cast<std::size_t>(px + t.dx)];
        out[y * w + x] = acc;
      }
  });
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string format_param(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::vertical_halves: return "vertical-halves";
    case PatternKind::centered_disk: return "centered-disk";
    case PatternKind::two_corners_diagonal: return "two-corners-diagonal";
  }
  return "?";
}

std::optional<PatternKind> parse_pattern(const std::string& name) {
  for (auto k : {PatternKind::vertical_halves, PatternKind::centered_disk,
                 PatternKind::two_corners_diagonal})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

GroundTruthPattern make_pattern(PatternKind kind, std::size_t width,
                                std::size_t height) {
  require(width > 0 && height > 0, Errc::invalid_argument,
          "pattern size must be positive");
  std::vector<std::uint8_t> mask(width * height, 0);
  const double side = static_cast<double>(std::min(width, height));
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      const double y = r + 0.5, x = c + 0.5;
      bool inside = false;
      switch (kind) {
        case PatternKind::vertical_halves:
          inside = c >= width / 2;
          break;
        case PatternKind::centered_disk: {
          const double dy = y - height / 2.0, dx = x - width / 2.0;
          const double rad = 0.3 * side;
          inside = dx * dx + dy * dy <= rad * rad;
          break;
        }
        case PatternKind::two_corners_diagonal: {
          const double rad = side / 2.0;
          const double dy2 = y - double(height), dx2 = x - double(width);
          inside = x * x + y * y <= rad * rad || dx2 * dx2 + dy2 * dy2 <= rad * rad;
          break;
        }
      }
      mask[r * width + c] = inside ? 1 : 0;
    }
  return {kind, width, height, Bipartition(std::move(mask))};
}

AppearanceImage synth_texture(const TextureParams& p, std::size_t width,
                              std::size_t height, std::uint64_t seed) {
  require(width > 0 && height > 0, Errc::invalid_argument,
          "texture size must be positive");
  require(p.contrast >= 0 && std::isfinite(p.mean), Errc::invalid_argument,
          "texture contrast must be non-negative");
  const double lo = p.mean - p.contrast, hi = p.mean + p.contrast;
  switch (p.kind) {
    case TextureKind::grating: {
      require(p.wavelength > 0, Errc::invalid_argument,
              "grating wavelength must be positive");
      std::vector<double> v(width * height);
      const double c = std::cos(p.orientation), s = std::sin(p.orientation);
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t x = 0; x < width; ++x)
          v[r * width + x] =
              p.mean + p.contrast * std::sin(2 * kPi * (double(x) * c + double(r) * s) /
                                             p.wavelength);
      return AppearanceImage(width, height, 1, std::move(v));
    }
    case TextureKind::checker: {
      require(p.cell > 0, Errc::invalid_argument, "checker cell must be positive");
      std::vector<double> v(width * height);
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t x = 0; x < width; ++x)
          v[r * width + x] = ((r / p.cell + x / p.cell) % 2) ? hi : lo;
      return AppearanceImage(width, height, 1, std::move(v));
    }
    case TextureKind::blue_noise:
      require(p.scale > 0, Errc::invalid_argument,
              "blue-noise scale must be positive");
      return rescale_to_range(blue_noise(width, height, p.scale, seed), width,
                              height, lo, hi);
    case TextureKind::filtered_noise:
      require(p.scale > 0 && p.bandwidth > 0 && p.bandwidth <= 1,
              Errc::invalid_argument,
              "filtered-noise needs scale > 0 and bandwidth in (0, 1]");
      return rescale_to_range(oriented_noise(width, height, p.scale, p.bandwidth,
                                             p.orientation, seed),
                              width, height, lo, hi);
  }
  fail(Errc::invalid_argument, "unknown texture kind");
}

Composite compose(const AppearanceImage& a, const AppearanceImage& b,
                  const GroundTruthPattern& pattern) {
  require(a.width() == pattern.width && a.height() == pattern.height &&
              b.width() == pattern.width && b.height() == pattern.height,
          Errc::size_mismatch, "textures must match the pattern size");
  require(a.dim() == b.dim(), Errc::size_mismatch,
          "textures must have the same channel count");
  const std::size_t d = a.dim();
  std::vector<double> out(a.data().begin(), a.data().end());
  for (std::size_t j = 0; j < pattern.mask.size(); ++j)
    if (pattern.mask[j])
      std::copy_n(b.pixel(j).begin(), d, out.begin() + j * d);
  return {AppearanceImage(pattern.width, pattern.height, d, std::move(out)),
          pattern.mask};
}

AppearanceImage resize_nearest(const AppearanceImage& image, std::size_t width,
                               std::size_t height) {
  require(width > 0 && height > 0 && !image.empty(), Errc::invalid_argument,
          "resize needs non-empty input and output");
  const std::size_t d = image.dim();
  std::vector<double> out(width * height * d);
  for (std::size_t r = 0; r < height; ++r) {
    const std::size_t sr = r * image.height() / height;
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t sc = c * image.width() / width;
      const auto src = image.pixel(sr * image.width() + sc);
      std::copy(src.begin(), src.end(), out.begin() + (r * width + c) * d);
    }
  }
  return AppearanceImage(width, height, d, std::move(out));
}

Bipartition resize_nearest(const Bipartition& mask, std::size_t width,
                           std::size_t height, std::size_t new_width,
                           std::size_t new_height) {
  require(mask.size() == width * height, Errc::size_mismatch,
          "mask size does not match its dimensions");
  require(new_width > 0 && new_height > 0 && width > 0 && height > 0,
          Errc::invalid_argument, "resize needs non-empty input and output");
  std::vector<std::uint8_t> out(new_width * new_height);
  for (std::size_t r = 0; r < new_height; ++r)
    for (std::size_t c = 0; c < new_width; ++c)
      out[r * new_width + c] =
          mask[(r * height / new_height) * width + c * width / new_width];
  return Bipartition(std::move(out));
}

const std::vector<TextureSpec>& builtin_textures() {
  using K = TextureKind;
  static const std::vector<TextureSpec> lib = [] {
    auto t = [](std::string name, K kind, double mean, double contrast,
                std::uint64_t seed) {
      TextureSpec s;
      s.name = std::move(name);
      s.params.kind = kind;
      s.params.mean = mean;
      s.params.contrast = contrast;
      s.seed = seed;
      return s;
    };
    std::vector<TextureSpec> v;
    v.push_back(t("grating-v8", K::grating, 110, 70, 101));
    v.push_back(t("checker4", K::checker, 150, 60, 102));
    v.push_back(t("bluenoise2", K::blue_noise, 128, 64, 103));
    v.push_back(t("streaks-h", K::filtered_noise, 90, 60, 104));
    v.push_back(t("streaks-d", K::filtered_noise, 160, 55, 105));
    v[4].params.orientation = kPi / 4;
    v.push_back(t("grating-d6", K::grating, 150, 50, 106));
    v[5].params.wavelength = 6;
    v[5].params.orientation = kPi / 4;
    v.push_back(t("checker2", K::checker, 100, 80, 107));
    v[6].params.cell = 2;
    v.push_back(t("bluenoise4", K::blue_noise, 170, 60, 108));
    v[7].params.scale = 4;
    v.push_back(t("grating-h4", K::grating, 128, 90, 109));
    v[8].params.wavelength = 4;
    v[8].params.orientation = kPi / 2;
    v.push_back(t("streaks-v", K::filtered_noise, 120, 80, 110));
    v[9].params.orientation = kPi / 2;
    v[9].params.bandwidth = 0.25;
    return v;
  }();
  return lib;
}

std::vector<std::pair<std::size_t, std::size_t>> builtin_texture_pairs() {
  return {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9},
          {0, 4}, {1, 3}, {2, 7}, {5, 9}, {3, 6}};
}

// ---------------------------------------------------------------------------

double jaccard_index(const Bipartition& a, std::uint8_t side_a,
                     const Bipartition& b, std::uint8_t side_b) {
  require(a.size() == b.size(), Errc::size_mismatch,
          "jaccard inputs differ in size");
  std::size_t inter = 0, uni = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const bool in_a = a[j] == side_a, in_b = b[j] == side_b;
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_accuracy(const Bipartition& pred, const Bipartition& truth) {
  require(pred.size() == truth.size(), Errc::size_mismatch,
          "jaccard inputs differ in size");
  const double direct =
      (jaccard_index(truth, 0, pred, 0) + jaccard_index(truth, 1, pred, 1)) / 2;
  const double crossed =
      (jaccard_index(truth, 0, pred, 1) + jaccard_index(truth, 1, pred, 0)) / 2;
  return std::max(direct, crossed);
}

// ---------------------------------------------------------------------------

std::string to_string(Method method) {
  switch (method) {
    case Method::ncut: return "ncut";
    case Method::ncut_gabor: return "ncut-gabor";
    case Method::mixncut: return "mixncut";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "ncut") return Method::ncut;
  if (name == "ncut-gabor" || name == "ncut+gabor") return Method::ncut_gabor;
  if (name == "mixncut") return Method::mixncut;
  return std::nullopt;
}

void SweepConfig::use_texture_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  require(fs::is_directory(dir), Errc::unreadable_file,
          "texture directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  require(files.size() >= 2, Errc::invalid_argument,
          "texture directory needs at least two images");
  texture_images.clear();
  for (const auto& f : files)
    texture_images.emplace_back(f.stem().string(), to_grayscale(load_image(f)));
  pairs.clear();
  for (std::size_t a = 0; a < files.size(); ++a)
    for (std::size_t b = a + 1; b < files.size(); ++b) pairs.emplace_back(a, b);
}

std::size_t texture_count(const SweepConfig& config) {
  return config.texture_images.empty() ? config.textures.size()
                                       : config.texture_images.size();
}

std::string texture_name(const SweepConfig& config, std::size_t index) {
  require(index < texture_count(config), Errc::out_of_range,
          "texture index out of range");
  return config.texture_images.empty() ? config.textures[index].name
                                       : config.texture_images[index].first;
}

AppearanceImage texture_image(const SweepConfig& config, std::size_t index) {
  require(index < texture_count(config), Errc::out_of_range,
          "texture index out of range");
  if (!config.texture_images.empty())
    return resize_nearest(config.texture_images[index].second, config.size,
                          config.size);
  const TextureSpec& spec = config.textures[index];
  return synth_texture(spec.params, config.size, config.size, spec.seed);
}

std::vector<GridPoint> method_grid(const SweepConfig& config, Method method) {
  std::vector<GridPoint> grid;
  if (method == Method::mixncut) {
    for (double lambda : config.mix_lambdas)
      for (double sigma : config.mix_sigmas)
        grid.push_back({sigma, 0.0, 0.0, lambda});
  } else {
    // sigma_x-major: runs that share a pixel-pair draw are contiguous.
    for (double sx : config.ncut_sigma_xs)
      for (double si : config.ncut_sigma_is) grid.push_back({0.0, si, sx, 0.0});
  }
  return grid;
}

std::uint64_t run_seed(std::uint64_t sweep_seed, std::size_t run_index) {
  return Rng::stream(sweep_seed, run_index).next();
}

namespace {

MixConfig mix_config(const GridPoint& point, const SweepConfig& config,
                     std::uint64_t seed) {
  MixConfig mc;
  mc.lambda = point.lambda;
  mc.sigma = point.sigma;
  mc.edges_per_pixel = config.mix_edges_per_pixel;
  mc.num_clusters = config.clusters;
  mc.seed = seed;
  mc.evaluate_objective = false;
  return mc;
}

NcutConfig ncut_config(const GridPoint& point, const SweepConfig& config,
                       std::uint64_t seed, bool gabor) {
  NcutConfig nc;
  nc.sigma_i = point.sigma_i;
  nc.sigma_x = point.sigma_x;
  nc.edges_per_pixel = config.ncut_edges_per_pixel;
  nc.use_gabor = gabor;
  nc.seed = seed;
  return nc;
}

}  // namespace

double evaluate_run(const Composite& composite, Method method,
                    const GridPoint& point, const SweepConfig& config,
                    std::uint64_t seed) {
  const Labeling labels =
      method == Method::mixncut
          ? segment_mixncut(composite.image, mix_config(point, config, seed))
                .labels
          : segment_ncut(composite.image,
                         ncut_config(point, config, seed,
                                     method == Method::ncut_gabor))
                .labels;
  return jaccard_accuracy(labels.to_bipartition(), composite.truth);
}

SweepResult run_sweep(const SweepConfig& config, std::ostream* progress) {
  require(!config.methods.empty() && !config.patterns.empty() &&
              !config.pairs.empty(),
          Errc::invalid_argument, "sweep needs methods, patterns and pairs");
  require(config.size > 0, Errc::invalid_argument, "sweep size must be positive");
  for (const auto& [a, b] : config.pairs)
    require(a < texture_count(config) && b < texture_count(config),
            Errc::out_of_range, "texture pair index out of range");
  for (Method m : config.methods)
    require(!method_grid(config, m).empty(), Errc::invalid_argument,
            "empty parameter grid for " + to_string(m));

  // Composite images and their Gabor features, shared across grid points.
  const std::size_t n_pat = config.patterns.size(), n_pair = config.pairs.size();
  std::vector<AppearanceImage> textures(texture_count(config));
  std::vector<bool> needed(textures.size(), false);
  for (const auto& [a, b] : config.pairs) needed[a] = needed[b] = true;
  for (std::size_t t = 0; t < textures.size(); ++t)
    if (needed[t]) textures[t] = texture_image(config, t);
  std::vector<Composite> composites;
  for (PatternKind pk : config.patterns) {
    const auto pattern = make_pattern(pk, config.size, config.size);
    for (const auto& [a, b] : config.pairs)
      composites.push_back(compose(textures[a], textures[b], pattern));
  }
  const bool want_gabor =
      std::find(config.methods.begin(), config.methods.end(),
                Method::ncut_gabor) != config.methods.end();
  std::vector<AppearanceImage> features(composites.size());
  if (want_gabor)
    parallel_for_blocks(composites.size(), 1, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k)
        features[k] = gabor_features(composites[k].image);
    });

  // Runs in canonical order. ncut runs that differ only in sigma_i form one
  // unit: they share a seed and therefore one pixel-pair draw.
  struct Job {
    Method method;
    std::size_t pattern, pair;
    GridPoint point;
  };
  std::vector<Job> jobs;
  std::vector<std::pair<std::size_t, std::size_t>> units;  // [first, last)
  for (Method m : config.methods) {
    const auto grid = method_grid(config, m);
    for (std::size_t p = 0; p < n_pat; ++p)
      for (std::size_t q = 0; q < n_pair; ++q)
        for (const GridPoint& g : grid) {
          const bool joins = m != Method::mixncut && !units.empty() &&
                             jobs.back().method == m &&
                             jobs.back().pattern == p && jobs.back().pair == q &&
                             jobs.back().point.sigma_x == g.sigma_x;
          if (joins)
            ++units.back().second;
          else
            units.emplace_back(jobs.size(), jobs.size() + 1);
          jobs.push_back({m, p, q, g});
        }
  }

  SweepResult result;
  result.runs.resize(jobs.size());
  std::size_t done = 0;
  std::mutex progress_lock;
  auto report = [&](const RunRecord& rec) {
    if (!progress) return;
    std::lock_guard lock(progress_lock);
    ++done;
    *progress << "[" << done << "/" << jobs.size() << "] "
              << to_string(rec.method) << " " << to_string(rec.pattern) << " "
              << rec.texture_a << "|" << rec.texture_b << " jac=" << std::fixed
              << std::setprecision(4) << rec.jac << " t=" << std::setprecision(2)
              << rec.seconds << "s" << std::defaultfloat
              << (rec.failed ? " FAILED" : "") << "\n";
  };
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  parallel_for_blocks(units.size(), 1, [&](std::size_t ub, std::size_t ue) {
    for (std::size_t u = ub; u < ue; ++u) {
      const auto [first, last] = units[u];
      const Job& lead = jobs[first];
      const std::size_t image_id = lead.pattern * n_pair + lead.pair;
      const Composite& comp = composites[image_id];
      const bool gabor = lead.method == Method::ncut_gabor;
      const std::uint64_t seed = run_seed(config.seed, first);

      // Shared pixel-pair draw; its cost is charged to every run using it.
      SparseGraph pairs;
      double shared_seconds = 0.0;
      std::string shared_error;
      if (lead.method != Method::mixncut) {
        const auto t0 = Clock::now();
        try {
          pairs = ncut_pair_counts(config.size, config.size,
                                   ncut_config(lead.point, config, seed, gabor));
        } catch (const std::exception& ex) {
          shared_error = ex.what();
        }
        shared_seconds = seconds_since(t0);
      }

      for (std::size_t k = first; k < last; ++k) {
        const Job& job = jobs[k];
        RunRecord& rec = result.runs[k];
        rec.run_index = k;
        rec.method = job.method;
        rec.pattern = config.patterns[job.pattern];
        rec.texture_a = texture_name(config, config.pairs[job.pair].first);
        rec.texture_b = texture_name(config, config.pairs[job.pair].second);
        rec.params = job.point;
        rec.m_per_pixel = job.method == Method::mixncut
                              ? config.mix_edges_per_pixel
                              : config.ncut_edges_per_pixel;
        rec.clusters = job.method == Method::mixncut ? config.clusters : 0;
        rec.seed = seed;
        const auto t0 = Clock::now();
        try {
          if (!shared_error.empty()) fail(Errc::invalid_argument, shared_error);
          const Labeling labels =
              job.method == Method::mixncut
                  ? segment_mixncut(comp.image,
                                    mix_config(job.point, config, seed))
                        .labels
                  : segment_ncut_with_pairs(
                        gabor ? features[image_id] : comp.image,
                        ncut_config(job.point, config, seed, false), pairs)
                        .labels;
          rec.jac = jaccard_accuracy(labels.to_bipartition(), comp.truth);
        } catch (const std::exception& ex) {
          rec.jac = 0.0;
          rec.failed = true;
          rec.message = ex.what();
        }
        rec.seconds = shared_seconds + seconds_since(t0);
        report(rec);
      }
    }
  });
  result.summary = summarize(config, result.runs);
  return result;
}

std::vector<SummaryRow> summarize(const SweepConfig& config,
                                  const std::vector<RunRecord>& runs) {
  std::vector<SummaryRow> rows;
  for (Method m : config.methods) {
    const auto grid = method_grid(config, m);
    for (PatternKind pk : config.patterns) {
      std::vector<double> jac_sum(grid.size(), 0.0), sec_sum(grid.size(), 0.0);
      std::vector<std::size_t> count(grid.size(), 0), failures(grid.size(), 0);
      for (const RunRecord& r : runs) {
        if (r.method != m || r.pattern != pk) continue;
        const auto it = std::find(grid.begin(), grid.end(), r.params);
        if (it == grid.end()) continue;
        const auto g = static_cast<std::size_t>(it - grid.begin());
        jac_sum[g] += r.jac;
        sec_sum[g] += r.seconds;
        ++count[g];
        failures[g] += r.failed;
      }
      SummaryRow row;
      row.method = m;
      row.pattern = pk;
      bool any = false;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (count[g] == 0) continue;
        const double mean = jac_sum[g] / double(count[g]);
        if (!any || mean > row.mean_jac) {
          any = true;
          row.best = grid[g];
          row.mean_jac = mean;
          row.mean_seconds = sec_sum[g] / double(count[g]);
          row.runs = count[g];
          row.failures = failures[g];
        }
      }
      if (any) rows.push_back(row);
    }
  }
  return rows;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "method,pattern,texture_a,texture_b,sigma,sigma_i,sigma_x,lambda,"
         "m_per_pixel,L,seed,jac,seconds\n";
  for (const RunRecord& r : runs) {
    const bool mix = r.method == Method::mixncut;
    out << to_string(r.method) << ',' << to_string(r.pattern) << ','
        << csv_field(r.texture_a) << ',' << csv_field(r.texture_b) << ','
        << (mix ? format_param(r.params.sigma) : "") << ','
        << (mix ? "" : format_param(r.params.sigma_i)) << ','
        << (mix ? "" : format_param(r.params.sigma_x)) << ','
        << (mix ? format_param(r.params.lambda) : "") << ','
        << format_param(r.m_per_pixel) << ','
        << (mix ? std::to_string(r.clusters) : "") << ',' << r.seed << ','
        << format_double(r.jac) << ',' << std::fixed << std::setprecision(6)
        << r.seconds << std::defaultfloat << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,pattern,sigma,sigma_i,sigma_x,lambda,mean_jac,mean_seconds,"
         "runs,failures\n";
  for (const SummaryRow& r : rows) {
    const bool mix = r.method == Method::mixncut;
    out << to_string(r.method) << ',' << to_string(r.pattern) << ','
        << (mix ? format_param(r.best.sigma) : "") << ','
        << (mix ? "" : format_param(r.best.sigma_i)) << ','
        << (mix ? "" : format_param(r.best.sigma_x)) << ','
        << (mix ? format_param(r.best.lambda) : "") << ','
        << format_double(r.mean_jac) << ',' << std::fixed
        << std::setprecision(6) << r.mean_seconds << std::defaultfloat << ','
        << r.runs << ',' << r.failures << '\n';
  }
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  std::vector<std::string> header{"pattern", "method", "jac", "time (s)",
                                  "best"};
  std::vector<std::vector<std::string>> cells;
  for (const SummaryRow& r : rows) {
    std::ostringstream jac, sec, best;
    jac << std::fixed << std::setprecision(3) << r.mean_jac;
    sec << std::fixed << std::setprecision(2) << r.mean_seconds;
    if (r.method == Method::mixncut)
      best << "lambda=" << format_param(r.best.lambda)
           << " sigma=" << format_param(r.best.sigma);
    else
      best << "sigma_i=" << format_param(r.best.sigma_i)
           << " sigma_x=" << format_param(r.best.sigma_x);
    if (r.failures) best << " (" << r.failures << " failed)";
    cells.push_back({to_string(r.pattern), to_string(r.method), jac.str(),
                     sec.str(), best.str()});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& row : cells) line(row);
  return os.str();
}

}  // namespace mixncut
