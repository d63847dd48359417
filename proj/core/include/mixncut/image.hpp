#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mixncut {

struct PixelLocation {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const PixelLocation&, const PixelLocation&) = default;
};

/// A W x H raster of d-dimensional appearance vectors stored row-major;
/// pixel j lives at (j / W, j % W). Raw images keep channels in [0, 255];
/// feature images may hold any real values.
class AppearanceImage {
 public:
  AppearanceImage() = default;
  AppearanceImage(std::size_t width, std::size_t height, std::size_t dim,
                  std::vector<double> data);

  static AppearanceImage filled(std::size_t width, std::size_t height,
                                std::size_t dim, double value = 0.0);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> pixel(std::size_t j) const noexcept {
    return {data_.data() + j * dim_, dim_};
  }
  std::span<double> pixel(std::size_t j) noexcept {
    return {data_.data() + j * dim_, dim_};
  }
  double at(std::size_t j, std::size_t channel = 0) const noexcept {
    return data_[j * dim_ + channel];
  }

  /// Squared Euclidean distance between the appearance of pixels i and j.
  double squared_distance(std::size_t i, std::size_t j) const noexcept;

  friend bool operator==(const AppearanceImage&,
                         const AppearanceImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

PixelLocation index_to_location(std::size_t j, const AppearanceImage& image);
PixelLocation index_to_location(std::size_t j, std::size_t width,
                                std::size_t height);
std::size_t location_to_index(PixelLocation loc, const AppearanceImage& image);
std::size_t location_to_index(PixelLocation loc, std::size_t width,
                              std::size_t height);

/// Loads binary/ASCII PGM/PPM (P2, P3, P5, P6) or PNG. Grayscale sources
/// give dim 1, color sources dim 3; alpha is dropped. Channels are scaled to
/// [0, 255] whatever the source bit depth.
AppearanceImage load_image(const std::filesystem::path& path);

/// 8-bit raster ready to be written out. channels is 1 (gray) or 3 (RGB).
struct Raster8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;
};

/// Rounds and clamps a dim 1 or dim 3 image into [0, 255].
Raster8 to_raster(const AppearanceImage& image);

void save_png(const std::filesystem::path& path, const Raster8& raster);
void save_png(const std::filesystem::path& path, const AppearanceImage& image);
/// Binary PGM (dim 1) or PPM (dim 3).
void save_pnm(const std::filesystem::path& path, const AppearanceImage& image);

/// Linear min-max rescale of a per-pixel scalar field to an 8-bit gray
/// image; a constant field maps to 0.
Raster8 render_scalar_field(std::span<const double> values, std::size_t width,
                            std::size_t height);

/// Averages the channels of every pixel into a dim 1 image.
AppearanceImage to_grayscale(const AppearanceImage& image);

}  // namespace mixncut
