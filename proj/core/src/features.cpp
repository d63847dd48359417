#include "mixncut/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixncut/error.hpp"
#include "mixncut/parallel.hpp"

namespace mixncut {

namespace {

using Complex = std::complex<double>;

// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

// out(r, c) = sum_x in(r, c + x) * taps[x + radius], mirrored at the borders.
template <typename In, typename Tap>
std::vector<decltype(In{} * Tap{})> filter_rows(const std::vector<In>& in,
                                                std::size_t width,
                                                std::size_t height,
                                                const std::vector<Tap>& taps) {
  using Out = decltype(In{} * Tap{});
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
  std::vector<Out> out(in.size());
  parallel_for_blocks(height, 16, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      const In* row = in.data() + r * width;
      for (std::size_t c = 0; c < width; ++c) {
        Out sum{};
        for (std::ptrdiff_t x = -radius; x <= radius; ++x)
          sum += row[reflect(static_cast<std::ptrdiff_t>(c) + x, width)] *
                 taps[static_cast<std::size_t>(x + radius)];
        out[r * width + c] = sum;
      }
    }
  });
  return out;
}

template <typename In, typename Tap>
std::vector<decltype(In{} * Tap{})> filter_cols(const std::vector<In>& in,
                                                std::size_t width,
                                                std::size_t height,
                                                const std::vector<Tap>& taps) {
  using Out = decltype(In{} * Tap{});
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
  std::vector<Out> out(in.size());
  parallel_for_blocks(height, 16, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      Out* dst = out.data() + r * width;
      for (std::ptrdiff_t y = -radius; y <= radius; ++y) {
        const In* src =
            in.data() + reflect(static_cast<std::ptrdiff_t>(r) + y, height) * width;
        const Tap t = taps[static_cast<std::size_t>(y + radius)];
        for (std::size_t c = 0; c < width; ++c) dst[c] += src[c] * t;
      }
    }
  });
  return out;
}

}  // namespace

GaborKernel make_gabor_kernel(double wavelength, double orientation) {
  require(wavelength > 0.0 && std::isfinite(wavelength), Errc::invalid_argument,
          "Gabor wavelength must be positive");
  GaborKernel k;
  k.wavelength = wavelength;
  k.orientation = orientation;
  k.envelope_sigma = 0.5 * wavelength;
  k.radius = static_cast<int>(std::ceil(3.0 * k.envelope_sigma));
  const double freq = 2.0 * std::numbers::pi / wavelength;
  const double kx = freq * std::cos(orientation);
  const double ky = freq * std::sin(orientation);
  const double s2 = 2.0 * k.envelope_sigma * k.envelope_sigma;
  double env_sum = 0.0;
  for (int t = -k.radius; t <= k.radius; ++t) env_sum += std::exp(-t * t / s2);
  for (int t = -k.radius; t <= k.radius; ++t) {
    // Each 1-D envelope sums to 1, so the 2-D envelope does too.
    const double e = std::exp(-t * t / s2) / env_sum;
    k.ex.push_back(e);
    k.ey.push_back(e);
    k.gx.push_back(e * std::polar(1.0, kx * t));
    k.gy.push_back(e * std::polar(1.0, ky * t));
  }
  Complex sx{}, sy{};
  for (const auto& v : k.gx) sx += v;
  for (const auto& v : k.gy) sy += v;
  k.dc = (sx * sy).real();
  return k;
}

std::vector<std::complex<double>> GaborKernel::taps() const {
  const std::size_t size = gx.size();
  std::vector<Complex> out(size * size);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x)
      out[y * size + x] = gx[x] * gy[y] - dc * ex[x] * ey[y];
  return out;
}

std::vector<GaborKernel> gabor_bank(std::span<const double> wavelengths,
                                    std::span<const double> orientations) {
  std::vector<GaborKernel> bank;
  bank.reserve(wavelengths.size() * orientations.size());
  for (double w : wavelengths)
    for (double o : orientations) bank.push_back(make_gabor_kernel(w, o));
  return bank;
}

std::vector<double> gabor_magnitude(const AppearanceImage& image,
                                    const GaborKernel& kernel) {
  require(image.dim() == 1, Errc::invalid_argument,
          "Gabor filtering expects a grayscale image");
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  const std::vector<double> src(image.data().begin(), image.data().end());
  const auto carrier = filter_cols(filter_rows(src, w, h, kernel.gx), w, h, kernel.gy);
  const auto envelope = filter_cols(filter_rows(src, w, h, kernel.ex), w, h, kernel.ey);
  std::vector<double> out(src.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::abs(carrier[k] - kernel.dc * envelope[k]);
  return out;
}

AppearanceImage gabor_features(const AppearanceImage& image,
                               std::span<const GaborKernel> bank) {
  require(!bank.empty(), Errc::invalid_argument, "Gabor bank is empty");
  const AppearanceImage gray = to_grayscale(image);
  const std::size_t n = gray.pixel_count();
  const std::size_t dim = bank.size();
  double scale = 1.0;
  for (double v : gray.data()) scale = std::max(scale, std::abs(v));

  std::vector<double> data(n * dim, 0.0);
  for (std::size_t f = 0; f < dim; ++f) {
    const auto mag = gabor_magnitude(gray, bank[f]);
    const auto [lo, hi] = std::minmax_element(mag.begin(), mag.end());
    const double range = *hi - *lo;
    // Rounding noise on a flat response is not a feature.
    if (!(range > 1e-9 * scale)) continue;
    for (std::size_t j = 0; j < n; ++j)
      data[j * dim + f] = 255.0 * (mag[j] - *lo) / range;
  }
  return AppearanceImage(gray.width(), gray.height(), dim, std::move(data));
}

AppearanceImage gabor_features(const AppearanceImage& image) {
  return gabor_features(image, gabor_bank());
}

}  // namespace mixncut
