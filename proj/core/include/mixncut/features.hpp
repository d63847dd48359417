#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mixncut/image.hpp"

namespace mixncut {

/// Complex Gabor filter with an isotropic Gaussian envelope of std
/// 0.5 * wavelength, truncated at 3 std. The carrier runs along
/// (cos theta, sin theta) in (col, row) coordinates. The real part is made
/// zero-mean by subtracting a multiple of the envelope.
///
/// The kernel factors as gx(x) gy(y) - dc * ex(x) ey(y), which is how it is
/// applied.
struct GaborKernel {
  double wavelength = 0.0;
  double orientation = 0.0;
  double envelope_sigma = 0.0;
  int radius = 0;
  double dc = 0.0;
  std::vector<std::complex<double>> gx;
  std::vector<std::complex<double>> gy;
  std::vector<double> ex;
  std::vector<double> ey;

  /// Dense (2r+1)^2 taps, row-major over (y, x).
  std::vector<std::complex<double>> taps() const;
};

inline constexpr double kDefaultGaborWavelengths[] = {4.0, 8.0, 16.0};
inline constexpr double kDefaultGaborOrientations[] = {
    0.0, 0.78539816339744830962, 1.57079632679489661923,
    2.35619449019438793850};

GaborKernel make_gabor_kernel(double wavelength, double orientation);

/// One kernel per (wavelength, orientation), wavelength-major.
std::vector<GaborKernel> gabor_bank(
    std::span<const double> wavelengths = kDefaultGaborWavelengths,
    std::span<const double> orientations = kDefaultGaborOrientations);

/// |image * kernel| per pixel with mirrored borders. image must be dim 1.
std::vector<double> gabor_magnitude(const AppearanceImage& image,
                                    const GaborKernel& kernel);

/// Per-pixel magnitudes of the whole bank, each channel rescaled to
/// [0, 255] (a constant channel maps to 0). Color input is averaged to gray.
AppearanceImage gabor_features(const AppearanceImage& image,
                               std::span<const GaborKernel> bank);
AppearanceImage gabor_features(const AppearanceImage& image);

}  // namespace mixncut
