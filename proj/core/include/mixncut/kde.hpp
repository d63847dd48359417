#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixncut/image.hpp"

namespace mixncut {

/// Gaussian kernel density estimate over the appearance vectors of a pixel
/// subset,
///
///   g_S(c) = 1/|S| sum_{i in S} K(I(i) - c),
///   K(x)   = exp(-|x|^2 / sigma^2) / (pi sigma^2)^(d/2),
///
/// i.e. a normalized Gaussian with per-component variance sigma^2 / 2. With
/// this bandwidth the convolution of two kernels is the dense-graph weight
/// divided by (2 pi sigma^2)^(d/2), which makes cut and volume identities
/// exact.
class GaussianKde {
 public:
  GaussianKde(const AppearanceImage& image, std::span<const std::size_t> pixels,
              double sigma);

  std::size_t size() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  double sigma() const noexcept { return sigma_; }
  std::span<const double> centers() const noexcept { return centers_; }

  double operator()(std::span<const double> c) const;
  double operator()(double c) const;

  /// Integral of g_S(c) g_T(c) dc through the convolution identity.
  double inner_product(const GaussianKde& other) const;

  /// Same integral by the trapezoid rule over [min - 5 sigma, max + 5 sigma]
  /// with at least min_points nodes. d = 1 only.
  double inner_product_quadrature(const GaussianKde& other,
                                  std::size_t min_points = 4096) const;

  double min_center() const;
  double max_center() const;

 private:
  std::size_t count_;
  std::size_t dim_;
  double sigma_;
  std::vector<double> centers_;
};

}  // namespace mixncut
