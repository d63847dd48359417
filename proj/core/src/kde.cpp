#include "mixncut/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixncut/error.hpp"

namespace mixncut {

GaussianKde::GaussianKde(const AppearanceImage& image,
                         std::span<const std::size_t> pixels, double sigma)
    : count_(pixels.size()), dim_(image.dim()), sigma_(sigma) {
  require(sigma > 0.0, Errc::invalid_argument, "KDE bandwidth must be positive");
  require(!pixels.empty(), Errc::invalid_argument, "KDE needs at least one point");
  centers_.reserve(count_ * dim_);
  for (std::size_t j : pixels) {
    require(j < image.pixel_count(), Errc::out_of_range, "pixel out of range");
    const auto v = image.pixel(j);
    centers_.insert(centers_.end(), v.begin(), v.end());
  }
}

double GaussianKde::operator()(std::span<const double> c) const {
  require(c.size() == dim_, Errc::size_mismatch, "query dimension mismatch");
  const double s2 = sigma_ * sigma_;
  const double norm =
      std::pow(std::numbers::pi * s2, -0.5 * static_cast<double>(dim_));
  double sum = 0.0;
  for (std::size_t k = 0; k < count_; ++k) {
    double d2 = 0.0;
    for (std::size_t t = 0; t < dim_; ++t) {
      const double d = centers_[k * dim_ + t] - c[t];
      d2 += d * d;
    }
    sum += std::exp(-d2 / s2);
  }
  return norm * sum / static_cast<double>(count_);
}

double GaussianKde::operator()(double c) const {
  return (*this)(std::span<const double>(&c, 1));
}

double GaussianKde::inner_product(const GaussianKde& other) const {
  require(other.dim_ == dim_ && other.sigma_ == sigma_, Errc::invalid_argument,
          "KDEs must share dimension and bandwidth");
  // Two kernels of variance sigma^2/2 convolve into one of variance sigma^2.
  const double two_s2 = 2.0 * sigma_ * sigma_;
  const double norm = std::pow(std::numbers::pi * two_s2,
                               -0.5 * static_cast<double>(dim_));
  const bool same = this == &other;
  double sum = 0.0;
  for (std::size_t a = 0; a < count_; ++a) {
    const double* ca = centers_.data() + a * dim_;
    double row = 0.0;
    const std::size_t first = same ? a + 1 : 0;
    for (std::size_t b = first; b < other.count_; ++b) {
      const double* cb = other.centers_.data() + b * dim_;
      double d2 = 0.0;
      for (std::size_t t = 0; t < dim_; ++t) {
        const double d = ca[t] - cb[t];
        d2 += d * d;
      }
      row += std::exp(-d2 / two_s2);
    }
    sum += same ? 2.0 * row + 1.0 : row;
  }
  return norm * sum /
         (static_cast<double>(count_) * static_cast<double>(other.count_));
}

double GaussianKde::min_center() const {
  return *std::min_element(centers_.begin(), centers_.end());
}

double GaussianKde::max_center() const {
  return *std::max_element(centers_.begin(), centers_.end());
}

double GaussianKde::inner_product_quadrature(const GaussianKde& other,
                                             std::size_t min_points) const {
  require(dim_ == 1 && other.dim_ == 1, Errc::invalid_argument,
          "quadrature inner product supports d = 1 only");
  require(other.sigma_ == sigma_, Errc::invalid_argument,
          "KDEs must share bandwidth");
  const double lo = std::min(min_center(), other.min_center()) - 5.0 * sigma_;
  const double hi = std::max(max_center(), other.max_center()) + 5.0 * sigma_;
  // At least four nodes per kernel standard deviation (sigma / sqrt 2).
  const auto resolution =
      static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * sigma_))) + 1;
  const std::size_t points = std::max({min_points, resolution, std::size_t{2}});
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double c = lo + h * static_cast<double>(k);
    const double f = (*this)(c) * other(c);
    sum += (k == 0 || k + 1 == points) ? 0.5 * f : f;
  }
  return sum * h;
}

}  // namespace mixncut
