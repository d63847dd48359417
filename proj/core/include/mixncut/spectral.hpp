#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixncut/config.hpp"
#include "mixncut/graph.hpp"

namespace mixncut {

/// Linear operator x -> Px of a Markov chain on n states.
class MarkovOperator {
 public:
  virtual ~MarkovOperator() = default;
  virtual std::size_t size() const noexcept = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;

  std::vector<double> apply(std::span<const double> x) const;
};

/// Row-stochastic P = D^-1 W in compressed row form. A vertex without
/// incident weight becomes absorbing (p(i, i) = 1).
class TransitionOperator final : public MarkovOperator {
 public:
  TransitionOperator() = default;
  explicit TransitionOperator(const SparseGraph& g);

  std::size_t size() const noexcept override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;
  using MarkovOperator::apply;

  std::size_t nonzeros() const noexcept { return cols_.size(); }
  std::size_t absorbing_count() const noexcept { return absorbing_; }
  double row_sum(std::size_t i) const noexcept;
  /// Entry p(i, j) (0 when absent).
  double entry(std::size_t i, std::size_t j) const noexcept;

  /// Accumulates into y: y[i] += scale * (P x)[i] for rows [begin, end).
  void apply_rows(std::span<const double> x, std::span<double> y, double scale,
                  std::size_t begin, std::size_t end) const noexcept;

 private:
  std::size_t n_ = 0;
  std::size_t absorbing_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> probs_;
};

TransitionOperator build_transition(const SparseGraph& g);

/// x -> (1 - lambda) P1 x + lambda P2 x: one step follows the first chain
/// with probability 1 - lambda and the second with probability lambda.
class MixedOperator final : public MarkovOperator {
 public:
  MixedOperator(TransitionOperator first, TransitionOperator second,
                double lambda);

  std::size_t size() const noexcept override { return first_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  using MarkovOperator::apply;

  const TransitionOperator& first() const noexcept { return first_; }
  const TransitionOperator& second() const noexcept { return second_; }
  double lambda() const noexcept { return lambda_; }

 private:
  TransitionOperator first_;
  TransitionOperator second_;
  double lambda_;
};

struct EigenPair {
  double value = 0.0;
  double imag = 0.0;  ///< nonzero when the Ritz value is one of a complex pair
  std::vector<double> vector;  ///< unit 2-norm, real part for complex pairs
  double residual = 0.0;       ///< |P z - theta z| for the (complex) pair
};

struct EigenSolution {
  std::vector<EigenPair> pairs;  ///< descending real part
  bool converged = false;
  std::size_t matvecs = 0;
  std::size_t restarts = 0;
  bool complex_pair = false;
  double max_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Leading eigenpairs (largest real part) of a Markov operator by Arnoldi
/// with Krylov-Schur style thick restarts. The known pair (1, constant) is
/// locked into the basis from the start; every other direction starts
/// orthogonal to the constant vector. Residuals are recomputed against the
/// operator before returning. Returns converged = false when the matvec
/// budget runs out; the best pairs found are still filled in.
EigenSolution top_eigenpairs(const MarkovOperator& op,
                             const EigenOptions& options);

/// Explicit residual |P v - value v| for a real vector.
double eigen_residual(const MarkovOperator& op, double value,
                      std::span<const double> v);

}  // namespace mixncut
