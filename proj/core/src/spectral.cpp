#include "mixncut/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "mixncut/error.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/rng.hpp"

namespace mixncut {

namespace {
constexpr std::size_t kRowBlock = 8192;
}

std::vector<double> MarkovOperator::apply(std::span<const double> x) const {
  std::vector<double> y(size());
  apply(x, y);
  return y;
}

// ---------------------------------------------------------------------------
// TransitionOperator

TransitionOperator::TransitionOperator(const SparseGraph& g)
    : n_(g.vertex_count()) {
  const auto degree = g.degrees();
  std::vector<std::size_t> counts(n_, 0);
  for (const Edge& e : g.edges()) {
    if (degree[e.i] > 0.0) ++counts[e.i];
    if (e.j != e.i && degree[e.j] > 0.0) ++counts[e.j];
  }
  for (std::size_t i = 0; i < n_; ++i)
    if (!(degree[i] > 0.0)) {
      counts[i] = 1;
      ++absorbing_;
    }
  row_ptr_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) row_ptr_[i + 1] = row_ptr_[i] + counts[i];
  cols_.resize(row_ptr_[n_]);
  probs_.resize(row_ptr_[n_]);
  std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
  for (std::size_t i = 0; i < n_; ++i)
    if (!(degree[i] > 0.0)) {
      cols_[cursor[i]] = static_cast<std::uint32_t>(i);
      probs_[cursor[i]++] = 1.0;
    }
  // Edges arrive sorted by (min, max), which leaves every row column-sorted.
  for (const Edge& e : g.edges()) {
    if (degree[e.i] > 0.0) {
      cols_[cursor[e.i]] = e.j;
      probs_[cursor[e.i]++] = e.w / degree[e.i];
    }
    if (e.j != e.i && degree[e.j] > 0.0) {
      cols_[cursor[e.j]] = e.i;
      probs_[cursor[e.j]++] = e.w / degree[e.j];
    }
  }
}

TransitionOperator build_transition(const SparseGraph& g) {
  return TransitionOperator(g);
}

void TransitionOperator::apply_rows(std::span<const double> x,
                                    std::span<double> y, double scale,
                                    std::size_t begin,
                                    std::size_t end) const noexcept {
  for (std::size_t i = begin; i < end; ++i) {
    double sum = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      sum += probs_[k] * x[cols_[k]];
    y[i] += scale * sum;
  }
}

void TransitionOperator::apply(std::span<const double> x,
                               std::span<double> y) const {
  require(x.size() == n_ && y.size() == n_, Errc::size_mismatch,
          "vector length must equal operator size");
  parallel_for_blocks(n_, kRowBlock, [&](std::size_t begin, std::size_t end) {
    std::fill(y.begin() + static_cast<std::ptrdiff_t>(begin),
              y.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
    apply_rows(x, y, 1.0, begin, end);
  });
}

double TransitionOperator::row_sum(std::size_t i) const noexcept {
  double sum = 0.0;
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += probs_[k];
  return sum;
}

double TransitionOperator::entry(std::size_t i, std::size_t j) const noexcept {
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (cols_[k] == j) return probs_[k];
  return 0.0;
}

// ---------------------------------------------------------------------------
// MixedOperator

MixedOperator::MixedOperator(TransitionOperator first,
                             TransitionOperator second, double lambda)
    : first_(std::move(first)), second_(std::move(second)), lambda_(lambda) {
  require(first_.size() == second_.size(), Errc::size_mismatch,
          "mixed chains must share their state space");
  require(lambda >= 0.0 && lambda <= 1.0, Errc::invalid_argument,
          "lambda must lie in [0, 1]");
}

void MixedOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  require(x.size() == n && y.size() == n, Errc::size_mismatch,
          "vector length must equal operator size");
  parallel_for_blocks(n, kRowBlock, [&](std::size_t begin, std::size_t end) {
    std::fill(y.begin() + static_cast<std::ptrdiff_t>(begin),
              y.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
    first_.apply_rows(x, y, 1.0 - lambda_, begin, end);
    second_.apply_rows(x, y, lambda_, begin, end);
  });
}

// ---------------------------------------------------------------------------
// Eigensolver

double eigen_residual(const MarkovOperator& op, double value,
                      std::span<const double> v) {
  const auto pv = op.apply(v);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = pv[i] - value * v[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MapMatrix = Eigen::Map<Matrix>;
using CVector = Eigen::VectorXcd;

struct Ritz {
  std::complex<double> value;
  CVector y;          // unit-norm coordinates in the Krylov basis
  double estimate;    // |h_{m,m-1}| |y_{m-1}|
};

// Sorted by descending real part; within a conjugate pair the member with
// positive imaginary part comes first.
std::vector<Ritz> ritz_pairs(const Matrix& hm, double beta) {
  Eigen::EigenSolver<Matrix> es(hm, true);
  const auto values = es.eigenvalues();
  const auto vectors = es.eigenvectors();
  std::vector<Ritz> out;
  out.reserve(static_cast<std::size_t>(hm.rows()));
  for (Eigen::Index k = 0; k < hm.rows(); ++k) {
    CVector y = vectors.col(k);
    if (values[k].imag() == 0.0) {
      // Rotate the arbitrary complex phase away so real pairs stay real.
      Eigen::Index arg = 0;
      y.cwiseAbs().maxCoeff(&arg);
      y *= std::conj(y[arg]) / std::abs(y[arg]);
      y = y.real().cast<std::complex<double>>();
    }
    y.normalize();
    out.push_back({values[k], y, std::abs(beta) * std::abs(y[hm.rows() - 1])});
  }
  std::stable_sort(out.begin(), out.end(), [](const Ritz& a, const Ritz& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

bool is_complex(const Ritz& r) {
  return std::abs(r.value.imag()) >
         1e3 * std::numeric_limits<double>::epsilon() *
             std::max(1.0, std::abs(r.value.real()));
}

class ArnoldiSolver {
 public:
  ArnoldiSolver(const MarkovOperator& op, const EigenOptions& options)
      : op_(op),
        opt_(options),
        n_(op.size()),
        m_(std::min(n_, std::max(options.krylov_dim, 2 * options.count + 2))),
        basis_(n_ * (m_ + 1), 0.0),
        h_(Matrix::Zero(static_cast<Eigen::Index>(m_ + 1),
                        static_cast<Eigen::Index>(m_))),
        rng_(Rng::stream(options.seed, 0x5eed)) {}

  EigenSolution run();

 private:
  MapMatrix basis(std::size_t cols) {
    return MapMatrix(basis_.data(), static_cast<Eigen::Index>(n_),
                     static_cast<Eigen::Index>(cols));
  }
  Eigen::Map<Vector> column(std::size_t j) {
    return Eigen::Map<Vector>(basis_.data() + j * n_,
                              static_cast<Eigen::Index>(n_));
  }

  // Orthogonalizes w against the first cols basis vectors (two classical
  // Gram-Schmidt passes); returns the accumulated coefficients.
  Vector orthogonalize(Eigen::Ref<Vector> w, std::size_t cols) {
    auto v = basis(cols);
    Vector h = v.transpose() * w;
    w.noalias() -= v * h;
    Vector h2 = v.transpose() * w;
    w.noalias() -= v * h2;
    return h + h2;
  }

  // Fills column j with a random unit vector orthogonal to columns < j.
  void random_column(std::size_t j) {
    Vector w(static_cast<Eigen::Index>(n_));
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng_.uniform() - 0.5;
      orthogonalize(w, j);
      const double norm = w.norm();
      if (norm > 1e-8) {
        column(j) = w / norm;
        return;
      }
    }
    fail(Errc::no_convergence, "could not extend the Krylov basis");
  }

  // Expands the decomposition from k to m_ columns (fewer if the whole
  // space is exhausted). Returns the number of columns reached.
  std::size_t expand(std::size_t k) {
    Vector w(static_cast<Eigen::Index>(n_));
    for (std::size_t j = k; j < m_; ++j) {
      op_.apply(std::span<const double>(basis_.data() + j * n_, n_),
                std::span<double>(w.data(), n_));
      ++matvecs_;
      const Vector h = orthogonalize(w, j + 1);
      const auto jj = static_cast<Eigen::Index>(j);
      h_.block(0, jj, jj + 1, 1) = h;
      const double beta = w.norm();
      if (j + 1 == n_) {
        h_(jj + 1, jj) = 0.0;
        return j + 1;
      }
      if (beta <= 1e-12 * std::max(1.0, h.norm())) {
        h_(jj + 1, jj) = 0.0;
        random_column(j + 1);
      } else {
        h_(jj + 1, jj) = beta;
        column(j + 1) = w / beta;
      }
      if (matvecs_ >= opt_.max_matvecs) return j + 1;
      if (j + 1 < m_ && j + 1 > opt_.count && (j + 1 - k) % kCheckEvery == 0 &&
          converged_estimate(j + 1))
        return j + 1;
    }
    return m_;
  }

  bool converged_estimate(std::size_t cols) {
    const auto m = static_cast<Eigen::Index>(cols);
    const auto ritz = ritz_pairs(h_.topLeftCorner(m, m), h_(m, m - 1));
    for (std::size_t r = 0; r < std::min(opt_.count, ritz.size()); ++r)
      if (ritz[r].estimate > estimate_scale_ * opt_.tol) return false;
    return true;
  }

  // Keeps the span of the leading `keep` Ritz vectors (real form) and the
  // residual vector, rewriting the decomposition in that basis.
  std::size_t restart(const std::vector<Ritz>& ritz, std::size_t cols,
                      std::size_t keep) {
    const auto m = static_cast<Eigen::Index>(cols);
    if (is_complex(ritz[keep - 1]) && ritz[keep - 1].value.imag() > 0.0)
      keep = keep + 1 < cols ? keep + 1 : keep - 1;  // keep pairs whole
    Matrix y(m, static_cast<Eigen::Index>(keep));
    for (std::size_t k = 0; k < keep; ++k) {
      if (is_complex(ritz[k]) && ritz[k].value.imag() > 0.0 && k + 1 < keep) {
        y.col(static_cast<Eigen::Index>(k)) = ritz[k].y.real();
        y.col(static_cast<Eigen::Index>(k + 1)) = ritz[k].y.imag();
        ++k;
      } else {
        y.col(static_cast<Eigen::Index>(k)) = ritz[k].y.real();
      }
    }
    const auto kk = static_cast<Eigen::Index>(keep);
    Eigen::HouseholderQR<Matrix> qr(y);
    const Matrix q = qr.householderQ() * Matrix::Identity(m, kk);
    const Matrix hm = h_.topLeftCorner(m, m);
    const Matrix h_new = q.transpose() * hm * q;
    const Eigen::RowVectorXd b = h_(m, m - 1) * q.row(m - 1);

    const Matrix v_new = basis(cols) * q;
    const Vector residual = column(cols);
    basis(keep) = v_new;
    column(keep) = residual;
    h_.setZero();
    h_.topLeftCorner(kk, kk) = h_new;
    h_.block(kk, 0, 1, kk) = b;
    ++restarts_;
    return keep;
  }

  EigenPair finalize_pair(const Ritz& r, std::size_t cols) {
    const auto v = basis(cols);
    CVector x = v.cast<std::complex<double>>() * r.y;
    x.normalize();
    Vector re = x.real();
    Vector im = x.imag();
    const double theta_re = r.value.real();
    const double theta_im = is_complex(r) ? r.value.imag() : 0.0;
    const auto apply = [&](const Vector& in) {
      Vector out(in.size());
      op_.apply(std::span<const double>(in.data(), n_),
                std::span<double>(out.data(), n_));
      return out;
    };
    EigenPair pair;
    pair.value = theta_re;
    pair.imag = theta_im;
    if (theta_im == 0.0) {
      // Real pair: rotate so the vector is real, then use it directly.
      Vector best = re.norm() >= im.norm() ? re : im;
      best.normalize();
      pair.residual = (apply(best) - theta_re * best).norm();
      re = best;
    } else {
      const Vector ar = apply(re);
      const Vector ai = apply(im);
      const Vector rr = ar - theta_re * re + theta_im * im;
      const Vector ri = ai - theta_re * im - theta_im * re;
      pair.residual = std::sqrt(rr.squaredNorm() + ri.squaredNorm());
      re.normalize();
    }
    Eigen::Index arg = 0;
    re.cwiseAbs().maxCoeff(&arg);
    if (re[arg] < 0.0) re = -re;
    pair.vector.assign(re.data(), re.data() + re.size());
    return pair;
  }

  const MarkovOperator& op_;
  EigenOptions opt_;
  std::size_t n_;
  std::size_t m_;
  std::vector<double> basis_;  // column-major, n x (m + 1)
  Matrix h_;
  Rng rng_;
  std::size_t matvecs_ = 0;
  std::size_t restarts_ = 0;
  double estimate_scale_ = 1.0;
  static constexpr std::size_t kCheckEvery = 5;
};

EigenSolution ArnoldiSolver::run() {
  EigenSolution sol;
  const std::size_t count = opt_.count;

  // Lock the stationary right eigenpair (1, constant).
  column(0).setConstant(1.0 / std::sqrt(static_cast<double>(n_)));
  h_(0, 0) = 1.0;
  std::size_t k = 1;
  if (n_ > 1) random_column(1);

  for (;;) {
    const std::size_t cols = n_ == 1 ? 1 : expand(k);
    const auto m = static_cast<Eigen::Index>(cols);
    const double beta = cols < n_ ? h_(m, m - 1) : 0.0;
    const auto ritz = ritz_pairs(h_.topLeftCorner(m, m), beta);
    const std::size_t wanted = std::min(count, ritz.size());

    bool estimated = true;
    for (std::size_t r = 0; r < wanted; ++r)
      if (ritz[r].estimate > estimate_scale_ * opt_.tol) estimated = false;
    const bool exhausted = matvecs_ >= opt_.max_matvecs || cols == n_;

    if (estimated || exhausted) {
      sol.pairs.clear();
      sol.max_residual = 0.0;
      for (std::size_t r = 0; r < wanted; ++r) {
        sol.pairs.push_back(finalize_pair(ritz[r], cols));
        sol.max_residual = std::max(sol.max_residual, sol.pairs.back().residual);
        if (sol.pairs.back().imag != 0.0) sol.complex_pair = true;
      }
      sol.converged = sol.max_residual <= opt_.tol;
      if (sol.converged || exhausted) break;
      estimate_scale_ *= 0.1;  // estimates were optimistic; tighten
    }

    const std::size_t keep = std::min(
        cols - 1, std::max(count + 1, count + (cols - count) / 2));
    k = restart(ritz, cols, keep);
  }

  sol.matvecs = matvecs_;
  sol.restarts = restarts_;
  if (sol.complex_pair)
    sol.warnings.push_back(
        "complex Ritz pair among the leading eigenvalues; real parts used");
  if (sol.pairs.size() >= 2 && sol.pairs[1].imag == 0.0 &&
      sol.pairs[1].value > 1.0 - 1e-9)
    sol.warnings.push_back(
        "second eigenvalue is 1: the combined graph appears disconnected");
  if (!sol.converged)
    sol.warnings.push_back("eigensolver stopped at the matvec budget");
  return sol;
}

}  // namespace

EigenSolution top_eigenpairs(const MarkovOperator& op,
                             const EigenOptions& options) {
  require(op.size() >= 1, Errc::invalid_argument, "operator is empty");
  require(options.count >= 1 && options.count <= op.size(),
          Errc::invalid_argument, "eigenpair count must lie in [1, n]");
  require(options.tol > 0.0, Errc::invalid_argument, "tolerance must be positive");
  require(options.krylov_dim >= 2, Errc::invalid_argument,
          "Krylov dimension must be at least 2");
  return ArnoldiSolver(op, options).run();
}

}  // namespace mixncut
