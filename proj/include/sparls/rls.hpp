#pragma once

// Exponentially weighted recursive least squares, maintained through the
// matrix inversion lemma. Serves as the dense baseline the sparse estimator
// is compared against, both in accuracy and in multiplication counts.

#include "sparls/core_ops.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>

namespace sparls {

template <typename Scalar>
class RlsFilter {
 public:
  // num_taps M >= 1, forgetting factor lambda in (0, 1], regularizer
  // delta > 0. Starts from w = 0 and P = delta^-1 * I, the inverse of the
  // delta-regularized weighted input correlation.
  RlsFilter(Index num_taps, double lambda, double delta)
      : lambda_(lambda), inv_lambda_(1.0 / lambda), delta_(delta) {
    if (num_taps < 1) throw std::invalid_argument("RlsFilter: num_taps must be >= 1");
    if (!(lambda > 0.0) || lambda > 1.0)
      throw std::invalid_argument("RlsFilter: lambda must lie in (0, 1]");
    if (!(delta > 0.0)) throw std::invalid_argument("RlsFilter: delta must be > 0");
    w_ = Vector<Scalar>::Zero(num_taps);
    p_ = Matrix<Scalar>::Identity(num_taps, num_taps) / delta;
  }

  // One sample of the recursion:
  //   pi = P x,  g = pi / (lambda + x^H pi),  e = d - w^H x,
  //   w <- w + g conj(e),  P <- (P - g pi^H) / lambda,
  // followed by a Hermitian re-symmetrization of P. Counts
  // 3 M^2 + 4 M + 1 multiplications: M^2 for pi, M for x^H pi, M + 1 for the
  // gain, M for the innovation, M for the estimate update and 2 M^2 for the
  // downdate and rescale of P. The symmetrization is a numerical safeguard
  // and is left out of the tally, as is the reciprocal of lambda computed
  // once at construction.
  const Vector<Scalar>& update(const Vector<Scalar>& x, Scalar d) {
    if (x.size() != w_.size()) throw std::invalid_argument("RlsFilter: input length mismatch");
    const Vector<Scalar> pi = p_ * x;
    const double denom = lambda_ + Eigen::numext::real(x.dot(pi));
    const Vector<Scalar> g = pi * Scalar(1.0 / denom);
    const Scalar e = d - w_.dot(x);
    w_ += g * Eigen::numext::conj(e);
    p_ -= g * pi.adjoint();
    p_ *= inv_lambda_;
    p_ = ((p_ + p_.adjoint()) * 0.5).eval();
    counter_.add(multiplications_per_update(w_.size()));
    return w_;
  }

  const Vector<Scalar>& estimate() const { return w_; }
  const Matrix<Scalar>& inverse_correlation() const { return p_; }
  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  std::uint64_t multiplications() const { return counter_.count; }

  static constexpr std::uint64_t multiplications_per_update(Index m) {
    const auto mm = static_cast<std::uint64_t>(m);
    return 3 * mm * mm + 4 * mm + 1;
  }

 private:
  double lambda_;
  double inv_lambda_;
  double delta_;
  Vector<Scalar> w_;
  Matrix<Scalar> p_;
  MultCounter counter_;
};

}  // namespace sparls
