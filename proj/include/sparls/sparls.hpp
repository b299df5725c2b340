#pragma once

// Sparse recursive least squares estimator. The l1-penalized weighted
// least-squares objective is minimized online: each new sample updates a
// pair of sufficient statistics (B, u) through rank-one recursions, then a
// small number of shrinkage iterations refine the coefficient estimate
// while touching only the columns whose entries currently exceed the
// threshold. That restriction is what keeps the per-sample multiplication
// count below the dense baseline on sparse systems.

#include "sparls/core_ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace sparls {

// How B evolves when a new sample arrives.
//
//   paper_literal          B <- lambda B - (alpha^2/sigma^2) x x^H
//   definition_consistent  B <- lambda B + (1 - lambda) I - (alpha^2/sigma^2) x x^H
//
// The first matches the published recursion and lets the identity part of B
// decay by lambda each step; the second adds the small diagonal refresh that
// keeps B equal to I - (alpha^2/sigma^2) * Phi with Phi the exponentially
// weighted input correlation. The two coincide at lambda = 1.
enum class RecursionMode { paper_literal, definition_consistent };

struct SparlsParams {
  double gamma = 0.0;    // l1 penalty weight, >= 0
  double alpha = 0.0;    // shrinkage step size, > 0
  double sigma2 = 0.0;   // observation noise variance, > 0
  double lambda = 1.0;   // forgetting factor, in (0, 1]
  int iterations = 1;    // shrinkage iterations per sample, >= 1
  RecursionMode mode = RecursionMode::definition_consistent;

  double threshold() const { return gamma * alpha * alpha; }
  double noise_ratio() const { return alpha * alpha / sigma2; }

  // Stability of the shrinkage iteration wants alpha^2 <= sigma2 / s1 with
  // s1 the largest eigenvalue of the weighted input correlation. Callers
  // that know s1 (or a bound on it) can check here; violations degrade
  // convergence rather than invalidate the state, so this is advisory.
  bool step_size_safe_for(double s1) const { return alpha * alpha <= sigma2 / s1; }

  void validate() const {
    if (gamma < 0.0) throw std::invalid_argument("SparlsParams: gamma must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("SparlsParams: alpha must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("SparlsParams: sigma2 must be > 0");
    if (!(lambda > 0.0) || lambda > 1.0)
      throw std::invalid_argument("SparlsParams: lambda must lie in (0, 1]");
    if (iterations < 1) throw std::invalid_argument("SparlsParams: iterations must be >= 1");
  }
};

template <typename Scalar>
struct LcemResult {
  Vector<Scalar> estimate;
  // Sum over the `iterations` shrinkage applications of |I+| + |I-|, the
  // active-set sizes extracted from each residual. Dividing by the
  // iteration count gives the average active-set size N.
  std::uint64_t support_visits = 0;
};

// Runs `iterations` shrinkage applications w <- shrink(B w + u) starting
// from the estimate whose product B w0 the caller supplies as s0:
//
//   r = s0 + u
//   repeat iterations-1 times: r = B shrink(r) + u   (restricted product)
//   return shrink(r)
//
// The first application needs no product of its own (s0 carries it), so the
// loop multiplies iterations-1 times, each product restricted to the active
// set of the current residual and counted as rows(B) * (|I+| + |I-|).
// support_visits accumulates the active-set size of every residual
// encountered, including the final one the returned estimate is read from.
template <typename Scalar>
LcemResult<Scalar> lcem(const Matrix<Scalar>& b, const Vector<Scalar>& u,
                        const Vector<Scalar>& s0, int iterations, double threshold,
                        MultCounter& counter) {
  if (b.rows() != b.cols()) throw std::invalid_argument("lcem: B must be square");
  if (u.size() != b.rows() || s0.size() != b.rows())
    throw std::invalid_argument("lcem: vector length does not match B");
  if (iterations < 1) throw std::invalid_argument("lcem: iterations must be >= 1");
  if (threshold < 0.0) throw std::invalid_argument("lcem: threshold must be >= 0");

  LcemResult<Scalar> result;
  Vector<Scalar> r = s0 + u;
  for (int l = 1; l < iterations; ++l) {
    const auto [plus, minus] = threshold_support(r, threshold);
    result.support_visits += plus.size() + minus.size();
    SupportSet joint(plus.size() + minus.size());
    std::merge(plus.begin(), plus.end(), minus.begin(), minus.end(), joint.begin());
    const Vector<Scalar> w = soft_threshold(r, threshold);
    r = restricted_matvec(b, gather(w, joint), joint, counter);
    r += u;
  }
  const auto [plus, minus] = threshold_support(r, threshold);
  result.support_visits += plus.size() + minus.size();
  result.estimate = soft_threshold(r, threshold);
  return result;
}

struct SupportStats {
  double average_support = 0.0;       // N: mean |I+| + |I-| per iteration
  std::uint64_t multiplications = 0;  // warm starts + restricted products
};

template <typename Scalar>
class SparlsFilter {
 public:
  // Seeds the statistics from the first sample pair:
  //   B = I - (alpha^2/sigma^2) x1 x1^H,  u = (alpha^2/sigma^2) x1 conj(d1),
  // with w = 0. x1 must not be the zero vector.
  SparlsFilter(const Vector<Scalar>& x1, Scalar d1, const SparlsParams& params)
      : params_(params) {
    params_.validate();
    if (x1.size() < 1) throw std::invalid_argument("SparlsFilter: empty input window");
    if (x1.isZero(0.0)) throw std::invalid_argument("SparlsFilter: first input window is zero");
    const Index m = x1.size();
    const double c = params_.noise_ratio();
    b_ = Matrix<Scalar>::Identity(m, m);
    subtract_scaled_outer(x1, c);
    u_ = (c * Eigen::numext::conj(d1)) * x1;
    w_ = Vector<Scalar>::Zero(m);
  }

  // Folds one sample into (B, u). Costs 2 M^2 + 3 M + 1 multiplications
  // (lambda B, the scaled outer product, lambda u and the scaled input),
  // tallied separately from the shrinkage work because it is the dense
  // Theta(M^2) part of the estimator.
  void rank_one_update(const Vector<Scalar>& x, Scalar d) {
    if (x.size() != w_.size())
      throw std::invalid_argument("SparlsFilter: input length mismatch");
    const Index m = w_.size();
    const double c = params_.noise_ratio();
    b_ *= params_.lambda;
    if (params_.mode == RecursionMode::definition_consistent)
      b_.diagonal().array() += Scalar(1.0 - params_.lambda);
    subtract_scaled_outer(x, c);
    u_ *= params_.lambda;
    u_ += (c * Eigen::numext::conj(d)) * x;
    const auto mm = static_cast<std::uint64_t>(m);
    maintenance_.add(2 * mm * mm + 3 * mm + 1);
  }

  // Full per-sample step: statistics update, warm start s0 = B w restricted
  // to the current nonzero set (M * ||w||_0 multiplications), then the
  // shrinkage iterations.
  const Vector<Scalar>& step(const Vector<Scalar>& x, Scalar d) {
    rank_one_update(x, d);
    const SupportSet active = nonzero_support(w_);
    const Vector<Scalar> s0 = restricted_matvec(b_, gather(w_, active), active, counter_);
    LcemResult<Scalar> out = lcem(b_, u_, s0, params_.iterations, params_.threshold(), counter_);
    support_visits_ += out.support_visits;
    iterations_run_ += static_cast<std::uint64_t>(params_.iterations);
    w_ = std::move(out.estimate);
    return w_;
  }

  const Vector<Scalar>& estimate() const { return w_; }
  const Matrix<Scalar>& b() const { return b_; }
  const Vector<Scalar>& u() const { return u_; }
  const SparlsParams& params() const { return params_; }

  // Shrinkage-side multiplications (warm starts plus restricted products).
  std::uint64_t adaptive_multiplications() const { return counter_.count; }
  // Rank-one maintenance multiplications, kept out of the adaptive tally.
  std::uint64_t maintenance_multiplications() const { return maintenance_.count; }

  // Average active-set size and total shrinkage-side multiplications.
  // Requires at least one completed step.
  SupportStats support_stats() const {
    if (iterations_run_ == 0)
      throw std::logic_error("SparlsFilter: no shrinkage iterations have run yet");
    return {static_cast<double>(support_visits_) / static_cast<double>(iterations_run_),
            counter_.count};
  }

 private:
  // Subtracts c * x x^H from B so that the stored matrix stays exactly
  // Hermitian: each strictly-lower entry is mirrored by conjugation and the
  // diagonal decrement is real, so no rounding asymmetry can creep in.
  void subtract_scaled_outer(const Vector<Scalar>& x, double c) {
    const Index m = x.size();
    for (Index j = 0; j < m; ++j) {
      b_(j, j) -= Scalar(c * Eigen::numext::abs2(x[j]));
      for (Index i = j + 1; i < m; ++i) {
        Scalar t = x[i] * Eigen::numext::conj(x[j]);
        t *= c;
        b_(i, j) -= t;
        b_(j, i) = Eigen::numext::conj(b_(i, j));
      }
    }
  }

  SparlsParams params_;
  Matrix<Scalar> b_;
  Vector<Scalar> u_;
  Vector<Scalar> w_;
  MultCounter counter_;
  MultCounter maintenance_;
  std::uint64_t support_visits_ = 0;
  std::uint64_t iterations_run_ = 0;
};

}  // namespace sparls
