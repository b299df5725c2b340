#pragma once

// Sparse time-varying multipath channel generator used by the experiment
// harness and the test fixtures. A trace holds the true tap trajectories,
// the excitation sequence and the noisy observations, all reproducible from
// a single seed.

#include "sparls/core_ops.hpp"

#include <iosfwd>
#include <random>
#include <string>

namespace sparls {

struct ChannelSpec {
  Index num_taps = 100;   // M, filter length
  Index sparsity = 5;     // L, number of active taps
  double fd = 0.0;        // Doppler rate normalized by the sample period
  double sigma2 = 0.0;    // observation noise variance
  Index n_samples = 0;    // trace length
  std::uint64_t seed = 0;

  void validate() const;
};

struct ChannelTrace {
  SupportSet support;      // active tap indices, ascending
  Eigen::MatrixXcd taps;   // num_taps x n_samples, column i is the true w(i)
  Eigen::VectorXd input;   // x(i)
  Eigen::VectorXcd desired;  // d(i) = w(i)^H [x(i) ... x(i-M+1)]^T + noise

  Index num_taps() const { return taps.rows(); }
  Index n_samples() const { return taps.cols(); }
};

// Draws `sparsity` distinct tap positions uniformly from [0, num_taps),
// returned ascending.
SupportSet generate_support(Index num_taps, Index sparsity, std::mt19937_64& rng);

// One unit-power Rayleigh-fading tap trajectory with the classical
// U-shaped Doppler spectrum: its autocorrelation at lag n approaches
// J0(2*pi*fd*n). Synthesized as a randomly rotated equispaced bank of
// sinusoids with independent phases on the real and imaginary parts.
// fd == 0 degenerates to a single complex Gaussian draw held constant.
Eigen::VectorXcd jakes_tap(double fd, Index n_samples, std::mt19937_64& rng);

// Full trace: support, per-tap fading, excitation x(i) ~ N(0, 1/M) and
// observations with circular complex Gaussian noise of total variance
// sigma2. Samples before the trace start are taken as zero.
ChannelTrace generate_trace(const ChannelSpec& spec);

// Tap-delay-line input window [x(i), x(i-1), ..., x(i-M+1)].
Eigen::VectorXd input_window(const ChannelTrace& trace, Index i);

// CSV with one row per sample: index, input, observation (re, im) and each
// tap (re, im). Full double precision.
void write_trace_csv(const ChannelTrace& trace, std::ostream& os);
void write_trace_csv(const ChannelTrace& trace, const std::string& path);

}  // namespace sparls
