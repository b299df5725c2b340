#include "sparls/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sparls {
namespace {

constexpr int kOscillators = 64;

void append_number(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void ChannelSpec::validate() const {
  if (num_taps < 1) throw std::invalid_argument("ChannelSpec: num_taps must be >= 1");
  if (sparsity < 1 || sparsity > num_taps)
    throw std::invalid_argument("ChannelSpec: sparsity must lie in [1, num_taps]");
  if (!(fd >= 0.0)) throw std::invalid_argument("ChannelSpec: fd must be >= 0");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("ChannelSpec: sigma2 must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("ChannelSpec: n_samples must be >= 1");
}

SupportSet generate_support(Index num_taps, Index sparsity, std::mt19937_64& rng) {
  if (num_taps < 1 || sparsity < 1 || sparsity > num_taps)
    throw std::invalid_argument("generate_support: need 1 <= sparsity <= num_taps");
  SupportSet all(static_cast<std::size_t>(num_taps));
  std::iota(all.begin(), all.end(), Index{0});
  SupportSet picked;
  picked.reserve(static_cast<std::size_t>(sparsity));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), sparsity, rng);
  return picked;
}

Eigen::VectorXcd jakes_tap(double fd, Index n_samples, std::mt19937_64& rng) {
  if (!(fd >= 0.0)) throw std::invalid_argument("jakes_tap: fd must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("jakes_tap: n_samples must be >= 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;

  if (fd == 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double re = gauss(rng);
    const double im = gauss(rng);
    return Eigen::VectorXcd::Constant(n_samples, Complex(re, im) / std::sqrt(2.0));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rotation = unit(rng);
  double omega[kOscillators];
  double phi[kOscillators];
  double psi[kOscillators];
  for (int k = 0; k < kOscillators; ++k) {
    const double theta = two_pi * (k + rotation) / kOscillators;
    omega[k] = two_pi * fd * std::cos(theta);
    phi[k] = two_pi * unit(rng);
    psi[k] = two_pi * unit(rng);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(kOscillators));
  Eigen::VectorXcd tap(n_samples);
  for (Index t = 0; t < n_samples; ++t) {
    double re = 0.0;
    double im = 0.0;
    for (int k = 0; k < kOscillators; ++k) {
      const double arg = omega[k] * static_cast<double>(t);
      re += std::cos(arg + phi[k]);
      im += std::cos(arg + psi[k]);
    }
    tap[t] = Complex(re * scale, im * scale);
  }
  return tap;
}

ChannelTrace generate_trace(const ChannelSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  ChannelTrace trace;
  trace.support = generate_support(spec.num_taps, spec.sparsity, rng);
  trace.taps = Eigen::MatrixXcd::Zero(spec.num_taps, spec.n_samples);
  for (const Index j : trace.support)
    trace.taps.row(j) = jakes_tap(spec.fd, spec.n_samples, rng).transpose();

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double input_scale = 1.0 / std::sqrt(static_cast<double>(spec.num_taps));
  trace.input.resize(spec.n_samples);
  for (Index i = 0; i < spec.n_samples; ++i) trace.input[i] = gauss(rng) * input_scale;

  const double noise_scale = std::sqrt(spec.sigma2 / 2.0);
  trace.desired.resize(spec.n_samples);
  for (Index i = 0; i < spec.n_samples; ++i) {
    Complex y(0.0, 0.0);
    for (const Index j : trace.support) {
      const Index k = i - j;
      if (k >= 0) y += std::conj(trace.taps(j, i)) * trace.input[k];
    }
    const Complex eta(gauss(rng) * noise_scale, gauss(rng) * noise_scale);
    trace.desired[i] = y + eta;
  }
  return trace;
}

Eigen::VectorXd input_window(const ChannelTrace& trace, Index i) {
  if (i < 0 || i >= trace.n_samples())
    throw std::out_of_range("input_window: sample index out of range");
  Eigen::VectorXd win = Eigen::VectorXd::Zero(trace.num_taps());
  for (Index m = 0; m < trace.num_taps() && m <= i; ++m) win[m] = trace.input[i - m];
  return win;
}

void write_trace_csv(const ChannelTrace& trace, std::ostream& os) {
  std::string line = "i,x,d_re,d_im";
  for (Index j = 0; j < trace.num_taps(); ++j) {
    line += ",w" + std::to_string(j) + "_re";
    line += ",w" + std::to_string(j) + "_im";
  }
  os << line << '\n';
  for (Index i = 0; i < trace.n_samples(); ++i) {
    line = std::to_string(i);
    line += ',';
    append_number(line, trace.input[i]);
    line += ',';
    append_number(line, trace.desired[i].real());
    line += ',';
    append_number(line, trace.desired[i].imag());
    for (Index j = 0; j < trace.num_taps(); ++j) {
      line += ',';
      append_number(line, trace.taps(j, i).real());
      line += ',';
      append_number(line, trace.taps(j, i).imag());
    }
    os << line << '\n';
  }
}

void write_trace_csv(const ChannelTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trace_csv: cannot open " + path);
  write_trace_csv(trace, os);
  os.flush();
  if (!os) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

}  // namespace sparls
