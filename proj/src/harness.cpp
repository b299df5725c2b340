#include "sparls/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace sparls {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// (lambda, gamma) defaults measured over a grid of noise variances and
// Doppler rates (rows: sigma2, columns: fd).
constexpr std::array<double, 6> kSigma2Grid = {0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05};
constexpr std::array<double, 6> kFdGrid = {0.0, 0.0001, 0.0005, 0.001, 0.005, 0.01};

constexpr double kLambdaTable[6][6] = {
    {0.98, 0.95, 0.95, 0.99, 0.99, 0.99},
    {0.99, 0.97, 0.98, 0.99, 0.99, 0.99},
    {0.99, 0.97, 0.98, 0.99, 0.99, 0.99},
    {0.99, 0.99, 0.99, 0.99, 0.99, 0.99},
    {0.99, 0.99, 0.99, 0.99, 0.99, 0.99},
    {0.99, 0.99, 0.99, 0.99, 0.99, 0.99},
};

constexpr double kGammaTable[6][6] = {
    {100.0, 100.0, 100.0, 100.0, 100.0, 100.0},
    {45.0, 40.0, 40.0, 60.0, 50.0, 50.0},
    {30.0, 25.0, 30.0, 25.0, 25.0, 25.0},
    {15.0, 15.0, 10.0, 10.0, 10.0, 10.0},
    {10.0, 10.0, 5.0, 5.0, 5.0, 5.0},
    {5.0, 5.0, 3.0, 2.0, 2.0, 2.0},
};

std::size_t nearest_index(double value, const std::array<double, 6>& grid, const char* what) {
  if (value < grid.front() || value > grid.back()) {
    std::cerr << "warning: " << what << " = " << value << " lies outside the tabulated range ["
              << grid.front() << ", " << grid.back() << "]; clamping to the nearest entry\n";
  }
  std::size_t best = 0;
  double best_dist = std::abs(value - grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dist = std::abs(value - grid[i]);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_or_blank(double v) { return std::isnan(v) ? std::string() : fmt(v); }

bool wants(const ExperimentConfig& config, Algorithm a) {
  return std::find(config.algorithms.begin(), config.algorithms.end(), a) !=
         config.algorithms.end();
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  nlohmann::json algs = nlohmann::json::array();
  for (const Algorithm a : c.algorithms) algs.push_back(to_string(a));
  j["algorithms"] = algs;
  j["m"] = c.num_taps;
  j["l"] = c.sparsity;
  j["snr_db"] = c.snr_db;
  j["fd"] = c.fd;
  j["samples"] = c.n_samples;
  j["trials"] = c.trials;
  j["k"] = c.iterations;
  j["measure_window"] = c.measure_window;
  j["gamma"] = c.gamma ? nlohmann::json(*c.gamma) : nlohmann::json(nullptr);
  j["lambda"] = c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json(nullptr);
  j["recursion_mode"] = to_string(c.mode);
  j["rls_delta"] = c.rls_delta;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sparls: return "sparls";
    case Algorithm::rls: return "rls";
  }
  throw std::invalid_argument("to_string: unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "sparls") return Algorithm::sparls;
  if (s == "rls") return Algorithm::rls;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected sparls or rls)");
}

const char* to_string(RecursionMode m) {
  switch (m) {
    case RecursionMode::paper_literal: return "paper_literal";
    case RecursionMode::definition_consistent: return "definition_consistent";
  }
  throw std::invalid_argument("to_string: unknown recursion mode");
}

RecursionMode recursion_mode_from_string(const std::string& s) {
  if (s == "paper_literal") return RecursionMode::paper_literal;
  if (s == "definition_consistent") return RecursionMode::definition_consistent;
  throw std::invalid_argument("unknown recursion mode '" + s +
                              "' (expected paper_literal or definition_consistent)");
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw std::invalid_argument("config: algorithms must be non-empty");
  for (std::size_t i = 0; i < algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < algorithms.size(); ++j)
      if (algorithms[i] == algorithms[j])
        throw std::invalid_argument("config: duplicate algorithm entry");
  if (num_taps < 1) throw std::invalid_argument("config: m must be >= 1");
  if (sparsity < 1 || sparsity > num_taps)
    throw std::invalid_argument("config: l must lie in [1, m]");
  if (snr_db.empty()) throw std::invalid_argument("config: snr_db list must be non-empty");
  if (fd.empty()) throw std::invalid_argument("config: fd list must be non-empty");
  for (const double f : fd)
    if (!(f >= 0.0)) throw std::invalid_argument("config: fd values must be >= 0");
  if (n_samples < 2) throw std::invalid_argument("config: samples must be >= 2");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (iterations < 1) throw std::invalid_argument("config: k must be >= 1");
  if (!(measure_window > 0.0) || measure_window > 1.0)
    throw std::invalid_argument("config: measure_window must lie in (0, 1]");
  if (gamma && *gamma < 0.0) throw std::invalid_argument("config: gamma must be >= 0");
  if (lambda && (!(*lambda > 0.0) || *lambda > 1.0))
    throw std::invalid_argument("config: lambda must lie in (0, 1]");
  if (!(rls_delta > 0.0)) throw std::invalid_argument("config: rls_delta must be > 0");
}

std::pair<double, double> default_params(double sigma2, double fd) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("default_params: sigma2 must be > 0");
  if (!(fd >= 0.0)) throw std::invalid_argument("default_params: fd must be >= 0");
  const std::size_t si = nearest_index(sigma2, kSigma2Grid, "noise variance");
  const std::size_t fi = nearest_index(fd, kFdGrid, "Doppler rate");
  return {kLambdaTable[si][fi], kGammaTable[si][fi]};
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial_index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ResolvedPoint resolve_point(const ExperimentConfig& config, double snr_db, double fd) {
  ResolvedPoint p;
  p.snr_db = snr_db;
  p.fd = fd;
  const double snr_linear = std::pow(10.0, snr_db / 10.0);
  p.sigma2 = static_cast<double>(config.sparsity) / snr_linear;
  double lam = 0.0;
  double gam = 0.0;
  if (!config.lambda || !config.gamma) std::tie(lam, gam) = default_params(p.sigma2, fd);
  p.lambda = config.lambda ? *config.lambda : lam;
  p.gamma = config.gamma ? *config.gamma : gam;
  p.alpha = std::sqrt(p.sigma2) / 2.0;
  return p;
}

TrialResult run_trial(const ExperimentConfig& config, const ResolvedPoint& point,
                      int trial_index) {
  try {
    ChannelSpec cs;
    cs.num_taps = config.num_taps;
    cs.sparsity = config.sparsity;
    cs.fd = point.fd;
    cs.sigma2 = point.sigma2;
    cs.n_samples = config.n_samples;
    cs.seed = trial_seed(config.seed, trial_index);
    const ChannelTrace trace = generate_trace(cs);

    const Index n = config.n_samples;
    const Index window =
        std::max<Index>(1, static_cast<Index>(std::llround(config.measure_window *
                                                           static_cast<double>(n))));
    const Index start = n - window;

    double denom = 0.0;
    for (Index i = start; i < n; ++i) denom += trace.taps.col(i).squaredNorm();
    if (denom == 0.0)
      throw std::runtime_error("channel energy is zero over the measurement window");

    TrialResult out;
    out.sparls_mse = kNan;
    out.rls_mse = kNan;
    out.n_stat = kNan;

    if (wants(config, Algorithm::rls)) {
      RlsFilter<Complex> rls(config.num_taps, point.lambda, config.rls_delta);
      double err = 0.0;
      for (Index i = 0; i < n; ++i) {
        const Eigen::VectorXcd xw = input_window(trace, i).cast<Complex>();
        rls.update(xw, trace.desired[i]);
        if (i >= start) err += (rls.estimate() - trace.taps.col(i)).squaredNorm();
      }
      out.rls_mse = err / denom;
      out.rls_mults = rls.multiplications();
    }

    if (wants(config, Algorithm::sparls)) {
      SparlsParams sp;
      sp.gamma = point.gamma;
      sp.alpha = point.alpha;
      sp.sigma2 = point.sigma2;
      sp.lambda = point.lambda;
      sp.iterations = config.iterations;
      sp.mode = config.mode;
      SparlsFilter<Complex> filt(input_window(trace, 0).cast<Complex>(), trace.desired[0], sp);
      double err = 0.0;
      if (start == 0) err += trace.taps.col(0).squaredNorm();
      for (Index i = 1; i < n; ++i) {
        const Eigen::VectorXcd xw = input_window(trace, i).cast<Complex>();
        filt.step(xw, trace.desired[i]);
        if (i >= start) err += (filt.estimate() - trace.taps.col(i)).squaredNorm();
      }
      out.sparls_mse = err / denom;
      out.sparls_adaptive = filt.adaptive_multiplications();
      out.sparls_maintenance = filt.maintenance_multiplications();
      out.n_stat = filt.support_stats().average_support;
    }
    return out;
  } catch (const std::exception& e) {
    throw std::runtime_error("trial " + std::to_string(trial_index) + ": " + e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (wants(config, Algorithm::sparls)) {
    for (const double snr : config.snr_db) {
      const ResolvedPoint p = resolve_point(config, snr, config.fd.front());
      SparlsParams sp;
      sp.gamma = p.gamma;
      sp.alpha = p.alpha;
      sp.sigma2 = p.sigma2;
      sp.lambda = p.lambda;
      if (!sp.step_size_safe_for(1.0))
        std::cerr << "warning: shrinkage step size alpha exceeds the advisable bound at "
                  << snr << " dB; convergence may degrade\n";
    }
  }

  ExperimentResult result;
  result.config = config;
  for (const double snr : config.snr_db) {
    for (const double fd : config.fd) {
      const ResolvedPoint point = resolve_point(config, snr, fd);
      std::vector<TrialResult> trials(static_cast<std::size_t>(config.trials));
      for (int t = 0; t < config.trials; ++t) trials[static_cast<std::size_t>(t)] =
          run_trial(config, point, t);

      const double total_samples =
          static_cast<double>(config.trials) * static_cast<double>(config.n_samples);
      PointResult pr;
      pr.point = point;

      std::uint64_t sparls_total = 0;
      std::uint64_t rls_total = 0;
      for (const Algorithm a : config.algorithms) {
        AlgorithmStats st;
        st.algorithm = a;
        double mean = 0.0;
        for (const TrialResult& t : trials)
          mean += (a == Algorithm::sparls) ? t.sparls_mse : t.rls_mse;
        mean /= static_cast<double>(config.trials);
        double var = 0.0;
        if (config.trials > 1) {
          for (const TrialResult& t : trials) {
            const double v = ((a == Algorithm::sparls) ? t.sparls_mse : t.rls_mse) - mean;
            var += v * v;
          }
          var /= static_cast<double>(config.trials - 1);
        }
        st.mse = mean;
        st.mse_db = 10.0 * std::log10(mean);
        st.ci_halfwidth = 1.96 * std::sqrt(var / static_cast<double>(config.trials));
        if (a == Algorithm::sparls) {
          std::uint64_t adaptive = 0;
          std::uint64_t maintenance = 0;
          double nsum = 0.0;
          for (const TrialResult& t : trials) {
            adaptive += t.sparls_adaptive;
            maintenance += t.sparls_maintenance;
            nsum += t.n_stat;
          }
          sparls_total = adaptive;
          st.total_mults = adaptive;
          st.mults_per_sample = static_cast<double>(adaptive) / total_samples;
          st.maintenance_per_sample = static_cast<double>(maintenance) / total_samples;
          st.n_stat = nsum / static_cast<double>(config.trials);
        } else {
          std::uint64_t total = 0;
          for (const TrialResult& t : trials) total += t.rls_mults;
          rls_total = total;
          st.total_mults = total;
          st.mults_per_sample = static_cast<double>(total) / total_samples;
          st.n_stat = kNan;
        }
        pr.stats.push_back(st);
      }
      pr.ccr = (wants(config, Algorithm::sparls) && wants(config, Algorithm::rls))
                   ? static_cast<double>(sparls_total) / static_cast<double>(rls_total)
                   : kNan;
      result.points.push_back(std::move(pr));
    }
  }
  return result;
}

std::string manifest_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".manifest.json";
  return csv_path + ".manifest.json";
}

void emit_results(const ExperimentResult& result, const std::string& csv_path) {
  std::ofstream os(csv_path);
  if (!os) throw std::runtime_error("emit_results: cannot open " + csv_path);
  os << "snr_db,fd,algorithm,mse,mse_db,ccr,n_stat,mults_per_sample,ci_halfwidth,seed\n";
  for (const PointResult& pr : result.points) {
    for (const AlgorithmStats& st : pr.stats) {
      os << fmt(pr.point.snr_db) << ',' << fmt(pr.point.fd) << ',' << to_string(st.algorithm)
         << ',' << fmt(st.mse) << ',' << fmt(st.mse_db) << ',' << fmt_or_blank(pr.ccr) << ','
         << fmt_or_blank(st.n_stat) << ',' << fmt(st.mults_per_sample) << ','
         << fmt(st.ci_halfwidth) << ',' << result.config.seed << '\n';
    }
  }
  os.flush();
  if (!os) throw std::runtime_error("emit_results: write failed for " + csv_path);

  nlohmann::json manifest;
  manifest["config"] = config_json(result.config);
  nlohmann::json points = nlohmann::json::array();
  for (const PointResult& pr : result.points) {
    nlohmann::json p;
    p["snr_db"] = pr.point.snr_db;
    p["fd"] = pr.point.fd;
    p["sigma2"] = pr.point.sigma2;
    p["lambda"] = pr.point.lambda;
    p["gamma"] = pr.point.gamma;
    p["alpha"] = pr.point.alpha;
    p["ccr"] = pr.ccr;
    nlohmann::json algs = nlohmann::json::array();
    for (const AlgorithmStats& st : pr.stats) {
      nlohmann::json a;
      a["name"] = to_string(st.algorithm);
      a["mse"] = st.mse;
      a["mse_db"] = st.mse_db;
      a["ci_halfwidth"] = st.ci_halfwidth;
      a["total_mults"] = st.total_mults;
      a["mults_per_sample"] = st.mults_per_sample;
      if (st.algorithm == Algorithm::sparls) {
        a["n_stat"] = st.n_stat;
        a["maintenance_mults_per_sample"] = st.maintenance_per_sample;
      }
      algs.push_back(a);
    }
    p["algorithms"] = algs;
    points.push_back(p);
  }
  manifest["points"] = points;

  const std::string mpath = manifest_path_for(csv_path);
  std::ofstream ms(mpath);
  if (!ms) throw std::runtime_error("emit_results: cannot open " + mpath);
  ms << manifest.dump(2) << '\n';
  ms.flush();
  if (!ms) throw std::runtime_error("emit_results: write failed for " + mpath);
}

ExperimentConfig config_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "algorithms") {
      c.algorithms.clear();
      for (const auto& s : value) c.algorithms.push_back(algorithm_from_string(s.get<std::string>()));
    } else if (key == "m") {
      c.num_taps = value.get<Index>();
    } else if (key == "l") {
      c.sparsity = value.get<Index>();
    } else if (key == "snr_db") {
      c.snr_db = value.get<std::vector<double>>();
    } else if (key == "fd") {
      c.fd = value.get<std::vector<double>>();
    } else if (key == "samples") {
      c.n_samples = value.get<Index>();
    } else if (key == "trials") {
      c.trials = value.get<int>();
    } else if (key == "k") {
      c.iterations = value.get<int>();
    } else if (key == "measure_window") {
      c.measure_window = value.get<double>();
    } else if (key == "gamma") {
      if (!value.is_null()) c.gamma = value.get<double>();
    } else if (key == "lambda") {
      if (!value.is_null()) c.lambda = value.get<double>();
    } else if (key == "recursion_mode") {
      c.mode = recursion_mode_from_string(value.get<std::string>());
    } else if (key == "rls_delta") {
      c.rls_delta = value.get<double>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return c;
}

std::string config_to_json_text(const ExperimentConfig& config) {
  return config_json(config).dump(2);
}

}  // namespace sparls
