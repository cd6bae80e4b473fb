#pragma once

// Pump-amplitude noise: epsilon is redrawn from a Gaussian on each of
// n_segments equal time slices and held constant within a slice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cavity/heisenberg.hpp"
#include "cavity/model.hpp"

namespace cavity {

/// How the noise width relates to the mean amplitude.
///   StandardDeviation: sigma = mean / 10
///   Variance:          sigma² = mean / 10
enum class SpreadConvention { StandardDeviation, Variance };

inline double noise_sigma(double mean, SpreadConvention convention) {
  return convention == SpreadConvention::Variance ? std::sqrt(mean / 10.0) : mean / 10.0;
}

struct FluctuationSchedule {
  double mean_epsilon = 0.0;
  int n_segments = 100;
  double total_scaled_time = 5.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  SpreadConvention convention = SpreadConvention::StandardDeviation;
};

inline FluctuationSchedule sample_schedule(
    double mean, int n_segments, double total_scaled_time, std::uint64_t seed,
    SpreadConvention convention = SpreadConvention::StandardDeviation) {
  if (!(mean >= 0.0)) throw Error("sample_schedule: mean must be >= 0");
  if (n_segments < 1) throw Error("sample_schedule: need at least one segment");

  FluctuationSchedule s{mean, n_segments, total_scaled_time, {}, seed, convention};
  s.values.reserve(static_cast<std::size_t>(n_segments));
  const double sigma = noise_sigma(mean, convention);
  if (sigma == 0.0) {
    s.values.assign(static_cast<std::size_t>(n_segments), mean);
    return s;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gaussian(mean, sigma);
  for (int k = 0; k < n_segments; ++k) s.values.push_back(gaussian(rng));
  return s;
}

/// Y sampled on the output grid of one piecewise-constant run.
struct YSeries {
  std::vector<double> scaled_time;
  std::vector<double> y;
  Matrix4c final_propagator;
};

/// Samples per segment >= 1; the grid always includes every segment boundary.
inline YSeries propagate_piecewise(const ModelParams& params, const FluctuationSchedule& schedule,
                                   int samples_per_segment = 1) {
  require_valid(params);
  if (samples_per_segment < 1) throw Error("propagate_piecewise: samples_per_segment < 1");

  const double t_total = to_physical_time(ScaledTime{schedule.total_scaled_time}, params);
  const double dt = t_total / schedule.n_segments;
  const double ds = schedule.total_scaled_time / schedule.n_segments;

  YSeries out;
  const std::size_t n_out =
      static_cast<std::size_t>(schedule.n_segments) * samples_per_segment + 1;
  out.scaled_time.reserve(n_out);
  out.y.reserve(n_out);

  Matrix4c cumulative = Matrix4c::Identity();
  out.scaled_time.push_back(0.0);
  out.y.push_back(covariance_measure(moments_from_propagator(cumulative, params.n_initial)));

  for (int k = 0; k < schedule.n_segments; ++k) {
    ModelParams segment = params;
    segment.epsilon = schedule.values[static_cast<std::size_t>(k)];
    const CayleyHamiltonPropagator slice(segment);
    for (int j = 1; j <= samples_per_segment; ++j) {
      const double frac = static_cast<double>(j) / samples_per_segment;
      const Matrix4c s = slice.at(frac * dt).matrix * cumulative;
      const double y = covariance_measure(moments_from_propagator(s, params.n_initial));
      if (!std::isfinite(y)) {
        throw NumericalError("propagate_piecewise: moments overflowed in segment " +
                             std::to_string(k) + " (epsilon " +
                             std::to_string(segment.epsilon) + ")");
      }
      out.scaled_time.push_back((k + frac) * ds);
      out.y.push_back(y);
      if (j == samples_per_segment) cumulative = s;
    }
  }
  out.final_propagator = cumulative;
  return out;
}

struct EnsembleOptions {
  int n_segments = 100;
  double total_scaled_time = 5.0;
  int samples_per_segment = 1;
  SpreadConvention convention = SpreadConvention::StandardDeviation;
};

struct EnsembleResult {
  std::vector<double> scaled_time;
  std::vector<std::vector<double>> trials;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
  std::vector<double> cv;      // stddev / mean, 0 where the mean is 0
};

/// Per-trial seed derived from the master seed and trial index.
inline std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline void compute_statistics(EnsembleResult& r) {
  const std::size_t n_times = r.scaled_time.size();
  const double n = static_cast<double>(r.trials.size());
  r.mean.assign(n_times, 0.0);
  r.stddev.assign(n_times, 0.0);
  r.cv.assign(n_times, 0.0);
  for (std::size_t i = 0; i < n_times; ++i) {
    double sum = 0.0;
    for (const auto& trial : r.trials) sum += trial[i];
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& trial : r.trials) sq += (trial[i] - mean) * (trial[i] - mean);
    r.mean[i] = mean;
    r.stddev[i] = std::sqrt(sq / n);
    r.cv[i] = mean > 0.0 ? r.stddev[i] / mean : 0.0;
  }
}

inline EnsembleResult run_ensemble(const ModelParams& params, double mean_epsilon, int n_trials,
                                   std::uint64_t master_seed, const EnsembleOptions& opts = {}) {
  if (n_trials < 1) throw Error("run_ensemble: n_trials must be >= 1");
  EnsembleResult r;
  r.trials.reserve(static_cast<std::size_t>(n_trials));
  for (int k = 0; k < n_trials; ++k) {
    const auto schedule = sample_schedule(mean_epsilon, opts.n_segments, opts.total_scaled_time,
                                          trial_seed(master_seed, k), opts.convention);
    auto series = propagate_piecewise(params, schedule, opts.samples_per_segment);
    if (k == 0) r.scaled_time = std::move(series.scaled_time);
    r.trials.push_back(std::move(series.y));
  }
  compute_statistics(r);
  return r;
}

struct SpreadSummary {
  double max_std = 0.0;
  double max_cv = 0.0;
};

/// CV is only taken where the ensemble mean is at least cv_floor times its
/// peak; Y passes through zero periodically and the ratio is meaningless
/// there.
inline constexpr double kDefaultCvFloor = 0.1;

inline SpreadSummary spread_statistics(const EnsembleResult& r,
                                       double cv_floor = kDefaultCvFloor) {
  if (r.trials.size() < 2) throw Error("spread_statistics: need at least two trials");
  SpreadSummary s;
  const double peak_mean = *std::max_element(r.mean.begin(), r.mean.end());
  for (std::size_t i = 0; i < r.mean.size(); ++i) {
    s.max_std = std::max(s.max_std, r.stddev[i]);
    if (peak_mean > 0.0 && r.mean[i] >= cv_floor * peak_mean) {
      s.max_cv = std::max(s.max_cv, r.cv[i]);
    }
  }
  return s;
}

}  // namespace cavity
