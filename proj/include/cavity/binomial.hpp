#pragma once

// Closed-form pump-free (epsilon = 0) dynamics of |N,0⟩ under hopping.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cavity/model.hpp"

namespace cavity {

/// Amplitudes of the evolved two-mode binomial state. Entry n is the
/// amplitude of |N-n, n⟩ (a-mode photon count first).
struct BinomialStateAmplitudes {
  int n_total = 0;
  std::vector<std::complex<double>> amplitudes;

  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return s;
  }
};

/// Diagonal of the reduced a-mode density matrix: p[n] weights |N-n⟩⟨N-n|.
struct ReducedSpectrum {
  std::vector<double> probabilities;
};

struct PhotonNumbers {
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

// C(n, k) by multiplicative recurrence; exact for the ranges used here and
// finite for n up to ~1000.
inline double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int j = 1; j <= k; ++j) {
    c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return c;
}

// cos^{N-n} sin^n, with 0^0 = 1.
inline double mixing_weight(double c, double s, int n_total, int n) {
  return std::pow(c, n_total - n) * std::pow(s, n);
}

}  // namespace detail

inline BinomialStateAmplitudes binomial_state(const ModelParams& params, double t) {
  const int n_total = params.n_initial;
  const double c = std::cos(params.lambda * t);
  const double s = std::sin(params.lambda * t);
  const std::complex<double> phase =
      std::polar(1.0, -static_cast<double>(n_total) * params.omega * t);

  BinomialStateAmplitudes state{n_total, {}};
  state.amplitudes.reserve(static_cast<std::size_t>(n_total) + 1);
  for (int n = 0; n <= n_total; ++n) {
    const double weight = std::sqrt(detail::binomial_coefficient(n_total, n)) *
                          detail::mixing_weight(c, s, n_total, n);
    state.amplitudes.push_back(phase * weight);
  }
  return state;
}

inline PhotonNumbers photon_numbers(const ModelParams& params, double t) {
  const double n = params.n_initial;
  const double c2 = std::pow(std::cos(params.lambda * t), 2);
  return {n * c2, n - n * c2};
}

inline double covariance_measure_closed(int n_total, double lambda, double t) {
  const double n = n_total;
  const double c2 = std::pow(std::cos(lambda * t), 2);
  const double s2 = std::pow(std::sin(lambda * t), 2);
  const double numerator = n * std::abs(std::sin(2.0 * lambda * t));
  return numerator / (2.0 * std::sqrt(2.0 * (n * c2 + 0.5) * (n * s2 + 0.5)));
}

/// Covariance measure evaluated from the amplitudes themselves: moments are
/// accumulated by applying ladder operators to each |N-n, n⟩ component.
inline double covariance_measure_from_state(const BinomialStateAmplitudes& state) {
  if (std::abs(state.norm_squared() - 1.0) > 1e-10) {
    throw Error("covariance_measure_from_state: state is not normalized");
  }
  const int n_total = state.n_total;
  const auto& c = state.amplitudes;

  // The state lives in the fixed-total-number subspace, so every operator that
  // changes the total photon count (a, b, ab) has zero expectation.
  const std::complex<double> mean_a{0.0, 0.0};
  const std::complex<double> mean_b{0.0, 0.0};
  const std::complex<double> mean_ab{0.0, 0.0};

  // a b† |N-n, n⟩ = sqrt((N-n)(n+1)) |N-n-1, n+1⟩
  std::complex<double> mean_ab_dagger{0.0, 0.0};
  double mean_na = 0.0;
  double mean_nb = 0.0;
  for (int n = 0; n <= n_total; ++n) {
    const double p = std::norm(c[n]);
    mean_na += (n_total - n) * p;
    mean_nb += n * p;
    if (n < n_total) {
      mean_ab_dagger += std::conj(c[n + 1]) * c[n] *
                        std::sqrt(static_cast<double>(n_total - n) * (n + 1));
    }
  }

  const auto cov_ab = mean_ab - mean_a * mean_b;
  const auto cov_ab_dagger = mean_ab_dagger - mean_a * std::conj(mean_b);
  const double cov_na = mean_na - std::norm(mean_a);
  const double cov_nb = mean_nb - std::norm(mean_b);
  return std::sqrt((std::norm(cov_ab_dagger) + std::norm(cov_ab)) /
                   (2.0 * (cov_na + 0.5) * (cov_nb + 0.5)));
}

inline ReducedSpectrum reduced_spectrum(const ModelParams& params, double t) {
  const int n_total = params.n_initial;
  const double c2 = std::pow(std::cos(params.lambda * t), 2);
  const double s2 = std::pow(std::sin(params.lambda * t), 2);
  ReducedSpectrum spectrum;
  spectrum.probabilities.reserve(static_cast<std::size_t>(n_total) + 1);
  for (int n = 0; n <= n_total; ++n) {
    spectrum.probabilities.push_back(detail::binomial_coefficient(n_total, n) *
                                     detail::mixing_weight(c2, s2, n_total, n));
  }
  return spectrum;
}

/// Von Neumann entropy in bits, 0 log 0 := 0.
inline double entropy(const ReducedSpectrum& spectrum) {
  double s = 0.0;
  for (double p : spectrum.probabilities) {
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace cavity
