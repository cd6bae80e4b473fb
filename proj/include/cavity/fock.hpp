#pragma once

// Brute-force Schrödinger evolution of the full two-mode Hamiltonian in a
// truncated Fock basis. This is the reference every closed form and the
// Heisenberg transport are checked against.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavity/heisenberg.hpp"
#include "cavity/model.hpp"

namespace cavity {

struct TruncatedBasis {
  int cutoff_a = 0;
  int cutoff_b = 0;

  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(cutoff_a + 1) * (cutoff_b + 1);
  }
  bool contains(int n_a, int n_b) const {
    return n_a >= 0 && n_b >= 0 && n_a <= cutoff_a && n_b <= cutoff_b;
  }
  Eigen::Index index(int n_a, int n_b) const {
    return static_cast<Eigen::Index>(n_a) * (cutoff_b + 1) + n_b;
  }
  std::pair<int, int> modes(Eigen::Index i) const {
    return {static_cast<int>(i / (cutoff_b + 1)), static_cast<int>(i % (cutoff_b + 1))};
  }
};

struct FockStateVector {
  Eigen::VectorXcd amplitudes;

  Complex at(const TruncatedBasis& basis, int n_a, int n_b) const {
    return basis.contains(n_a, n_b) ? amplitudes(basis.index(n_a, n_b)) : Complex{};
  }
};

inline FockStateVector product_state(const TruncatedBasis& basis, int n_a, int n_b) {
  if (!basis.contains(n_a, n_b)) {
    throw Error("product_state: |" + std::to_string(n_a) + "," + std::to_string(n_b) +
                "> lies outside the truncated basis");
  }
  FockStateVector s{Eigen::VectorXcd::Zero(basis.dimension())};
  s.amplitudes(basis.index(n_a, n_b)) = 1.0;
  return s;
}

/// Truncated H. With real omega, lambda, epsilon and drive the matrix is real
/// symmetric, which is the Hermitian case here.
struct FockHamiltonian {
  using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  ModelParams params;
  TruncatedBasis basis;
  double linear_drive = 0.0;
  SparseMatrix matrix;
};

/// ω(a†a + b†b) + λ(a†b + ab†) + ε(a†² + a²) + f(a† + a).
inline FockHamiltonian build_hamiltonian(const ModelParams& params, const TruncatedBasis& basis,
                                         double linear_drive = 0.0) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(basis.dimension()) * 7);
  auto couple = [&](Eigen::Index from, int to_a, int to_b, double element) {
    if (element == 0.0 || !basis.contains(to_a, to_b)) return;
    const Eigen::Index to = basis.index(to_a, to_b);
    entries.emplace_back(to, from, element);
    entries.emplace_back(from, to, element);
  };
  for (int na = 0; na <= basis.cutoff_a; ++na) {
    for (int nb = 0; nb <= basis.cutoff_b; ++nb) {
      const Eigen::Index i = basis.index(na, nb);
      entries.emplace_back(i, i, params.omega * (na + nb));
      // Raising terms only; couple() adds the Hermitian partner.
      couple(i, na + 1, nb - 1, params.lambda * std::sqrt((na + 1.0) * nb));
      couple(i, na + 2, nb, params.epsilon * std::sqrt((na + 1.0) * (na + 2.0)));
      couple(i, na + 1, nb, linear_drive * std::sqrt(na + 1.0));
    }
  }
  FockHamiltonian h{params, basis, linear_drive, {}};
  h.matrix.resize(basis.dimension(), basis.dimension());
  h.matrix.setFromTriplets(entries.begin(), entries.end());
  return h;
}

/// Norm of the part of H_full |ψ⟩ that lands outside the truncated basis.
/// Zero means the truncation is exact for the instantaneous dynamics.
inline double leakage(const FockStateVector& state, const FockHamiltonian& h) {
  const auto& basis = h.basis;
  const auto& p = h.params;
  std::map<std::pair<int, int>, Complex> outside;
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) {
    const Complex c = state.amplitudes(i);
    if (c == Complex{}) continue;
    const auto [na, nb] = basis.modes(i);
    auto emit = [&](int ta, int tb, double element) {
      if (element != 0.0 && !basis.contains(ta, tb)) outside[{ta, tb}] += element * c;
    };
    emit(na + 1, nb - 1, p.lambda * std::sqrt((na + 1.0) * nb));
    emit(na - 1, nb + 1, p.lambda * std::sqrt(na * (nb + 1.0)));
    emit(na + 2, nb, p.epsilon * std::sqrt((na + 1.0) * (na + 2.0)));
    emit(na + 1, nb, h.linear_drive * std::sqrt(na + 1.0));
  }
  double sum = 0.0;
  for (const auto& [_, amp] : outside) sum += std::norm(amp);
  return std::sqrt(sum);
}

/// Dense spectral decomposition of a truncated H, reused for every
/// evolution time. Cubic in the dimension; meant for small bases.
class SpectralEvolver {
 public:
  explicit SpectralEvolver(const FockHamiltonian& h) : solver_(Eigen::MatrixXd(h.matrix)) {
    if (solver_.info() != Eigen::Success) {
      throw NumericalError("SpectralEvolver: eigendecomposition failed");
    }
  }

  FockStateVector evolve(const FockStateVector& state, double t) const {
    const auto& vectors = solver_.eigenvectors();
    const Eigen::VectorXcd coeffs = vectors.transpose().cast<Complex>() * state.amplitudes;
    Eigen::VectorXcd phased(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      phased(k) = std::polar(1.0, -solver_.eigenvalues()(k) * t) * coeffs(k);
    }
    return {vectors.cast<Complex>() * phased};
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

namespace detail {

/// J_0(x) … J_n(x) by Miller's backward recurrence, normalized with
/// J_0 + 2 Σ J_2k = 1.
inline std::vector<double> bessel_j_sequence(double x, int n) {
  std::vector<double> j(static_cast<std::size_t>(n) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  int start = n + 20 + static_cast<int>(std::sqrt(40.0 * (n + 20)));
  start += start % 2;
  double next = 0.0, current = 1e-300, norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double previous = 2.0 * k / x * current - next;
    next = current;
    current = previous;
    if (k - 1 <= n) j[static_cast<std::size_t>(k - 1)] = current;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * current;
    if (std::abs(current) > 1e250) {
      for (auto& v : j) v *= 1e-250;
      next *= 1e-250;
      current *= 1e-250;
      norm *= 1e-250;
    }
  }
  for (auto& v : j) v /= norm;
  return j;
}

}  // namespace detail

/// exp(−itH)ψ as a Chebyshev series in the spectrally rescaled sparse H.
/// Cost is linear in the dimension and in ‖H‖ t.
class ChebyshevEvolver {
 public:
  explicit ChebyshevEvolver(const FockHamiltonian& h) : h_(h.matrix) {
    // Gershgorin bounds on the spectrum.
    double lo = INFINITY, hi = -INFINITY;
    for (Eigen::Index r = 0; r < h.matrix.outerSize(); ++r) {
      double centre = 0.0, radius = 0.0;
      for (FockHamiltonian::SparseMatrix::InnerIterator it(h.matrix, r); it; ++it) {
        if (it.col() == r) centre = it.value();
        else radius += std::abs(it.value());
      }
      lo = std::min(lo, centre - radius);
      hi = std::max(hi, centre + radius);
    }
    half_width_ = std::max(0.5 * (hi - lo), 1e-12) * (1.0 + 1e-9);
    centre_ = 0.5 * (hi + lo);
  }

  FockStateVector evolve(const FockStateVector& state, double t) const {
    const double x = half_width_ * std::abs(t);
    const int terms = static_cast<int>(x + 10.0 * std::cbrt(x) + 40.0);
    const auto j = detail::bessel_j_sequence(x, terms);
    const double sign = t < 0.0 ? -1.0 : 1.0;

    // T_k recurrence on H̃ = (H − centre) / half_width.
    auto apply = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
      return (h_ * v - centre_ * v) / half_width_;
    };
    Eigen::VectorXcd prev = state.amplitudes;
    Eigen::VectorXcd curr = apply(prev);
    Eigen::VectorXcd sum = j[0] * prev + 2.0 * Complex(0.0, -sign) * j[1] * curr;
    Complex phase(0.0, -sign);
    for (int k = 2; k <= terms; ++k) {
      Eigen::VectorXcd next = 2.0 * apply(curr) - prev;
      phase *= Complex(0.0, -sign);
      sum += (2.0 * j[static_cast<std::size_t>(k)]) * phase * next;
      prev = std::move(curr);
      curr = std::move(next);
    }
    return {std::polar(1.0, -centre_ * t) * sum};
  }

 private:
  FockHamiltonian::SparseMatrix h_;
  double half_width_ = 0.0;
  double centre_ = 0.0;
};

inline constexpr double kDefaultMaxLeakage = 1e-6;

/// Applies exp(−itH). Throws when the evolved state leaks out of the
/// basis faster than max_leakage (the cutoff is too small).
inline FockStateVector evolve(const FockStateVector& state, const FockHamiltonian& h, double t,
                              double max_leakage = kDefaultMaxLeakage) {
  auto out = ChebyshevEvolver(h).evolve(state, t);
  const double leak = leakage(out, h);
  if (leak > max_leakage) {
    throw Error("evolve: truncated basis inadequate (leakage " + std::to_string(leak) +
                "); increase the cutoff");
  }
  return out;
}

struct FockMoments {
  Complex mean_a, mean_b;
  Complex mean_ab, mean_ab_dagger;
  double mean_na = 0.0;
  double mean_nb = 0.0;

  Complex cov_ab, cov_ab_dagger;
  double cov_na = 0.0;
  double cov_nb = 0.0;
  double y = 0.0;

  MomentSet moment_set() const { return {cov_ab, cov_ab_dagger, cov_na, cov_nb}; }
};

inline FockMoments observables(const FockStateVector& state, const TruncatedBasis& basis) {
  FockMoments m;
  for (int na = 0; na <= basis.cutoff_a; ++na) {
    for (int nb = 0; nb <= basis.cutoff_b; ++nb) {
      const Complex c = state.at(basis, na, nb);
      if (c == Complex{}) continue;
      m.mean_na += na * std::norm(c);
      m.mean_nb += nb * std::norm(c);
      m.mean_a += std::conj(state.at(basis, na - 1, nb)) * std::sqrt(double(na)) * c;
      m.mean_b += std::conj(state.at(basis, na, nb - 1)) * std::sqrt(double(nb)) * c;
      m.mean_ab += std::conj(state.at(basis, na - 1, nb - 1)) * std::sqrt(double(na) * nb) * c;
      m.mean_ab_dagger +=
          std::conj(state.at(basis, na - 1, nb + 1)) * std::sqrt(na * (nb + 1.0)) * c;
    }
  }
  m.cov_ab = m.mean_ab - m.mean_a * m.mean_b;
  m.cov_ab_dagger = m.mean_ab_dagger - m.mean_a * std::conj(m.mean_b);
  m.cov_na = m.mean_na - std::norm(m.mean_a);
  m.cov_nb = m.mean_nb - std::norm(m.mean_b);
  m.y = covariance_measure(m.moment_set());
  return m;
}

/// Entropy (bits) of the a-mode reduced state.
inline double reduced_entropy(const FockStateVector& state, const TruncatedBasis& basis) {
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> psi(state.amplitudes.data(), basis.cutoff_a + 1,
                                       basis.cutoff_b + 1);
  const Eigen::MatrixXcd rho = psi * psi.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double p : solver.eigenvalues()) {
    if (p < -1e-10) {
      throw NumericalError("reduced_entropy: reduced density matrix is not positive");
    }
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

struct ConvergenceOptions {
  double tol = 1e-8;
  double linear_drive = 0.0;
  int ceiling = 120;
  double growth = 1.5;
};

struct ConvergenceResult {
  TruncatedBasis basis;
  double last_change = 0.0;
  std::vector<int> cutoffs_tried;
};

namespace detail {

struct OracleSample {
  double y, na, nb, s;
};

inline std::vector<OracleSample> oracle_samples(const ModelParams& params, int cutoff,
                                                std::span<const double> times, int init_a,
                                                int init_b, double drive) {
  const TruncatedBasis basis{cutoff, cutoff};
  const auto h = build_hamiltonian(params, basis, drive);
  const ChebyshevEvolver evolver(h);
  std::vector<std::size_t> order(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

  // Step through the times in increasing order.
  std::vector<OracleSample> out(times.size());
  auto psi = product_state(basis, init_a, init_b);
  double now = 0.0;
  for (std::size_t k : order) {
    psi = evolver.evolve(psi, times[k] - now);
    now = times[k];
    const auto m = observables(psi, basis);
    out[k] = {m.y, m.cov_na, m.cov_nb, reduced_entropy(psi, basis)};
  }
  return out;
}

}  // namespace detail

/// Grows the per-mode cutoff geometrically until Y, both photon numbers and
/// the entropy change by less than tol at every requested time.
inline ConvergenceResult check_convergence(const ModelParams& params,
                                           std::span<const double> times, int init_a,
                                           int init_b, const ConvergenceOptions& opts = {}) {
  require_valid(params);
  const int total = init_a + init_b;
  ConvergenceResult result;
  if (params.epsilon == 0.0 && opts.linear_drive == 0.0) {
    // Photon number is conserved; the |total| shell is reproduced exactly.
    result.basis = {total, total};
    result.cutoffs_tried = {total};
    return result;
  }

  int cutoff = std::max(total + 4, 8);
  if (cutoff > opts.ceiling) {
    throw CutoffCeilingError("check_convergence: initial cutoff exceeds ceiling");
  }
  auto previous = detail::oracle_samples(params, cutoff, times, init_a, init_b,
                                         opts.linear_drive);
  result.cutoffs_tried.push_back(cutoff);
  for (;;) {
    const int next = static_cast<int>(std::ceil(cutoff * opts.growth));
    if (next > opts.ceiling) {
      const auto regime = spectral_values(params).parametrically_unstable()
                              ? "parametrically unstable regime"
                              : "strong-pump regime";
      throw CutoffCeilingError("check_convergence: cutoff would exceed ceiling " +
                               std::to_string(opts.ceiling) + " (" + regime + ")");
    }
    auto current = detail::oracle_samples(params, next, times, init_a, init_b,
                                          opts.linear_drive);
    result.cutoffs_tried.push_back(next);
    double change = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      change = std::max({change, std::abs(current[k].y - previous[k].y),
                         std::abs(current[k].na - previous[k].na),
                         std::abs(current[k].nb - previous[k].nb),
                         std::abs(current[k].s - previous[k].s)});
    }
    if (!std::isfinite(change)) {
      throw NumericalError("check_convergence: non-finite oracle values");
    }
    if (change < opts.tol) {
      result.basis = {next, next};
      result.last_change = change;
      return result;
    }
    cutoff = next;
    previous = std::move(current);
  }
}

}  // namespace cavity
