#pragma once

// Pumped dynamics in the Heisenberg picture. The operator vector
// v = (a, b, a†, b†) obeys i dv/dt = M v, so v(t) = S(t) v(0) with
// S(t) = exp(-i t M). S is evaluated as a cubic polynomial in M whose
// coefficients interpolate exp(-i theta t) on the spectrum {±alpha, ±gamma}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavity/model.hpp"

namespace cavity {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

inline constexpr Complex kI{0.0, 1.0};

/// diag(1, 1, -1, -1); S Σ S† = Σ is the Bogoliubov condition.
inline Matrix4c symplectic_form() {
  Matrix4c sigma = Matrix4c::Zero();
  sigma.diagonal() << 1.0, 1.0, -1.0, -1.0;
  return sigma;
}

struct CoefficientMatrix {
  Matrix4c entries;
};

inline CoefficientMatrix build_matrix(const ModelParams& params) {
  const double w = params.omega;
  const double l = params.lambda;
  const double e = params.epsilon;
  Matrix4c m;
  // clang-format off
  m <<  w,        l,   2.0 * e,  0.0,
        l,        w,   0.0,      0.0,
       -2.0 * e,  0.0, -w,       -l,
        0.0,      0.0, -l,       -w;
  // clang-format on
  return {m};
}

/// A = ω² + λ² − 2ε², B = sqrt(ω²λ² − λ²ε² + ε⁴); the eigenvalues of M are
/// ±alpha = ±sqrt(A − 2B) and ±gamma = ±sqrt(A + 2B).
struct SpectralData {
  double A = 0.0;
  double B = 0.0;
  Complex alpha;
  Complex gamma;
  // B² < 0: the eigenvalues leave the ±alpha, ±gamma pattern on the real or
  // imaginary axes and the closed form is not used.
  bool complex_b = false;

  /// A − 2B < 0: alpha is imaginary and moments grow exponentially.
  bool parametrically_unstable() const { return A - 2.0 * B < 0.0; }
};

inline SpectralData spectral_values(const ModelParams& params) {
  const double w2 = params.omega * params.omega;
  const double l2 = params.lambda * params.lambda;
  const double e2 = params.epsilon * params.epsilon;
  SpectralData s;
  s.A = w2 + l2 - 2.0 * e2;
  const double b2 = w2 * l2 - l2 * e2 + e2 * e2;
  s.complex_b = b2 < 0.0;
  s.B = std::sqrt(std::max(b2, 0.0));
  s.alpha = std::sqrt(Complex(s.A - 2.0 * s.B, 0.0));
  s.gamma = std::sqrt(Complex(s.A + 2.0 * s.B, 0.0));
  return s;
}

/// Largest |det(M − θI)| over θ ∈ {±alpha, ±gamma}, relative to the scale
/// (‖M‖ + |θ|)⁴ of a generic determinant.
inline double eigenvalue_residual(const CoefficientMatrix& m, const SpectralData& s) {
  double worst = 0.0;
  const double norm = m.entries.cwiseAbs().maxCoeff();
  for (const Complex theta : {s.alpha, -s.alpha, s.gamma, -s.gamma}) {
    const Matrix4c shifted = m.entries - theta * Matrix4c::Identity();
    const double scale = std::pow(norm + std::abs(theta), 4);
    worst = std::max(worst, std::abs(shifted.determinant()) / scale);
  }
  return worst;
}

inline SpectralData spectral(const ModelParams& params) {
  auto s = spectral_values(params);
  if (!s.complex_b) {
    const double residual = eigenvalue_residual(build_matrix(params), s);
    if (residual > 1e-9) {
      throw NumericalError("spectral: ±alpha, ±gamma are not eigenvalues of M (residual " +
                           std::to_string(residual) + ")");
    }
  }
  return s;
}

/// exp(−itM) = c0 I + c1 M + c2 M² + c3 M³.
struct ChCoefficients {
  Complex c0, c1, c2, c3;

  Complex evaluate(Complex theta) const {
    return c0 + theta * (c1 + theta * (c2 + theta * c3));
  }
};

/// Printed flips the sign of the I and M terms. It fails exp(0) = I and is
/// kept only so it can be audited.
enum class CoefficientConvention { Corrected, Printed };

inline constexpr double kDegenerateThreshold = 1e-10;

inline bool is_degenerate(const SpectralData& s) {
  return s.complex_b || std::abs(4.0 * s.B) < kDegenerateThreshold ||
         std::abs(s.alpha) < kDegenerateThreshold;
}

namespace detail {

// sin(theta t)/theta, continuous through theta -> 0 and valid for complex theta.
inline Complex sin_over(Complex theta, double t) {
  const Complex z = theta * t;
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  }
  return std::sin(z) / theta;
}

}  // namespace detail

/// Returns nullopt on a degenerate spectrum; callers fall back to a dense
/// matrix exponential.
inline std::optional<ChCoefficients> ch_coefficients(
    const SpectralData& s, double t,
    CoefficientConvention convention = CoefficientConvention::Corrected) {
  if (is_degenerate(s)) return std::nullopt;
  const Complex a2 = s.alpha * s.alpha;
  const Complex g2 = s.gamma * s.gamma;
  const Complex sa = detail::sin_over(s.alpha, t);
  const Complex sg = detail::sin_over(s.gamma, t);
  const Complex ca = std::cos(s.alpha * t);
  const Complex cg = std::cos(s.gamma * t);
  const double four_b = 4.0 * s.B;

  ChCoefficients c;
  c.c3 = kI * (sa - sg) / four_b;
  c.c2 = (cg - ca) / four_b;
  c.c1 = -kI * (g2 * sa - a2 * sg) / four_b;
  c.c0 = (g2 * ca - a2 * cg) / four_b;
  if (convention == CoefficientConvention::Printed) {
    c.c1 = -c.c1;
    c.c0 = -c.c0;
  }
  return c;
}

struct Propagator {
  Matrix4c matrix;
  double t = 0.0;
  bool dense_fallback = false;
};

inline Matrix4c dense_propagator(const ModelParams& params, double t) {
  const Matrix4c generator = (-kI * t) * build_matrix(params).entries;
  return generator.exp();
}

/// Cayley–Hamilton evaluation of exp(−itM) for fixed parameters; M, M², M³
/// and the spectrum are computed once so a time grid costs a few 4x4 sums
/// per point.
class CayleyHamiltonPropagator {
 public:
  explicit CayleyHamiltonPropagator(const ModelParams& params)
      : params_(params), spectrum_(spectral(params)) {
    m1_ = build_matrix(params).entries;
    m2_ = m1_ * m1_;
    m3_ = m2_ * m1_;
  }

  const SpectralData& spectrum() const { return spectrum_; }
  bool degenerate() const { return is_degenerate(spectrum_); }

  Propagator at(double t) const {
    const auto c = ch_coefficients(spectrum_, t);
    if (!c) {
      return {dense_propagator(params_, t), t, true};
    }
    Matrix4c s = c->c1 * m1_ + c->c2 * m2_ + c->c3 * m3_;
    s.diagonal().array() += c->c0;
    return {s, t, false};
  }

 private:
  ModelParams params_;
  SpectralData spectrum_;
  Matrix4c m1_, m2_, m3_;
};

inline Propagator propagator(const ModelParams& params, double t) {
  require_valid(params);
  return CayleyHamiltonPropagator(params).at(t);
}

/// ‖S Σ S† − Σ‖_max.
inline double symplectic_residual(const Matrix4c& s) {
  const Matrix4c sigma = symplectic_form();
  return (s * sigma * s.adjoint() - sigma).cwiseAbs().maxCoeff();
}

/// The covariances entering the entanglement measure. First moments vanish
/// for |N,0⟩ without linear drive, so these equal the raw moments.
struct MomentSet {
  Complex cov_ab;
  Complex cov_ab_dagger;
  double mean_na = 0.0;
  double mean_nb = 0.0;
};

/// G_ij = ⟨v_i v_j⟩ for |N,0⟩ with v = (a, b, a†, b†).
inline Matrix4c initial_second_moments(int n_initial) {
  Matrix4c g = Matrix4c::Zero();
  g(0, 2) = n_initial + 1.0;  // a a†
  g(2, 0) = n_initial;        // a† a
  g(1, 3) = 1.0;              // b b†
  return g;
}

/// Transports second moments through S: G(t) = S G(0) Sᵀ. Only the four
/// entries Y needs are formed, using the three nonzeros of G(0).
inline MomentSet moments_from_propagator(const Matrix4c& s, int n_initial) {
  const double n = n_initial;
  auto g = [&](int i, int j) {
    return (n + 1.0) * s(i, 0) * s(j, 2) + n * s(i, 2) * s(j, 0) + s(i, 1) * s(j, 3);
  };
  return {g(0, 1), g(0, 3), g(2, 0).real(), g(3, 1).real()};
}

inline MomentSet moments_transport(const ModelParams& params, double t) {
  return moments_from_propagator(propagator(params, t).matrix, params.n_initial);
}

/// Six polynomials in the expansion coefficients. y_coef is the fifth of
/// them, renamed so it cannot be confused with the entanglement measure.
struct StructureFunctions {
  Complex u, v, w, x, y_coef, z_coef;
};

inline std::optional<StructureFunctions> structure_functions(
    const ModelParams& params, double t, int sign_omega, int sign_lambda,
    CoefficientConvention convention = CoefficientConvention::Corrected) {
  const auto s = spectral_values(params);
  const auto c = ch_coefficients(s, t, convention);
  if (!c) return std::nullopt;

  const double w = sign_omega * params.omega;
  const double l = sign_lambda * params.lambda;
  const double e = params.epsilon;
  const double A = s.A;
  StructureFunctions f;
  f.u = c->c0 + w * c->c1 + (A - 2 * e * e) * c->c2 + w * (2 * l * l - 2 * e * e + A) * c->c3;
  f.v = l * c->c1 + 2 * l * w * c->c2 + l * (2 * w * w - 2 * e * e + A) * c->c3;
  f.w = 2 * e * c->c1 + 2 * e * (l * l + A) * c->c3;
  f.x = c->c0 + w * c->c1 + (l * l + w * w) * c->c2 + w * (3 * l * l + w * w) * c->c3;
  f.y_coef = 2 * e * (l * c->c2 + w * c->c3);
  f.z_coef = -2 * l * l * e * c->c3;
  return f;
}

/// The four moments assembled from the structure functions exactly as the
/// closed-form expressions are written. Number moments stay complex here: a
/// nonzero imaginary part is itself an audit finding.
struct ClosedFormMoments {
  Complex cov_ab;
  Complex cov_ab_dagger;
  Complex n_a;
  Complex n_b;
};

inline std::optional<ClosedFormMoments> moments_closed_form(
    const ModelParams& params, double t,
    CoefficientConvention convention = CoefficientConvention::Corrected) {
  const auto pp = structure_functions(params, t, +1, +1, convention);
  const auto mm = structure_functions(params, t, -1, -1, convention);
  const auto mp = structure_functions(params, t, -1, +1, convention);
  if (!pp || !mm || !mp) return std::nullopt;
  const double n = params.n_initial;

  ClosedFormMoments m;
  m.cov_ab = (1 + n) * pp->x * pp->y_coef + n * pp->w * pp->v + pp->v * pp->z_coef;
  m.cov_ab_dagger = (1 + n) * pp->u * mm->v + n * pp->w * mp->y_coef + pp->v * mm->x;
  m.n_a = (1 + n) * pp->u * mm->u - n * pp->w * pp->w + pp->v * mm->v - 1.0;
  m.n_b = (1 + n) * pp->v * mm->v + n * pp->y_coef * mp->y_coef + pp->x * mm->x - 1.0;
  return m;
}

inline double covariance_measure(const MomentSet& m) {
  return std::sqrt((std::norm(m.cov_ab_dagger) + std::norm(m.cov_ab)) /
                   (2.0 * (m.mean_na + 0.5) * (m.mean_nb + 0.5)));
}

/// |⟨a†a − b†b⟩| / ⟨a†a + b†b⟩.
inline double photon_difference_ratio(const MomentSet& m) {
  const double total = m.mean_na + m.mean_nb;
  if (!(total > 0.0)) {
    throw Error("photon_difference_ratio: no photons in either mode");
  }
  return std::abs(m.mean_na - m.mean_nb) / total;
}

}  // namespace cavity
