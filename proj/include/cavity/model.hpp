#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavity {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed quantity failed a numerical tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The Fock truncation could not be made adequate below the configured ceiling.
class CutoffCeilingError : public Error {
 public:
  using Error::Error;
};

/// Physical constants of the two-cavity model, in scaled (dimensionless) units.
///
/// H = omega (a†a + b†b) + lambda (a†b + a b†) + epsilon (a†² + a²),
/// with the a-mode prepared in |n_initial⟩ and the b-mode in vacuum.
struct ModelParams {
  double omega = 1.0;
  double lambda = 0.1;
  double epsilon = 0.0;
  int n_initial = 5;

  bool operator==(const ModelParams&) const = default;
};

/// Time measured in units of pi/lambda, the pump-free exchange period.
struct ScaledTime {
  double value = 0.0;
};

inline double to_physical_time(ScaledTime s, const ModelParams& params) {
  if (params.lambda == 0.0) {
    throw Error("scaled time undefined for uncoupled cavities");
  }
  return s.value * std::numbers::pi / params.lambda;
}

inline ScaledTime to_scaled_time(double t, const ModelParams& params) {
  if (params.lambda == 0.0) {
    throw Error("scaled time undefined for uncoupled cavities");
  }
  return ScaledTime{t * params.lambda / std::numbers::pi};
}

struct ValidationResult {
  ModelParams params;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

inline ValidationResult validate(const ModelParams& params) {
  ValidationResult result{params, {}};
  if (!std::isfinite(params.omega)) {
    result.errors.emplace_back("omega must be finite");
  } else if (params.omega <= 0.0) {
    result.errors.emplace_back("omega must be > 0");
  }
  if (!std::isfinite(params.lambda)) {
    result.errors.emplace_back("lambda must be finite");
  }
  if (!std::isfinite(params.epsilon)) {
    result.errors.emplace_back("epsilon must be finite");
  }
  if (params.n_initial < 0) {
    result.errors.emplace_back("n_initial must be >= 0");
  }
  return result;
}

// Throws Error listing every violated invariant.
inline const ModelParams& require_valid(const ModelParams& params) {
  auto result = validate(params);
  if (!result.ok()) {
    std::string msg = "invalid model parameters:";
    for (const auto& e : result.errors) {
      msg += " " + e + ";";
    }
    throw Error(msg);
  }
  return params;
}

}  // namespace cavity
