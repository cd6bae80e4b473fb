#pragma once

// Dual-path audit: closed forms vs Heisenberg transport vs Fock oracle over
// random parameter draws, plus an audit of the closed-form moment
// expressions and of the flipped-sign variant of the exponential expansion.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavity/binomial.hpp"
#include "cavity/config.hpp"
#include "cavity/fock.hpp"
#include "cavity/heisenberg.hpp"
#include "cavity/model.hpp"

namespace cavity {

struct Draw {
  ModelParams params;
  double scaled_time = 0.0;

  std::string describe() const {
    RunConfig c;
    c.params = params;
    c.t_max_scaled = scaled_time;
    std::string s;
    for (const auto& [k, v] : to_key_values(c)) {
      if (k == "omega" || k == "lambda" || k == "epsilon" || k == "n_initial" ||
          k == "t_max_scaled") {
        s += k + "=" + v + " ";
      }
    }
    if (!s.empty()) s.pop_back();
    return s;
  }
};

struct AuditCheck {
  std::string name;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  std::string worst_draw;

  bool passed() const { return max_deviation <= tolerance; }

  void record(double deviation, const Draw& draw) {
    if (!(deviation <= max_deviation)) {  // also captures NaN
      max_deviation = std::isnan(deviation) ? INFINITY : deviation;
      worst_draw = draw.describe();
    }
  }
};

/// Deviation of the closed-form moments from transport at one draw.
struct ClosedFormDeviation {
  Draw draw;
  CoefficientConvention convention;
  double cov_ab = 0.0;
  double cov_ab_dagger = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  bool evaluated = false;

  double worst() const { return std::max({cov_ab, cov_ab_dagger, n_a, n_b}); }
};

struct ExpansionSignAudit {
  // ‖S(0) − I‖ with the flipped signs; 0 for the corrected coefficients.
  double printed_identity_error = 0.0;
  double corrected_identity_error = 0.0;
  // Largest |p(θ) − exp(−iθt)| over the spectrum and the draws.
  double printed_interpolation_error = 0.0;
  double corrected_interpolation_error = 0.0;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  std::vector<ClosedFormDeviation> closed_form;
  ExpansionSignAudit expansion;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  }
  const AuditCheck* first_failure() const {
    for (const auto& c : checks) {
      if (!c.passed()) return &c;
    }
    return nullptr;
  }
};

inline ClosedFormDeviation audit_closed_form(const Draw& d, CoefficientConvention convention) {
  ClosedFormDeviation dev{d, convention};
  const double t = to_physical_time(ScaledTime{d.scaled_time}, d.params);
  const auto closed = moments_closed_form(d.params, t, convention);
  if (!closed) return dev;
  const auto ref = moments_transport(d.params, t);
  dev.evaluated = true;
  dev.cov_ab = std::abs(closed->cov_ab - ref.cov_ab);
  dev.cov_ab_dagger = std::abs(closed->cov_ab_dagger - ref.cov_ab_dagger);
  dev.n_a = std::abs(closed->n_a - ref.mean_na);
  dev.n_b = std::abs(closed->n_b - ref.mean_nb);
  return dev;
}

inline ExpansionSignAudit audit_expansion(const std::vector<Draw>& draws) {
  ExpansionSignAudit a;
  for (const auto& d : draws) {
    const auto spec = spectral_values(d.params);
    const CoefficientMatrix m = build_matrix(d.params);
    for (auto convention : {CoefficientConvention::Corrected, CoefficientConvention::Printed}) {
      const bool printed = convention == CoefficientConvention::Printed;
      if (const auto c0 = ch_coefficients(spec, 0.0, convention)) {
        Matrix4c s = c0->c1 * m.entries + c0->c2 * m.entries * m.entries +
                     c0->c3 * m.entries * m.entries * m.entries;
        s.diagonal().array() += c0->c0;
        const double err = (s - Matrix4c::Identity()).cwiseAbs().maxCoeff();
        (printed ? a.printed_identity_error : a.corrected_identity_error) =
            std::max(printed ? a.printed_identity_error : a.corrected_identity_error, err);
      }
      const double t = to_physical_time(ScaledTime{d.scaled_time}, d.params);
      if (const auto c = ch_coefficients(spec, t, convention)) {
        for (const Complex theta : {spec.alpha, -spec.alpha, spec.gamma, -spec.gamma}) {
          const double err = std::abs(c->evaluate(theta) - std::exp(-kI * theta * t));
          auto& slot = printed ? a.printed_interpolation_error : a.corrected_interpolation_error;
          slot = std::max(slot, err);
        }
      }
    }
  }
  return a;
}

namespace detail {

inline std::vector<Draw> pump_free_draws(std::mt19937_64& rng, int count, double omega) {
  std::uniform_real_distribution<double> lambda(1e-3, 0.2), time(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 10);
  std::vector<Draw> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({{omega, lambda(rng), 0.0, n(rng)}, time(rng)});
  }
  return out;
}

inline std::vector<Draw> pumped_draws(std::mt19937_64& rng, int count, double omega) {
  std::uniform_real_distribution<double> lambda(1e-3, 0.2), eps(0.0, 0.3), time(0.0, 1.0);
  std::uniform_int_distribution<int> n(0, 5);
  std::vector<Draw> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({{omega, lambda(rng), eps(rng), n(rng)}, time(rng)});
  }
  return out;
}

}  // namespace detail

/// Runs every comparison. Throws CutoffCeilingError when the oracle cannot
/// converge below config.cutoff_ceiling.
inline AuditReport oracle_check(const RunConfig& config) {
  std::mt19937_64 rng(config.seed);
  const double omega = config.params.omega;
  const auto free_draws = detail::pump_free_draws(rng, config.draws, omega);
  const auto pumped = detail::pumped_draws(rng, config.draws, omega);

  AuditCheck free_paths{"pump_free_four_paths_Y", config.tolerance, 0.0, {}};
  AuditCheck identity{"identity_at_t0", 1e-12, 0.0, {}};
  AuditCheck ch_dense{"cayley_hamilton_vs_dense", 1e-9, 0.0, {}};
  AuditCheck symplectic{"symplectic_residual", 1e-9, 0.0, {}};
  AuditCheck transport_fock{"pumped_transport_vs_fock",
                            std::max(1e-6, config.convergence_tol), 0.0, {}};
  AuditCheck drive{"linear_drive_Y_insensitivity", config.tolerance, 0.0, {}};

  std::vector<Draw> all = free_draws;
  all.insert(all.end(), pumped.begin(), pumped.end());
  all.push_back({config.params, 0.5});

  for (const auto& d : all) {
    const double t = to_physical_time(ScaledTime{d.scaled_time}, d.params);
    const auto s = propagator(d.params, t).matrix;
    ch_dense.record((s - dense_propagator(d.params, t)).cwiseAbs().maxCoeff(), d);
    symplectic.record(symplectic_residual(s), d);

    const auto s0 = propagator(d.params, 0.0).matrix;
    const auto m0 = moments_transport(d.params, 0.0);
    identity.record(std::max({(s0 - Matrix4c::Identity()).cwiseAbs().maxCoeff(),
                              std::abs(m0.cov_ab), std::abs(m0.cov_ab_dagger),
                              std::abs(m0.mean_na - d.params.n_initial), std::abs(m0.mean_nb)}),
                    {d.params, 0.0});
  }

  for (const auto& d : free_draws) {
    const auto& p = d.params;
    const double t = to_physical_time(ScaledTime{d.scaled_time}, p);
    const double closed = covariance_measure_closed(p.n_initial, p.lambda, t);
    const double from_state = covariance_measure_from_state(binomial_state(p, t));
    const double transport = covariance_measure(moments_transport(p, t));
    const TruncatedBasis basis{p.n_initial, p.n_initial};
    const auto psi = evolve(product_state(basis, p.n_initial, 0), build_hamiltonian(p, basis), t);
    const double fock = observables(psi, basis).y;
    free_paths.record(std::max({std::abs(from_state - closed), std::abs(transport - closed),
                                std::abs(fock - closed)}),
                      d);
  }

  ConvergenceOptions conv;
  conv.tol = config.convergence_tol;
  conv.ceiling = config.cutoff_ceiling;
  for (const auto& d : pumped) {
    const auto& p = d.params;
    const double t = to_physical_time(ScaledTime{d.scaled_time}, p);
    const std::vector<double> times{t};
    const auto basis = check_convergence(p, times, p.n_initial, 0, conv).basis;
    const auto psi = evolve(product_state(basis, p.n_initial, 0), build_hamiltonian(p, basis), t,
                            INFINITY);
    const auto oracle = observables(psi, basis);
    const auto ref = moments_transport(p, t);
    transport_fock.record(std::max({std::abs(oracle.cov_ab - ref.cov_ab),
                                    std::abs(oracle.cov_ab_dagger - ref.cov_ab_dagger),
                                    std::abs(oracle.cov_na - ref.mean_na),
                                    std::abs(oracle.cov_nb - ref.mean_nb),
                                    std::abs(oracle.y - covariance_measure(ref))}),
                          d);
  }

  // Linear drive on the pump-free draws (small N keeps the displaced state
  // inside a modest cutoff).
  for (const auto& d : free_draws) {
    if (d.params.n_initial > 5) continue;
    const auto& p = d.params;
    const double t = to_physical_time(ScaledTime{d.scaled_time}, p);
    const std::vector<double> times{t};
    ConvergenceOptions driven = conv;
    driven.linear_drive = 0.1;
    const auto basis = check_convergence(p, times, p.n_initial, 0, driven).basis;
    const auto psi0 = product_state(basis, p.n_initial, 0);
    const double with_drive =
        observables(evolve(psi0, build_hamiltonian(p, basis, 0.1), t, INFINITY), basis).y;
    const double without = covariance_measure_closed(p.n_initial, p.lambda, t);
    drive.record(std::abs(with_drive - without), d);
  }

  AuditReport report;
  report.checks = {free_paths, identity, ch_dense, symplectic, transport_fock, drive};

  std::vector<Draw> closed_draws = pumped;
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    closed_draws.push_back({{omega, 0.1, 0.1, 5}, s});
    closed_draws.push_back({{omega, 0.1, 0.0, 5}, s});
  }
  for (const auto& d : closed_draws) {
    for (auto convention : {CoefficientConvention::Corrected, CoefficientConvention::Printed}) {
      report.closed_form.push_back(audit_closed_form(d, convention));
    }
  }
  report.expansion = audit_expansion(all);
  return report;
}

inline const char* convention_name(CoefficientConvention c) {
  return c == CoefficientConvention::Printed ? "printed" : "corrected";
}

inline void write_report(std::ostream& out, const AuditReport& r) {
  out << "# oracle-check\n";
  for (const auto& c : r.checks) {
    out << (c.passed() ? "PASS " : "FAIL ") << c.name << " max_dev=" << c.max_deviation
        << " tol=" << c.tolerance;
    if (!c.worst_draw.empty()) out << " worst: " << c.worst_draw;
    out << '\n';
  }
  out << "# closed-form moment audit (deviation from transport)\n";
  for (const auto& d : r.closed_form) {
    out << "closed_form " << convention_name(d.convention) << ' ' << d.draw.describe();
    if (!d.evaluated) {
      out << " degenerate-spectrum\n";
      continue;
    }
    out << " cov_ab=" << d.cov_ab << " cov_ab_dagger=" << d.cov_ab_dagger << " n_a=" << d.n_a
        << " n_b=" << d.n_b << '\n';
  }
  out << "# expansion sign audit\n"
      << "expansion printed_identity_error=" << r.expansion.printed_identity_error
      << " corrected_identity_error=" << r.expansion.corrected_identity_error << '\n'
      << "expansion printed_interpolation_error=" << r.expansion.printed_interpolation_error
      << " corrected_interpolation_error=" << r.expansion.corrected_interpolation_error << '\n';
  out << (r.passed() ? "RESULT PASS\n" : "RESULT FAIL\n");
}

inline nlohmann::ordered_json to_json(const AuditReport& r) {
  nlohmann::ordered_json doc;
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    doc["checks"].push_back({{"name", c.name},
                             {"passed", c.passed()},
                             {"max_deviation", c.max_deviation},
                             {"tolerance", c.tolerance},
                             {"worst_draw", c.worst_draw}});
  }
  doc["closed_form"] = nlohmann::ordered_json::array();
  for (const auto& d : r.closed_form) {
    doc["closed_form"].push_back({{"convention", convention_name(d.convention)},
                                  {"draw", d.draw.describe()},
                                  {"evaluated", d.evaluated},
                                  {"cov_ab", d.cov_ab},
                                  {"cov_ab_dagger", d.cov_ab_dagger},
                                  {"n_a", d.n_a},
                                  {"n_b", d.n_b}});
  }
  doc["expansion"] = {{"printed_identity_error", r.expansion.printed_identity_error},
                      {"corrected_identity_error", r.expansion.corrected_identity_error},
                      {"printed_interpolation_error", r.expansion.printed_interpolation_error},
                      {"corrected_interpolation_error", r.expansion.corrected_interpolation_error}};
  doc["passed"] = r.passed();
  return doc;
}

}  // namespace cavity
