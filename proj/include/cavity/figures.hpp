#pragma once

// Figure tables, epsilon sweeps and their CSV / JSON serialization.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cavity/binomial.hpp"
#include "cavity/config.hpp"
#include "cavity/fluctuation.hpp"
#include "cavity/heisenberg.hpp"
#include "cavity/model.hpp"

namespace cavity {

/// Column-major table plus named scalar findings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;
  std::vector<std::pair<std::string, double>> summary;

  void add_column(std::string name, std::vector<double> values) {
    columns.push_back(std::move(name));
    data.push_back(std::move(values));
  }
  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return data[i];
    }
    throw Error("no column named '" + name + "'");
  }
  double summary_value(const std::string& name) const {
    for (const auto& [k, v] : summary) {
      if (k == name) return v;
    }
    throw Error("no summary entry named '" + name + "'");
  }
  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

inline std::string format_g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << format_g12(table.data[c][r]);
    }
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const RunConfig& config, const Table& table) {
  nlohmann::ordered_json doc;
  for (const auto& [k, v] : to_key_values(config)) doc["config"][k] = v;
  doc["columns"] = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    doc["columns"][table.columns[c]] = table.data[c];
  }
  doc["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.summary) doc["summary"][k] = v;
  return doc;
}

inline void write_json(std::ostream& out, const RunConfig& config, const Table& table) {
  out << to_json(config, table).dump(2) << '\n';
}

/// n points from 0 to t_max inclusive.
inline std::vector<double> scaled_grid(double t_max, int points) {
  if (points < 2) throw ConfigError("time grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = t_max * i / (points - 1);
  return g;
}

inline std::string number_label(double v) { return detail::format_number(v); }

inline std::string pair_label(double lambda, double epsilon) {
  return "l" + number_label(lambda) + "_e" + number_label(epsilon);
}

namespace detail {

struct Peak {
  double value = 0.0;
  double at = 0.0;
};

inline Peak peak_of(const std::vector<double>& t, const std::vector<double>& y) {
  Peak p{-1.0, 0.0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > p.value) p = {y[i], t[i]};
  }
  return p;
}

}  // namespace detail

/// Y trace (moment transport) on a scaled grid of the trace's own lambda.
inline std::vector<double> y_trace(const ModelParams& params, const std::vector<double>& grid) {
  const CayleyHamiltonPropagator prop(require_valid(params));
  std::vector<double> y;
  y.reserve(grid.size());
  for (double s : grid) {
    const double t = to_physical_time(ScaledTime{s}, params);
    y.push_back(covariance_measure(moments_from_propagator(prop.at(t).matrix, params.n_initial)));
  }
  return y;
}

inline std::vector<MomentSet> moment_trace(const ModelParams& params,
                                           const std::vector<double>& grid) {
  const CayleyHamiltonPropagator prop(require_valid(params));
  std::vector<MomentSet> m;
  m.reserve(grid.size());
  for (double s : grid) {
    const double t = to_physical_time(ScaledTime{s}, params);
    m.push_back(moments_from_propagator(prop.at(t).matrix, params.n_initial));
  }
  return m;
}

inline Table fig1(const RunConfig& config) {
  const auto grid = scaled_grid(config.t_max_scaled, config.points);
  Table table;
  table.add_column("t_scaled", grid);
  for (int n : {1, 5, 10, 50}) {
    std::vector<double> y;
    y.reserve(grid.size());
    for (double s : grid) {
      const double t = to_physical_time(ScaledTime{s}, config.params);
      y.push_back(covariance_measure_closed(n, config.params.lambda, t));
    }
    const auto peak = detail::peak_of(grid, y);
    const std::string name = "Y_N" + std::to_string(n);
    table.summary.emplace_back("peak_" + name, peak.value);
    table.summary.emplace_back("peak_t_" + name, peak.at);
    table.add_column(name, std::move(y));
  }
  return table;
}

inline Table fig2(const RunConfig& config) {
  const auto& p = config.params;
  const auto grid = scaled_grid(config.t_max_scaled, config.points);
  std::vector<double> y, s;
  for (double ts : grid) {
    const double t = to_physical_time(ScaledTime{ts}, p);
    y.push_back(covariance_measure_closed(p.n_initial, p.lambda, t));
    s.push_back(entropy(reduced_spectrum(p, t)));
  }
  Table table;
  const auto py = detail::peak_of(grid, y);
  const auto ps = detail::peak_of(grid, s);
  table.summary = {{"peak_Y", py.value},
                   {"peak_t_Y", py.at},
                   {"peak_S", ps.value},
                   {"peak_t_S", ps.at},
                   {"max_entropy_bound", std::log2(p.n_initial + 1.0)}};
  table.add_column("t_scaled", grid);
  table.add_column("Y", std::move(y));
  table.add_column("S", std::move(s));
  return table;
}

inline std::vector<std::pair<double, double>> fig3_pairs() {
  return {{0.001, 0.1}, {0.001, 0.001}, {0.1, 0.1}, {0.1, 0.001}};
}

inline std::vector<std::pair<double, double>> fig4_pairs(const std::string& pairing) {
  if (pairing == "text") return {{0.001, 0.1}, {0.001, 0.001}, {0.005, 0.1}};
  return {{0.001, 0.1}, {0.001, 0.001}, {0.1, 0.005}};
}

inline Table fig3(const RunConfig& config) {
  const auto grid = scaled_grid(config.t_max_scaled, config.points);
  Table table;
  table.add_column("t_scaled", grid);
  for (const auto& [lambda, epsilon] : fig3_pairs()) {
    ModelParams p = config.params;
    p.lambda = lambda;
    p.epsilon = epsilon;
    auto y = y_trace(p, grid);
    const std::string name = "Y_" + pair_label(lambda, epsilon);
    table.summary.emplace_back("peak_" + name, detail::peak_of(grid, y).value);
    table.add_column(name, std::move(y));
  }
  return table;
}

inline Table fig4(const RunConfig& config) {
  const auto grid = scaled_grid(config.t_max_scaled, config.points);
  Table table;
  table.add_column("t_scaled", grid);
  for (const auto& [lambda, epsilon] : fig4_pairs(config.fig4_pairing)) {
    ModelParams p = config.params;
    p.lambda = lambda;
    p.epsilon = epsilon;
    std::vector<double> ratio;
    double lowest = 1.0;
    for (const auto& m : moment_trace(p, grid)) {
      ratio.push_back(photon_difference_ratio(m));
      lowest = std::min(lowest, ratio.back());
    }
    const std::string name = "ratio_" + pair_label(lambda, epsilon);
    table.summary.emplace_back("min_" + name, lowest);
    table.add_column(name, std::move(ratio));
  }
  return table;
}

/// Running maxima of Y over one pass of a uniform scaled grid, read off at
/// several horizons (each must lie on the grid).
inline std::vector<double> max_y_at_horizons(const ModelParams& params, double step,
                                             const std::vector<double>& horizons) {
  const CayleyHamiltonPropagator prop(require_valid(params));
  std::vector<double> result(horizons.size(), 0.0);
  double horizon_max = 0.0;
  for (double h : horizons) horizon_max = std::max(horizon_max, h);
  const long n = std::lround(horizon_max / step);
  double running = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double s = i * step;
    const double t = to_physical_time(ScaledTime{s}, params);
    running = std::max(running,
                       covariance_measure(moments_from_propagator(prop.at(t).matrix,
                                                                  params.n_initial)));
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      if (i == std::lround(horizons[k] / step)) result[k] = running;
    }
  }
  return result;
}

inline std::vector<double> epsilon_grid(const RunConfig& config) {
  if (config.eps_steps < 1) throw ConfigError("eps_steps must be >= 1");
  if (config.eps_steps == 1) return {config.eps_min};
  std::vector<double> g;
  for (int i = 0; i < config.eps_steps; ++i) {
    g.push_back(config.eps_min + (config.eps_max - config.eps_min) * i / (config.eps_steps - 1));
  }
  return g;
}

/// Max Y over the scan window t_max_scaled for every coupling and epsilon,
/// with the same maximum over 1 and 5 units reported for sensitivity.
inline Table fig5(const RunConfig& config) {
  const auto eps = epsilon_grid(config);
  const double step = config.t_max_scaled / (config.points - 1);
  const std::vector<double> horizons{config.t_max_scaled, 1.0, 5.0};
  Table table;
  table.add_column("epsilon", eps);
  for (double lambda : config.lambdas) {
    std::vector<double> main, h1, h5;
    for (double e : eps) {
      ModelParams p = config.params;
      p.lambda = lambda;
      p.epsilon = e;
      const auto m = max_y_at_horizons(p, step, horizons);
      main.push_back(m[0]);
      h1.push_back(m[1]);
      h5.push_back(m[2]);
    }
    const std::string name = "max_Y_l" + number_label(lambda);
    table.summary.emplace_back(name + "_at_eps_min", main.front());
    table.summary.emplace_back(name + "_at_eps_max", main.back());
    table.add_column(name, std::move(main));
    table.add_column(name + "_h1", std::move(h1));
    table.add_column(name + "_h5", std::move(h5));
  }
  return table;
}

inline EnsembleOptions ensemble_options(const RunConfig& config) {
  return {config.segments, config.t_max_scaled, config.samples_per_segment, config.spread};
}

inline Table fig6(const RunConfig& config) {
  Table table;
  bool first = true;
  for (double lambda : config.lambdas) {
    ModelParams p = config.params;
    p.lambda = lambda;
    const auto ens =
        run_ensemble(p, config.mean_epsilon, config.trials, config.seed, ensemble_options(config));
    if (first) table.add_column("t_scaled", ens.scaled_time);
    first = false;
    const std::string tag = "l" + number_label(lambda);
    for (std::size_t k = 0; k < ens.trials.size(); ++k) {
      table.add_column("Y_" + tag + "_trial" + std::to_string(k), ens.trials[k]);
    }
    table.add_column("mean_" + tag, ens.mean);
    table.add_column("std_" + tag, ens.stddev);
    table.add_column("cv_" + tag, ens.cv);
    if (ens.trials.size() >= 2) {
      const auto spread = spread_statistics(ens);
      table.summary.emplace_back("max_std_" + tag, spread.max_std);
      table.summary.emplace_back("max_cv_" + tag, spread.max_cv);
    }
  }
  return table;
}

/// Max Y over [0, t_max_scaled] as epsilon is swept at fixed lambda.
inline Table sweep(const RunConfig& config) {
  const auto eps = epsilon_grid(config);
  const auto grid = scaled_grid(config.t_max_scaled, config.points);
  std::vector<double> max_y, at;
  for (double e : eps) {
    ModelParams p = config.params;
    p.epsilon = e;
    const auto peak = detail::peak_of(grid, y_trace(p, grid));
    max_y.push_back(peak.value);
    at.push_back(peak.at);
  }
  Table table;
  table.add_column("epsilon", eps);
  table.add_column("max_Y", std::move(max_y));
  table.add_column("t_scaled_at_max", std::move(at));
  return table;
}

}  // namespace cavity
