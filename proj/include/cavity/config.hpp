#pragma once

// Run configuration: figure defaults, flat key=value files, and a canonical
// key=value echo so every output can be regenerated from its config.

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cavity/fluctuation.hpp"
#include "cavity/model.hpp"

namespace cavity {

// Malformed config or flag value; maps to the usage exit code.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string subcommand;
  ModelParams params;

  // Output time grid, inclusive of both ends.
  double t_max_scaled = 1.0;
  int points = 401;

  // Epsilon sweep (fig5, sweep).
  double eps_min = 0.0;
  double eps_max = 0.5;
  int eps_steps = 51;
  // Coupling list for fig5 and fig6.
  std::vector<double> lambdas;

  // Monte-Carlo.
  double mean_epsilon = 0.3;
  int trials = 10;
  int segments = 100;
  int samples_per_segment = 1;
  std::uint64_t seed = 1;
  SpreadConvention spread = SpreadConvention::StandardDeviation;

  // fig4 (lambda, epsilon) pairing: "caption" or "text".
  std::string fig4_pairing = "caption";

  // Oracle.
  int draws = 12;
  double tolerance = 1e-8;
  double convergence_tol = 1e-8;
  int cutoff_ceiling = 120;

  std::string out;
  OutputFormat format = OutputFormat::Csv;
};

inline const std::array<std::string_view, 8> kSubcommands = {
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "sweep", "oracle-check"};

/// Defaults shipped with each subcommand; configs/<name>.conf repeats them.
inline RunConfig default_config(std::string_view subcommand) {
  RunConfig c;
  c.subcommand = std::string(subcommand);
  if (subcommand == "fig1" || subcommand == "fig2") {
    c.params.lambda = 0.1;
    c.points = 1001;
  } else if (subcommand == "fig5") {
    // At omega = 1 the scan would end on the parametric threshold
    // eps_c = (omega² − lambda²) / (2 omega) ≈ 0.5.
    c.params.omega = 2.0;
    c.t_max_scaled = 2.0;
    c.points = 20001;
    c.lambdas = {0.001, 0.005, 0.01, 0.05, 0.1};
  } else if (subcommand == "fig6") {
    c.t_max_scaled = 5.0;
    c.lambdas = {0.001, 0.05};
  } else if (subcommand == "sweep") {
    c.t_max_scaled = 2.0;
    c.points = 4001;
    c.eps_steps = 26;
  } else if (subcommand == "oracle-check") {
    c.params.epsilon = 0.1;
  }
  return c;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    out.push_back(parse_number<double>(key, trim(item)));
  }
  return out;
}

inline std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace detail

/// Applies one key=value setting; unknown keys are errors.
inline void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  using detail::parse_number;
  if (key == "omega") c.params.omega = parse_number<double>(key, value);
  else if (key == "lambda") c.params.lambda = parse_number<double>(key, value);
  else if (key == "epsilon") c.params.epsilon = parse_number<double>(key, value);
  else if (key == "n_initial") c.params.n_initial = parse_number<int>(key, value);
  else if (key == "t_max_scaled") c.t_max_scaled = parse_number<double>(key, value);
  else if (key == "points") c.points = parse_number<int>(key, value);
  else if (key == "eps_min") c.eps_min = parse_number<double>(key, value);
  else if (key == "eps_max") c.eps_max = parse_number<double>(key, value);
  else if (key == "eps_steps") c.eps_steps = parse_number<int>(key, value);
  else if (key == "lambdas") c.lambdas = detail::parse_list(key, value);
  else if (key == "mean_epsilon") c.mean_epsilon = parse_number<double>(key, value);
  else if (key == "trials") c.trials = parse_number<int>(key, value);
  else if (key == "segments") c.segments = parse_number<int>(key, value);
  else if (key == "samples_per_segment") c.samples_per_segment = parse_number<int>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "spread") {
    if (value == "std") c.spread = SpreadConvention::StandardDeviation;
    else if (value == "variance") c.spread = SpreadConvention::Variance;
    else throw ConfigError("spread must be 'std' or 'variance'");
  } else if (key == "fig4_pairing") {
    if (value != "caption" && value != "text") {
      throw ConfigError("fig4_pairing must be 'caption' or 'text'");
    }
    c.fig4_pairing = std::string(value);
  } else if (key == "draws") c.draws = parse_number<int>(key, value);
  else if (key == "tolerance") c.tolerance = parse_number<double>(key, value);
  else if (key == "convergence_tol") c.convergence_tol = parse_number<double>(key, value);
  else if (key == "cutoff_ceiling") c.cutoff_ceiling = parse_number<int>(key, value);
  else if (key == "format") {
    if (value == "csv") c.format = OutputFormat::Csv;
    else if (value == "json") c.format = OutputFormat::Json;
    else throw ConfigError("format must be 'csv' or 'json'");
  } else if (key == "out") c.out = std::string(value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

/// Reads `key = value` lines; '#' starts a comment.
inline void apply_config_stream(RunConfig& c, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(c, detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1)));
  }
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_config_stream(c, in);
}

/// Canonical echo, in a fixed key order. Doubles use the shortest
/// round-trip representation.
inline std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& c) {
  using detail::format_number;
  std::string lambdas;
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    if (i) lambdas += ",";
    lambdas += format_number(c.lambdas[i]);
  }
  return {
      {"subcommand", c.subcommand},
      {"omega", format_number(c.params.omega)},
      {"lambda", format_number(c.params.lambda)},
      {"epsilon", format_number(c.params.epsilon)},
      {"n_initial", std::to_string(c.params.n_initial)},
      {"t_max_scaled", format_number(c.t_max_scaled)},
      {"points", std::to_string(c.points)},
      {"eps_min", format_number(c.eps_min)},
      {"eps_max", format_number(c.eps_max)},
      {"eps_steps", std::to_string(c.eps_steps)},
      {"lambdas", lambdas},
      {"mean_epsilon", format_number(c.mean_epsilon)},
      {"trials", std::to_string(c.trials)},
      {"segments", std::to_string(c.segments)},
      {"samples_per_segment", std::to_string(c.samples_per_segment)},
      {"seed", std::to_string(c.seed)},
      {"spread", c.spread == SpreadConvention::Variance ? "variance" : "std"},
      {"fig4_pairing", c.fig4_pairing},
      {"draws", std::to_string(c.draws)},
      {"tolerance", format_number(c.tolerance)},
      {"convergence_tol", format_number(c.convergence_tol)},
      {"cutoff_ceiling", std::to_string(c.cutoff_ceiling)},
      {"format", c.format == OutputFormat::Json ? "json" : "csv"},
  };
}

inline std::string to_config_text(const RunConfig& c) {
  std::string text;
  for (const auto& [k, v] : to_key_values(c)) {
    if (k == "subcommand" || (k == "lambdas" && v.empty())) continue;
    text += k + " = " + v + "\n";
  }
  return text;
}

}  // namespace cavity
