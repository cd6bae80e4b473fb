// cavity: figure reproduction, sweeps and oracle audits for the coupled-cavity
// entanglement model.
//
//   cavity fig1|fig2|fig3|fig4|fig5|fig6|sweep|oracle-check [--config PATH]
//          [--out PATH] [--format csv|json] [--seed U64] [--omega F]
//          [--lambda F] [--epsilon F] [--n-initial U32] [--t-max-scaled F]
//          [--points U32]
//
// Exit codes: 0 success, 1 usage, 2 numerical-tolerance breach,
// 3 cutoff ceiling.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cavity/audit.hpp"
#include "cavity/config.hpp"
#include "cavity/figures.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kTolerance = 2, kCutoff = 3 };

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<double> omega, lambda, epsilon, t_max_scaled;
  std::optional<unsigned> n_initial, points;
};

void add_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--omega", o.omega, "mode frequency");
  cmd->add_option("--lambda", o.lambda, "cavity-cavity coupling");
  cmd->add_option("--epsilon", o.epsilon, "quadratic pump strength");
  cmd->add_option("--n-initial", o.n_initial, "initial a-mode photon number");
  cmd->add_option("--t-max-scaled", o.t_max_scaled, "time window in units of pi/lambda");
  cmd->add_option("--points", o.points, "grid points");
}

cavity::RunConfig resolve(const std::string& name, const Overrides& o) {
  auto c = cavity::default_config(name);
  if (!o.config_path.empty()) cavity::apply_config_file(c, o.config_path);
  if (o.out) c.out = *o.out;
  if (o.format) cavity::apply_setting(c, "format", *o.format);
  if (o.seed) c.seed = *o.seed;
  if (o.omega) c.params.omega = *o.omega;
  if (o.lambda) c.params.lambda = *o.lambda;
  if (o.epsilon) c.params.epsilon = *o.epsilon;
  if (o.n_initial) c.params.n_initial = static_cast<int>(*o.n_initial);
  if (o.t_max_scaled) c.t_max_scaled = *o.t_max_scaled;
  if (o.points) c.points = static_cast<int>(*o.points);
  cavity::require_valid(c.params);
  return c;
}

cavity::Table run_figure(const cavity::RunConfig& c) {
  const auto& s = c.subcommand;
  if (s == "fig1") return cavity::fig1(c);
  if (s == "fig2") return cavity::fig2(c);
  if (s == "fig3") return cavity::fig3(c);
  if (s == "fig4") return cavity::fig4(c);
  if (s == "fig5") return cavity::fig5(c);
  if (s == "fig6") return cavity::fig6(c);
  return cavity::sweep(c);
}

template <typename Emit>
void with_output(const cavity::RunConfig& c, Emit&& emit) {
  if (c.out.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream file(c.out);
  if (!file) throw cavity::ConfigError("cannot write '" + c.out + "'");
  emit(file);
}

int run(const cavity::RunConfig& c) {
  if (c.subcommand == "oracle-check") {
    const auto report = cavity::oracle_check(c);
    with_output(c, [&](std::ostream& out) {
      if (c.format == cavity::OutputFormat::Json) {
        out << cavity::to_json(report).dump(2) << '\n';
      } else {
        cavity::write_report(out, report);
      }
    });
    if (const auto* fail = report.first_failure()) {
      std::cerr << "tolerance breach in " << fail->name << " (max deviation "
                << fail->max_deviation << " > " << fail->tolerance << ")\n"
                << "offending draw: " << fail->worst_draw << '\n';
      return kTolerance;
    }
    return kOk;
  }

  const auto table = run_figure(c);
  with_output(c, [&](std::ostream& out) {
    if (c.format == cavity::OutputFormat::Json) {
      cavity::write_json(out, c, table);
    } else {
      cavity::write_csv(out, table);
    }
  });
  for (const auto& [k, v] : table.summary) std::cerr << k << " = " << v << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled-cavity entanglement simulator"};
  app.require_subcommand(1);
  Overrides overrides;
  for (auto name : cavity::kSubcommands) {
    add_options(app.add_subcommand(std::string(name), "run " + std::string(name)), overrides);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto config = resolve(app.get_subcommands().front()->get_name(), overrides);
    return run(config);
  } catch (const cavity::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const cavity::CutoffCeilingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCutoff;
  } catch (const cavity::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTolerance;
  } catch (const cavity::Error& e) {
    // Invalid model parameters.
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
