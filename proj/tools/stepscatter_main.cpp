#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "stepscatter/cli/commands.hpp"

namespace {

namespace cli = stepscatter::cli;

enum ExitCode { kOk = 0, kValidationFailed = 1, kConfigError = 2, kNumericalFailure = 3, kSpectralGuard = 4 };

// Flag name -> config key. Flags are applied after the config file.
const std::vector<std::pair<std::string, std::string>> kOverrides = {
    {"--v0", "v0"},
    {"--a", "a"},
    {"--hbar", "hbar"},
    {"--mass", "mass"},
    {"--L", "l_interval"},
    {"--k", "k"},
    {"--kmin", "k.min"},
    {"--kmax", "k.max"},
    {"--kcount", "k.count"},
    {"--kspacing", "k.spacing"},
    {"--l0", "packet.l0"},
    {"--kbar", "packet.k_bar"},
    {"--window-sigmas", "packet.window_sigmas"},
    {"--nodes", "packet.nodes"},
    {"--xmin", "grid.x_min"},
    {"--xmax", "grid.x_max"},
    {"--npoints", "grid.n_points"},
    {"--tmin", "times.t_min"},
    {"--tmax", "times.t_max"},
    {"--tcount", "times.count"},
    {"--points", "figure.points"},
    {"--threads", "threads"},
    {"--output", "output.path"},
    {"--format", "output.format"},
};

void emit(const cli::Table& table, const cli::RunConfig& cfg) {
  auto write = [&](std::ostream& out) {
    if (cfg.format == cli::OutputFormat::Json) {
      cli::write_json(table, out);
    } else {
      cli::write_csv(table, out);
    }
  };
  if (cfg.output_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
  if (!file) throw cli::ConfigError("output.path", 0, "cannot open '" + cfg.output_path + "' for writing");
  write(file);
  if (!file.flush()) throw cli::ConfigError("output.path", 0, "write to '" + cfg.output_path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission/reflection subprocess analysis for the quantum potential step"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", "stepscatter 0.1.0");

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  std::vector<std::string> values(kOverrides.size());
  for (std::size_t i = 0; i < kOverrides.size(); ++i) {
    app.add_option(kOverrides[i].first, values[i], "overrides " + kOverrides[i].second);
  }
  std::vector<std::string> sets;
  app.add_option("--set", sets, "generic override, key=value (repeatable)");

  CLI::App* times = app.add_subcommand("times", "characteristic times over the k grid");
  CLI::App* figure = app.add_subcommand("figure", "figure dataset");
  std::string which;
  figure->add_option("which", which, "fig1 | fig2 | fig3 | fig4")->required();
  CLI::App* evolve = app.add_subcommand("evolve", "wave-packet run with norms, moments and fits");
  CLI::App* validate = app.add_subcommand("validate", "property suite; exit 1 on any failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  cli::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      cfg = cli::parse_config(in);
    }
    for (std::size_t i = 0; i < kOverrides.size(); ++i) {
      if (app.count(kOverrides[i].first) > 0) cli::set_field(cfg, kOverrides[i].second, values[i]);
    }
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw cli::ConfigError("--set", 0, "expected key=value, got '" + s + "'");
      cli::set_field(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cli::validate(cfg);

    if (*times) {
      emit(cli::cmd_times(cfg), cfg);
    } else if (*figure) {
      emit(cli::cmd_figure(cfg, cli::parse_figure(which)), cfg);
    } else if (*evolve) {
      emit(cli::cmd_evolve(cfg), cfg);
    } else if (*validate) {
      const cli::ValidationResult r = cli::cmd_validate(cfg);
      emit(r.table, cfg);
      if (!r.all_pass) {
        std::cerr << "validation failed\n";
        return kValidationFailed;
      }
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const stepscatter::ScatterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == stepscatter::ErrorCode::SpectralGuardViolated) return kSpectralGuard;
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}
