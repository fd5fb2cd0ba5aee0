#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "sse/errors.hpp"
#include "sse/parallel.hpp"
#include "sse/version.hpp"

namespace {

using namespace sse::cli;

struct Flags {
  ModelOptions model;
  std::vector<double> omega;
  std::string omega_grid;
  std::string omega_units = "sse";
  std::vector<std::size_t> n_list;
  std::optional<double> t_max_tr;
  std::size_t ensemble = 200;
  std::uint64_t seed = 1;
  std::string init = "random";
  double temperature = 1.0;
  std::size_t realizations = 64;
  double dt = 0.0;
  double t_max_gamma = 400.0;
  bool threshold = false;
  bool no_full = false;
  bool svg = false;
  std::string config;
};

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--n-bath", f.model.n_bath, "bath size N (default 400)");
  sub->add_option("--delta-omega", f.model.delta_omega, "bath spacing (default 1/N)");
  sub->add_option("--g", f.model.g, "head-bath coupling");
  sub->add_option("--gamma", f.model.gamma, "decay rate; sets g = sqrt(gamma dw / pi) (default 0.02)");
  sub->add_option("--omega0", f.model.omega0, "carrier frequency");
  sub->add_option("--omega", f.omega, "coupling values")->delimiter(',');
  sub->add_option("--omega-grid", f.omega_grid, "coupling grid lo:hi:count");
  sub->add_option("--omega-units", f.omega_units, "sse (multiples of gamma/sqrt2) or abs")
      ->check(CLI::IsMember({"sse", "abs"}));
  sub->add_option("--n-list", f.n_list, "bath sizes for multi-N runs")->delimiter(',');
  sub->add_option("--t-max-tr", f.t_max_tr, "averaging horizon in return times");
  sub->add_option("--ensemble", f.ensemble, "random-phase states per point");
  sub->add_option("--seed", f.seed, "ensemble and noise seed");
  sub->add_option("--init", f.init, "initial state")
      ->check(CLI::IsMember({"random", "unit", "eigenplus"}));
  sub->add_option("--temperature", f.temperature, "noise temperature");
  sub->add_option("--realizations", f.realizations, "noise realizations");
  sub->add_option("--dt", f.dt, "SDE step (0 picks 5e-3/max(gamma, Omega))");
  sub->add_option("--t-max-gamma", f.t_max_gamma, "noise horizon in units of 1/gamma");
  sub->add_flag("--threshold", f.threshold, "also bisect for the split threshold");
  sub->add_flag("--no-full", f.no_full, "skip the ensemble column of the estimator");
  sub->add_flag("--svg", f.svg, "emit SVG plots next to the data");
  sub->add_option("--config", f.config, "start from a saved config or manifest");
}

RunConfig resolve(Command cmd, const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
    if (c.command != cmd) throw sse::InvalidArgument("config is for command " + to_string(c.command));
    return c;
  }
  c.command = cmd;
  c.params = resolve_params(f.model);
  if (!f.omega.empty() && !f.omega_grid.empty())
    throw sse::InvalidArgument("give either --omega or --omega-grid, not both");
  std::vector<double> w;
  if (!f.omega.empty()) {
    w = f.omega;
  } else if (!f.omega_grid.empty()) {
    w = parse_grid(f.omega_grid);
  } else {
    if (f.omega_units == "abs") throw sse::InvalidArgument("abs units need an explicit Omega list");
    w = default_omegas_sse(cmd);
  }
  c.omegas = resolve_omegas(std::move(w), f.omega_units, c.params);
  c.params.omega_big = c.omegas.empty() ? 0.0 : c.omegas.front();
  c.n_list = f.n_list;
  c.t_max_tr = f.t_max_tr.value_or(default_t_max_tr(cmd));
  c.ensemble = f.ensemble;
  c.seed = f.seed;
  c.init = init_from_string(f.init);
  c.temperature = f.temperature;
  c.realizations = f.realizations;
  c.noise_dt = f.dt;
  c.t_max_gamma = f.t_max_gamma;
  c.threshold = f.threshold;
  c.full_ratio = !f.no_full;
  c.svg = f.svg;
  c.validate();
  return c;
}

int execute(const RunConfig& c, const std::string& out_dir, bool quiet) {
  const unsigned threads = sse::threads_from_env();
  RunOutput out(out_dir, c);
  const Progress progress = [quiet](const std::string& msg) {
    if (!quiet) std::cerr << "[sse_lab] " << msg << '\n';
  };
  const auto results = run(c, out, threads, progress);
  for (const auto& w : out.warnings()) std::cerr << "[sse_lab] warning: " << w << '\n';
  nlohmann::json summary{{"command", to_string(c.command)},
                         {"config_hash", out.hash()},
                         {"out_dir", out_dir},
                         {"outputs", out.files()},
                         {"warnings", out.warnings()},
                         {"results", results}};
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral and dynamical experiments on two oscillators coupled through a finite bath"};
  app.set_version_flag("--version", std::string(sse::version_string));
  app.require_subcommand(1);
  std::string out_dir = "out";
  bool quiet = false;
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_flag("-q,--quiet", quiet, "no progress on stderr");

  const std::pair<Command, const char*> commands[] = {
      {Command::eigenprofile, "eigenstate component profiles and peak features"},
      {Command::ratio_sweep, "time-averaged amplitude ratio over Omega"},
      {Command::scaling_study, "ratio curves for several bath sizes"},
      {Command::nh_compare, "full vs reduced two-mode dynamics"},
      {Command::noise_spectrum, "stochastic two-mode spectra and split onset"},
      {Command::estimator, "mode-sum estimators of the amplitude ratio"},
  };
  Flags flags;
  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, help] : commands) {
    auto* sub = app.add_subcommand(to_string(cmd), help);
    add_run_flags(sub, flags);
    subs.emplace_back(cmd, sub);
  }
  std::string manifest;
  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("manifest", manifest, "manifest.json of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) return execute(load_config(manifest), out_dir, quiet);
    for (const auto& [cmd, sub] : subs)
      if (sub->parsed()) return execute(resolve(cmd, flags), out_dir, quiet);
  } catch (const sse::InvalidArgument& e) {
    std::cerr << "sse_lab: config error: " << e.what() << '\n';
    return 2;
  } catch (const sse::NumericalError& e) {
    std::cerr << "sse_lab: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const sse::IoError& e) {
    std::cerr << "sse_lab: I/O error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "sse_lab: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
