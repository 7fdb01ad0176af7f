#include <CLI11.hpp>

#include "floquet/cli.hpp"

int main(int argc, char** argv) {
  using namespace floquet;
  cli::RunConfig cfg;
  CLI::App app{"Floquet-Bloch analysis of periodic graph operators"};
  app.set_version_flag("--version", cli::version);
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<double> shift;
  std::optional<int> grid;
  app.add_option("--op", cfg.op_path, "operator JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--shift", shift, "override the energy shift (P is replaced by P - X)");
  app.add_option("--grid", grid, "k-grid points per axis for Fermi scans")->check(CLI::Range(8, 4096));
  app.add_option("--N-max", cfg.N_max, "largest polynomial order")->check(CLI::NonNegativeNumber);
  app.add_option("--window", cfg.window, "window radius R for solution checks")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed of randomized sub-checks");
  app.add_option("--out", cfg.out_dir, "output directory");

  std::map<CLI::App*, cli::Command> subs;
  const std::map<std::string, std::string> help{
      {"validate", "check an operator file"},
      {"bands", "band functions along a k-path (bands.csv)"},
      {"fermi", "real Fermi surface"},
      {"local", "local spectral data r, l0, lambda_l0 at each Fermi point"},
      {"dim", "Liouville dimensions d_N"},
      {"solutions", "explicit Floquet solutions (solutions.json)"},
      {"lambda", "principal eigenvalue profile Lambda(xi) and Lambda_0"},
      {"classify", "vacuous / noncritical / critical classification"}};
  for (const auto& [name, cmd] : cli::command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    subs[sub] = cmd;
    if (cmd == cli::Command::bands) {
      sub->add_option("--path", cfg.path, "waypoints 'k;k;...', coordinates comma separated, 'pi/2' style allowed");
      sub->add_option("--samples", cfg.samples, "samples per segment")->check(CLI::PositiveNumber);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  for (const auto& [sub, cmd] : subs)
    if (sub->parsed()) cfg.command = cmd;
  cfg.energy_shift = shift;
  cfg.grid_res = grid;
  return cli::run(cfg);
}
