// Command-line front end: runs verification suites over a scenario config
// and exports the derived generator scalars.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tbg/report.hpp"

namespace {

int cmd_run(const std::string& config, const std::string& suite, const std::string& json_path,
            const std::uint64_t* seed, const double* tol_scale) {
  tbg::Scenario sc = tbg::load_scenario(config);
  if (seed) sc.grid.seed = *seed;
  if (tol_scale) {
    if (*tol_scale <= 0.0) throw tbg::ConfigError("--tol-scale must be positive");
    sc.tol_scale = *tol_scale;
  }
  tbg::Report rep = tbg::run_suites(sc, suite);
  std::cout << tbg::render_text(rep);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw tbg::ConfigError("cannot open '" + json_path + "' for writing");
    out << tbg::render_json(rep);
  }
  return rep.pass ? 0 : 1;
}

int cmd_scalars(const std::string& config, double t_min, double t_max, int steps,
                const std::string& out_path) {
  tbg::Scenario sc = tbg::load_scenario(config);
  tbg::GNaturalGenerators gen = tbg::make_generators(sc);
  std::string csv = tbg::scalars_csv(gen, t_min, t_max, steps);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw tbg::ConfigError("cannot open '" + out_path + "' for writing");
    out << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tangent-bundle geometry checks"};
  app.require_subcommand(1);

  std::string config, suite = "all", json_path, out_path;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  bool seed_set = false, tol_set = false;
  double t_min = 0.0, t_max = 10.0;
  int steps = 101;

  CLI::App* run = app.add_subcommand("run", "evaluate verification suites");
  run->add_option("--config", config, "scenario config file")->required();
  run->add_option("--suite", suite, "metric|lemmas|normals|frames|shape|theorem|all");
  run->add_option("--json", json_path, "write the report as JSON to this path");
  run->add_option("--seed", seed, "override the sampling seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--tol-scale", tol_scale, "scale every gating tolerance")
      ->each([&](const std::string&) { tol_set = true; });

  CLI::App* scalars = app.add_subcommand("scalars", "export generator scalars as CSV");
  scalars->add_option("--config", config, "scenario config file")->required();
  scalars->add_option("--t-min", t_min, "start of the t grid");
  scalars->add_option("--t-max", t_max, "end of the t grid");
  scalars->add_option("--steps", steps, "number of grid rows");
  scalars->add_option("--out", out_path, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(config, suite, json_path, seed_set ? &seed : nullptr,
                     tol_set ? &tol_scale : nullptr);
    return cmd_scalars(config, t_min, t_max, steps, out_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const tbg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
