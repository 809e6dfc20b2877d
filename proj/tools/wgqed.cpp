#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgqed/errors.hpp"
#include "wgqed/scenario.hpp"

namespace {

struct Overrides {
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool check = false;
  std::optional<double> dt;
  std::optional<wgqed::Index> grid_points;
  bool no_plots = false;
};

void apply(const Overrides& o, wgqed::ScenarioConfig& config) {
  if (o.dt) config.dt = *o.dt;
  if (o.grid_points) config.grid_points = *o.grid_points;
  if (o.seed && config.noise) config.noise->seed = *o.seed;
}

void report(const wgqed::ScenarioResult& r) {
  std::cout << r.summary.value("name", std::string()) << ": " << r.summary_json.string() << '\n';
  for (const char* key : {"peak_fidelity", "t_peak_fidelity", "fidelity_at_t0", "concurrence_at_t0",
                          "mean_peak_fidelity", "std_peak_fidelity", "fidelity_c_min_after"}) {
    if (r.summary.contains(key))
      std::printf("  %-22s %.6g\n", key, r.summary.at(key).get<double>());
  }
  for (const auto& f : r.failed_checks) std::cout << "  check failed: " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon pulse design for emitter arrays in a waveguide"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory (overrides WGQED_OUT_DIR)");
    sub->add_option("--seed", o.seed, "Noise seed");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--check", o.check, "Exit nonzero if a scenario check fails");
    sub->add_option("--dt", o.dt, "Integrator step (1/Γ)")->check(CLI::PositiveNumber);
    sub->add_option("--grid-points", o.grid_points, "Spectral grid points")->check(CLI::Range(2, 1000000));
    sub->add_flag("--no-plots", o.no_plots, "Skip SVG output");
  };

  std::string target;
  auto* run = app.add_subcommand("run", "Run a config file, a builtin scenario, or 'all'");
  run->add_option("scenario", target, "Config path, builtin name or 'all'")->required();
  add_common(run);

  auto* mc = app.add_subcommand("mc", "Monte-Carlo noise study of a config or builtin");
  mc->add_option("scenario", target, "Config path or builtin name")->required();
  add_common(mc);

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "Render SVG charts for a result directory");
  plot->add_option("dir", plot_dir, "Result directory")->required()->check(CLI::ExistingDirectory);

  auto* list = app.add_subcommand("list", "List builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : wgqed::builtin_names()) std::cout << n << '\n';
      return 0;
    }
    if (plot->parsed()) {
      for (const auto& p : wgqed::emit_plots(plot_dir)) std::cout << p.string() << '\n';
      return 0;
    }

    wgqed::RunOptions options;
    options.out_dir = o.out;
    options.jobs = o.jobs;
    options.plots = !o.no_plots;

    std::vector<wgqed::ScenarioConfig> configs;
    if (run->parsed() && target == "all") {
      for (const auto& n : wgqed::builtin_names()) configs.push_back(wgqed::builtin_scenario(n));
    } else {
      configs.push_back(wgqed::resolve_config(target));
    }

    bool all_passed = true;
    for (auto& config : configs) {
      apply(o, config);
      const bool monte_carlo = mc->parsed() || config.noise.has_value();
      const auto result = monte_carlo ? wgqed::run_monte_carlo(config, options)
                                      : wgqed::run_scenario(config, options);
      report(result);
      all_passed = all_passed && result.passed();
    }
    return o.check && !all_passed ? 1 : 0;
  } catch (const wgqed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
