#pragma once

// Experiment runner: config → designed pulse → dynamics → metrics → files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgqed/dynamics.hpp"
#include "wgqed/metrics.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

enum class TargetKind { symmetric, antisymmetric, timed_dicke, explicit_amplitudes };

struct CoarseSampling {
  Index points = 20;
  double lo = -2.5;
  double hi = 2.5;
};

struct RamanSpec {
  double t_pi = 10.0;
  double delta = 0.1;
};

/// Pass window [min, max] for one summary metric. `metric` names a summary
/// key, optionally indexed: "re_a_at_t0[1]".
struct Check {
  std::string metric;
  double min = -1e300;
  double max = 1e300;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<double> positions;  // in units of λ
  double lambda = 0.05;           // in v_g/Γ
  TargetKind target = TargetKind::symmetric;
  std::vector<cdouble> amplitudes;  // for explicit targets
  double t0 = 15.0;
  double t_end = 20.0;
  double gamma_free = 0.0;
  double grid_half_width = 10.0;
  Index grid_points = 2001;
  std::optional<CoarseSampling> sampling;
  std::optional<NoiseSpec> noise;
  std::optional<RamanSpec> raman;
  double dt = 1e-3;
  bool retardation = true;
  std::string outputs;  // output directory; empty → default
  std::vector<Check> checks;

  void validate() const;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig load_config(const std::filesystem::path& path);

std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

/// Builtin name or path to a JSON config file.
ScenarioConfig resolve_config(const std::string& name_or_path);

struct RunOptions {
  std::filesystem::path out_dir;  // parent directory; results go to out_dir/<name>
  int jobs = 1;
  bool plots = true;
};

/// Output root: explicit option, else the config's `outputs`, else
/// $WGQED_OUT_DIR, else "results".
std::filesystem::path output_root(const ScenarioConfig& config, const RunOptions& options);

struct ScenarioResult {
  std::filesystem::path dir;
  std::filesystem::path trajectory_csv;
  std::filesystem::path spectrum_csv;
  std::filesystem::path output_spectrum_csv;  // empty for comb (coarse) inputs
  std::filesystem::path summary_json;
  std::vector<std::filesystem::path> svgs;
  nlohmann::json summary;
  std::vector<std::string> failed_checks;

  // In-memory copies of what was written.
  EmitterArray array{std::vector<double>{0.0}, PhysicalParams{}};
  DirectionalSpectrum designed;  // time-reversed input on the full grid
  DirectionalSpectrum drive;     // what was injected (designed or coarse-sampled)
  Trajectory trajectory;
  VectorXd fidelity;    // against the target, from a(t)
  VectorXd fidelity_c;  // from c(t); empty without a Raman pulse
  VectorXd concurrence; // from a(t); empty unless two emitters

  bool passed() const { return failed_checks.empty(); }
};

/// Evaluates `checks` against a summary; returns a description of each failure.
std::vector<std::string> evaluate_checks(const std::vector<Check>& checks,
                                         const nlohmann::json& summary);

/// Nominal run (noise settings are not applied).
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

/// Nominal run plus `noise.trials` perturbed runs; summary is mc.json.
ScenarioResult run_monte_carlo(const ScenarioConfig& config, const RunOptions& options);

/// Renders SVG charts for a result directory written by run_scenario or
/// run_monte_carlo. Throws without writing anything if inputs are missing or empty.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& result_dir);

}  // namespace wgqed
