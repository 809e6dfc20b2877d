#include "wgqed/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "wgqed/errors.hpp"
#include "wgqed/io.hpp"
#include "wgqed/spectrum.hpp"
#include "wgqed/svg.hpp"

namespace wgqed {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, TargetKind>& target_names() {
  static const std::map<std::string, TargetKind> names{
      {"symmetric", TargetKind::symmetric},
      {"antisymmetric", TargetKind::antisymmetric},
      {"timed_dicke", TargetKind::timed_dicke},
      {"explicit", TargetKind::explicit_amplitudes}};
  return names;
}

std::string target_name(TargetKind kind) {
  for (const auto& [name, k] : target_names())
    if (k == kind) return name;
  return "symmetric";
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json real_parts(const VectorXcd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i).real());
  return out;
}

json imag_parts(const VectorXcd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i).imag());
  return out;
}

std::vector<double> ten_emitter_positions() {
  std::vector<double> r;
  for (int j = 1; j <= 10; ++j) r.push_back(-1.125 + 0.25 * j);
  return r;
}

Check window(const std::string& metric, double centre, double tol) {
  return {metric, centre - tol, centre + tol};
}

ScenarioConfig fig2_base(const std::string& name, TargetKind target) {
  ScenarioConfig c;
  c.name = name;
  c.positions = {-0.125, 0.125};
  c.target = target;
  c.t0 = 15.0;
  c.t_end = 20.0;
  return c;
}

struct Built {
  EmitterArray array;
  TargetState target;
};

Built build(const ScenarioConfig& config) {
  PhysicalParams params;
  params.gamma_free = config.gamma_free;
  params.lambda_a = config.lambda;
  EmitterArray array(std::span<const double>(config.positions), params);
  const Index n = array.size();
  switch (config.target) {
    case TargetKind::symmetric:
      return {array, dicke_target(n, std::vector<int>(static_cast<std::size_t>(n), 1))};
    case TargetKind::antisymmetric: {
      std::vector<int> signs(static_cast<std::size_t>(n));
      for (std::size_t j = 0; j < signs.size(); ++j) signs[j] = j % 2 == 0 ? 1 : -1;
      return {array, dicke_target(n, signs)};
    }
    case TargetKind::timed_dicke:
      return {array, timed_dicke_target(array)};
    case TargetKind::explicit_amplitudes: {
      if (static_cast<Index>(config.amplitudes.size()) != n)
        throw ConfigError("explicit target needs one amplitude per emitter");
      VectorXcd amps(n);
      for (Index j = 0; j < n; ++j) amps(j) = config.amplitudes[static_cast<std::size_t>(j)];
      return {array, TargetState(amps)};
    }
  }
  throw ConfigError("unknown target kind");
}

VectorXd fidelity_series(const MatrixXcd& amps, const TargetState& target) {
  VectorXd f(amps.rows());
  for (Index s = 0; s < amps.rows(); ++s) f(s) = fidelity(amps.row(s).transpose(), target);
  return f;
}

struct Peak {
  double value = 0.0;
  double time = 0.0;
};

Peak peak_over(const VectorXd& series, const Trajectory& traj, const std::vector<Index>& rows) {
  Peak p{-1.0, 0.0};
  for (Index r : rows)
    if (series(r) > p.value) p = {series(r), traj.times(r)};
  return p;
}

/// Checks whose metric is absent from the summary are reported as failures.
std::optional<double> lookup_metric(const json& summary, const std::string& metric) {
  std::string key = metric;
  std::optional<std::size_t> index;
  if (const auto open = metric.find('['); open != std::string::npos && metric.back() == ']') {
    key = metric.substr(0, open);
    index = std::stoul(metric.substr(open + 1, metric.size() - open - 2));
  }
  if (!summary.contains(key)) return std::nullopt;
  const json& v = summary.at(key);
  if (index) {
    if (!v.is_array() || *index >= v.size() || !v.at(*index).is_number()) return std::nullopt;
    return v.at(*index).get<double>();
  }
  if (!v.is_number()) return std::nullopt;
  return v.get<double>();
}

template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("scenario name must not be empty");
  if (name.find('/') != std::string::npos) throw ConfigError("scenario name must not contain '/'");
  if (positions.empty()) throw ConfigError("geometry.positions must list at least one emitter");
  if (!(lambda > 0)) throw ConfigError("geometry.lambda must be > 0");
  if (!(t_end > t0)) throw ConfigError("t_end must exceed t0");
  if (!(t0 >= 0)) throw ConfigError("t0 must be >= 0");
  if (!(gamma_free >= 0)) throw ConfigError("gamma_free must be >= 0");
  if (!(grid_half_width > 0) || grid_points < 2) throw ConfigError("grid needs half_width > 0 and points >= 2");
  if (!(dt > 0)) throw ConfigError("integrator.dt must be > 0");
  if (sampling) {
    if (sampling->points < 2) throw ConfigError("sampling.points must be >= 2");
    if (!(sampling->hi > sampling->lo) || sampling->lo < -grid_half_width ||
        sampling->hi > grid_half_width)
      throw ConfigError("sampling.extent must lie inside the grid");
  }
  if (raman && !(raman->delta > 0)) throw ConfigError("raman.delta must be > 0");
  if (noise) {
    try {
      noise->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"name", "geometry", "target", "t0", "t_end", "gamma_free", "grid", "sampling",
                  "noise", "raman", "integrator", "outputs", "checks"},
                 "config");
  ScenarioConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  if (!j.contains("geometry")) throw ConfigError("config needs a geometry section");
  const json& g = j.at("geometry");
  reject_unknown(g, {"positions", "lambda"}, "geometry");
  c.positions = get_or<std::vector<double>>(g, "positions", {});
  c.lambda = get_or<double>(g, "lambda", c.lambda);

  if (j.contains("target")) {
    const json& t = j.at("target");
    std::string kind;
    if (t.is_string()) {
      kind = t.get<std::string>();
    } else if (t.is_object()) {
      reject_unknown(t, {"kind", "amplitudes"}, "target");
      kind = get_or<std::string>(t, "kind", "");
      if (t.contains("amplitudes")) {
        for (const auto& a : t.at("amplitudes")) {
          if (!a.is_array() || a.size() != 2)
            throw ConfigError("target.amplitudes entries must be [re, im] pairs");
          c.amplitudes.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        }
      }
    } else {
      throw ConfigError("target must be a string or an object");
    }
    const auto it = target_names().find(kind);
    if (it == target_names().end()) throw ConfigError("unknown target kind '" + kind + "'");
    c.target = it->second;
  }

  c.t0 = get_or<double>(j, "t0", c.t0);
  c.t_end = get_or<double>(j, "t_end", c.t_end);
  c.gamma_free = get_or<double>(j, "gamma_free", c.gamma_free);
  if (j.contains("grid")) {
    const json& gr = j.at("grid");
    reject_unknown(gr, {"half_width", "points"}, "grid");
    c.grid_half_width = get_or<double>(gr, "half_width", c.grid_half_width);
    c.grid_points = get_or<Index>(gr, "points", c.grid_points);
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    const std::string kind = s.is_string() ? s.get<std::string>() : get_or<std::string>(s, "kind", "");
    if (kind == "coarse") {
      reject_unknown(s, {"kind", "points", "extent"}, "sampling");
      CoarseSampling cs;
      cs.points = get_or<Index>(s, "points", cs.points);
      const auto extent = get_or<std::vector<double>>(s, "extent", {cs.lo, cs.hi});
      if (extent.size() != 2) throw ConfigError("sampling.extent must be [lo, hi]");
      cs.lo = extent[0];
      cs.hi = extent[1];
      c.sampling = cs;
    } else if (kind != "none") {
      throw ConfigError("sampling.kind must be 'none' or 'coarse'");
    }
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, {"spectrum_rel", "position_rel", "seed", "trials", "law"}, "noise");
    NoiseSpec ns;
    ns.spectrum_rel = get_or<double>(n, "spectrum_rel", 0.0);
    ns.position_rel = get_or<double>(n, "position_rel", 0.0);
    ns.seed = get_or<std::uint64_t>(n, "seed", ns.seed);
    ns.trials = get_or<int>(n, "trials", ns.trials);
    const auto law = get_or<std::string>(n, "law", "uniform");
    if (law == "uniform")
      ns.law = NoiseLaw::uniform;
    else if (law == "gaussian")
      ns.law = NoiseLaw::gaussian;
    else
      throw ConfigError("noise.law must be 'uniform' or 'gaussian'");
    c.noise = ns;
  }
  if (j.contains("raman")) {
    const json& r = j.at("raman");
    reject_unknown(r, {"t_pi", "delta"}, "raman");
    RamanSpec rs;
    rs.t_pi = get_or<double>(r, "t_pi", rs.t_pi);
    rs.delta = get_or<double>(r, "delta", rs.delta);
    c.raman = rs;
  }
  if (j.contains("integrator")) {
    const json& in = j.at("integrator");
    reject_unknown(in, {"dt", "retardation"}, "integrator");
    c.dt = get_or<double>(in, "dt", c.dt);
    c.retardation = get_or<bool>(in, "retardation", c.retardation);
  }
  c.outputs = get_or<std::string>(j, "outputs", "");
  if (j.contains("checks")) {
    for (const auto& ch : j.at("checks")) {
      reject_unknown(ch, {"metric", "min", "max"}, "checks entry");
      Check k;
      k.metric = get_or<std::string>(ch, "metric", "");
      k.min = get_or<double>(ch, "min", k.min);
      k.max = get_or<double>(ch, "max", k.max);
      if (k.metric.empty()) throw ConfigError("checks entries need a metric");
      c.checks.push_back(k);
    }
  }
  c.validate();
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["geometry"] = {{"positions", c.positions}, {"lambda", c.lambda}};
  if (c.target == TargetKind::explicit_amplitudes) {
    json amps = json::array();
    for (const auto& a : c.amplitudes) amps.push_back({a.real(), a.imag()});
    j["target"] = {{"kind", "explicit"}, {"amplitudes", amps}};
  } else {
    j["target"] = target_name(c.target);
  }
  j["t0"] = c.t0;
  j["t_end"] = c.t_end;
  j["gamma_free"] = c.gamma_free;
  j["grid"] = {{"half_width", c.grid_half_width}, {"points", c.grid_points}};
  if (c.sampling)
    j["sampling"] = {{"kind", "coarse"},
                     {"points", c.sampling->points},
                     {"extent", {c.sampling->lo, c.sampling->hi}}};
  if (c.noise)
    j["noise"] = {{"spectrum_rel", c.noise->spectrum_rel},
                  {"position_rel", c.noise->position_rel},
                  {"seed", c.noise->seed},
                  {"trials", c.noise->trials},
                  {"law", c.noise->law == NoiseLaw::uniform ? "uniform" : "gaussian"}};
  if (c.raman) j["raman"] = {{"t_pi", c.raman->t_pi}, {"delta", c.raman->delta}};
  j["integrator"] = {{"dt", c.dt}, {"retardation", c.retardation}};
  if (!c.outputs.empty()) j["outputs"] = c.outputs;
  if (!c.checks.empty()) {
    json checks = json::array();
    for (const auto& k : c.checks) checks.push_back({{"metric", k.metric}, {"min", k.min}, {"max", k.max}});
    j["checks"] = checks;
  }
  return j;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> builtin_names() {
  return {"fig2-symmetric",           "fig2-symmetric-lossy",      "fig2-symmetric-coarse",
          "fig2-antisymmetric",       "fig2-antisymmetric-lossy",  "fig2-antisymmetric-coarse",
          "fig2-timed-dicke",         "fig2-timed-dicke-lossy",    "fig2-timed-dicke-coarse",
          "fig3-timed-dicke-10",      "fig3-timed-dicke-10-noisy", "fig4-raman"};
}

bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

ScenarioConfig builtin_scenario(const std::string& name) {
  const double lossy = 0.2;
  if (name == "fig2-symmetric") {
    auto c = fig2_base(name, TargetKind::symmetric);
    c.checks = {window("re_a_at_t0[0]", 0.70, 0.02), window("re_a_at_t0[1]", 0.70, 0.02),
                window("im_a_at_t0[0]", 0.0, 0.02),  window("im_a_at_t0[1]", 0.0, 0.02),
                {"peak_fidelity", 0.98, 1.0 + 1e-9}, window("concurrence_at_t0", 0.94, 0.03)};
    return c;
  }
  if (name == "fig2-symmetric-lossy") {
    auto c = fig2_base(name, TargetKind::symmetric);
    c.gamma_free = lossy;
    c.checks = {window("peak_fidelity", 0.90, 0.03), window("concurrence_at_t0", 0.76, 0.04)};
    return c;
  }
  if (name == "fig2-symmetric-coarse") {
    auto c = fig2_base(name, TargetKind::symmetric);
    c.sampling = CoarseSampling{};
    c.checks = {window("peak_fidelity", 0.90, 0.03), window("concurrence_at_t0", 0.75, 0.04)};
    return c;
  }
  if (name == "fig2-antisymmetric") {
    auto c = fig2_base(name, TargetKind::antisymmetric);
    c.checks = {window("peak_fidelity", 0.98, 0.01)};
    return c;
  }
  if (name == "fig2-antisymmetric-lossy") {
    auto c = fig2_base(name, TargetKind::antisymmetric);
    c.gamma_free = lossy;
    c.checks = {window("peak_fidelity", 0.90, 0.03)};
    return c;
  }
  if (name == "fig2-antisymmetric-coarse") {
    auto c = fig2_base(name, TargetKind::antisymmetric);
    c.sampling = CoarseSampling{};
    c.checks = {window("peak_fidelity", 0.90, 0.03)};
    return c;
  }
  if (name == "fig2-timed-dicke") {
    auto c = fig2_base(name, TargetKind::timed_dicke);
    c.checks = {window("re_a_at_t0[0]", 0.492, 0.01), window("im_a_at_t0[0]", -0.492, 0.01),
                window("re_a_at_t0[1]", 0.492, 0.01), window("im_a_at_t0[1]", 0.492, 0.01),
                window("fidelity_at_t0", 0.985, 0.01)};
    return c;
  }
  if (name == "fig2-timed-dicke-lossy") {
    auto c = fig2_base(name, TargetKind::timed_dicke);
    c.gamma_free = lossy;
    c.checks = {window("peak_fidelity", 0.90, 0.03)};
    return c;
  }
  if (name == "fig2-timed-dicke-coarse") {
    auto c = fig2_base(name, TargetKind::timed_dicke);
    c.sampling = CoarseSampling{};
    c.checks = {window("peak_fidelity", 0.87, 0.03)};
    return c;
  }
  if (name == "fig3-timed-dicke-10" || name == "fig3-timed-dicke-10-noisy") {
    ScenarioConfig c;
    c.name = name;
    c.positions = ten_emitter_positions();
    c.target = TargetKind::timed_dicke;
    c.t0 = 20.0;
    c.t_end = 25.0;
    if (name == "fig3-timed-dicke-10") {
      c.checks = {window("peak_fidelity", 0.96, 0.02), window("t_peak_fidelity", 20.0, 0.5),
                  {"directionality", 5.0, 1e300}};
    } else {
      NoiseSpec noise;
      noise.spectrum_rel = 0.10;
      noise.position_rel = 0.10;
      noise.seed = 1;
      noise.trials = 32;
      c.noise = noise;
      c.checks = {window("mean_peak_fidelity", 0.96, 0.03)};
    }
    return c;
  }
  if (name == "fig4-raman") {
    ScenarioConfig c;
    c.name = name;
    c.positions = {-0.125, 0.125};
    c.target = TargetKind::antisymmetric;
    c.t0 = 10.0;
    c.t_end = 15.0;
    c.raman = RamanSpec{10.0, 0.1};
    c.checks = {{"fidelity_c_min_after", 0.95, 1e300}, {"fidelity_a_max_after", -1e300, 0.1}};
    return c;
  }
  throw ConfigError("unknown builtin scenario '" + name + "'");
}

ScenarioConfig resolve_config(const std::string& name_or_path) {
  if (is_builtin(name_or_path)) return builtin_scenario(name_or_path);
  if (fs::exists(name_or_path)) return load_config(name_or_path);
  throw ConfigError("'" + name_or_path + "' is neither a builtin scenario nor a config file");
}

fs::path output_root(const ScenarioConfig& config, const RunOptions& options) {
  if (!options.out_dir.empty()) return options.out_dir;
  if (!config.outputs.empty()) return config.outputs;
  if (const char* env = std::getenv("WGQED_OUT_DIR"); env && *env) return env;
  return "results";
}

std::vector<std::string> evaluate_checks(const std::vector<Check>& checks, const json& summary) {
  std::vector<std::string> failures;
  for (const auto& ch : checks) {
    const auto v = lookup_metric(summary, ch.metric);
    std::ostringstream msg;
    if (!v) {
      msg << ch.metric << ": not in summary";
      failures.push_back(msg.str());
    } else if (!(*v >= ch.min && *v <= ch.max)) {
      msg << ch.metric << " = " << *v << " outside [" << ch.min << ", " << ch.max << "]";
      failures.push_back(msg.str());
    }
  }
  return failures;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  auto [array, target] = build(config);
  const Index n = array.size();
  const auto grid = SpectralGrid::symmetric(config.grid_half_width, config.grid_points);

  ScenarioResult res;
  res.array = array;
  res.designed = time_reversed_input(array, target, grid, config.t0);
  res.drive = config.sampling ? coarse_sample(res.designed, config.sampling->points,
                                              config.sampling->lo, config.sampling->hi)
                              : res.designed;

  DriveSchedule schedule{res.drive, std::nullopt};
  if (config.raman) schedule.raman = RamanPulse{config.raman->t_pi, config.raman->delta};
  IntegratorConfig ic;
  ic.dt = config.dt;
  ic.t_end = config.t_end;
  ic.retardation = config.retardation;
  res.trajectory = evolve(array, schedule, EmitterState::ground(n), ic);
  const Trajectory& traj = res.trajectory;

  res.fidelity = fidelity_series(traj.a, target);
  if (config.raman) res.fidelity_c = fidelity_series(traj.c, target);
  if (n == 2) {
    res.concurrence.resize(traj.steps());
    for (Index s = 0; s < traj.steps(); ++s) res.concurrence(s) = concurrence_two(traj.a.row(s).transpose());
  }

  const auto rows = decimated_rows(traj.steps(), decimation_stride(traj.steps()));
  const Index at_t0 = traj.index_at(config.t0);
  const Peak peak = peak_over(res.fidelity, traj, rows);
  const VectorXcd a_t0 = traj.a.row(at_t0).transpose();

  json s;
  s["name"] = config.name;
  s["n_emitters"] = n;
  s["t0"] = config.t0;
  s["t_end"] = config.t_end;
  s["gamma_free"] = config.gamma_free;
  s["dt"] = config.dt;
  s["grid_points"] = config.grid_points;
  s["grid_half_width"] = config.grid_half_width;
  s["coarse_points"] = config.sampling ? json(config.sampling->points) : json(nullptr);
  s["peak_fidelity"] = peak.value;
  s["t_peak_fidelity"] = peak.time;
  s["fidelity_at_t0"] = res.fidelity(at_t0);
  s["re_a_at_t0"] = real_parts(a_t0);
  s["im_a_at_t0"] = imag_parts(a_t0);
  s["target_re"] = real_parts(target.amps());
  s["target_im"] = imag_parts(target.amps());
  if (n == 2) {
    s["concurrence_at_t0"] = res.concurrence(at_t0);
    s["concurrence_at_peak"] = res.concurrence(traj.index_at(peak.time));
  }
  const double norm_r = branch_norm(res.designed.grid, res.designed.right);
  const double norm_l = branch_norm(res.designed.grid, res.designed.left);
  s["designed_norm_right"] = norm_r;
  s["designed_norm_left"] = norm_l;
  s["directionality"] = std::max(norm_r, norm_l) / std::max(std::min(norm_r, norm_l), 1e-300);
  s["input_norm"] = spectral_norm(res.drive);
  s["final_population_a"] = traj.a.row(traj.steps() - 1).squaredNorm();
  s["final_population_c"] = traj.c.row(traj.steps() - 1).squaredNorm();

  if (config.raman) {
    const double hold_from = config.raman->t_pi + 1.0;
    double min_c = 1e300, max_a = -1e300;
    for (Index r : rows) {
      if (traj.times(r) < hold_from - 1e-9) continue;
      min_c = std::min(min_c, res.fidelity_c(r));
      max_a = std::max(max_a, res.fidelity(r));
    }
    s["hold_from"] = hold_from;
    s["peak_fidelity_c"] = peak_over(res.fidelity_c, traj, rows).value;
    s["fidelity_c_min_after"] = min_c;
    s["fidelity_a_max_after"] = max_a;
  }

  res.dir = output_root(config, options) / config.name;
  fs::create_directories(res.dir);
  res.spectrum_csv = res.dir / "spectrum.csv";
  write_spectrum_csv(res.spectrum_csv, res.drive);
  if (!config.sampling) {
    // A finite comb is not a normalizable continuum wavepacket, so no
    // output spectrum or excitation balance is reported for coarse inputs.
    const DirectionalSpectrum out = output_spectrum(traj, array, res.drive, grid);
    const double out_norm = spectral_norm(out);
    s["output_norm"] = out_norm;
    s["excitation_balance"] = traj.back().population() + out_norm;
    res.output_spectrum_csv = res.dir / "output_spectrum.csv";
    write_spectrum_csv(res.output_spectrum_csv, out);
  }

  std::vector<NamedColumn> extra{{"fidelity", res.fidelity}};
  if (config.raman) extra.emplace_back("fidelity_c", res.fidelity_c);
  if (n == 2) extra.emplace_back("concurrence", res.concurrence);
  res.trajectory_csv = res.dir / "trajectory.csv";
  write_trajectory_csv(res.trajectory_csv, traj, rows, extra);

  res.failed_checks = evaluate_checks(config.checks, s);
  s["checks_passed"] = res.failed_checks.empty();
  res.summary = s;
  res.summary_json = res.dir / "summary.json";
  write_json(res.summary_json, s);
  write_json(res.dir / "config.json", config_to_json(config));

  if (options.plots) res.svgs = emit_plots(res.dir);
  return res;
}

ScenarioResult run_monte_carlo(const ScenarioConfig& config, const RunOptions& options) {
  if (!config.noise) throw ConfigError("monte carlo run needs a noise section");
  const NoiseSpec& noise = *config.noise;

  RunOptions nominal_opts = options;
  nominal_opts.plots = false;
  ScenarioConfig nominal_cfg = config;
  nominal_cfg.checks.clear();
  ScenarioResult res = run_scenario(nominal_cfg, nominal_opts);
  const TargetState target = build(config).target;
  const Index n = res.array.size();
  const Trajectory& nominal = res.trajectory;
  const auto rows = decimated_rows(nominal.steps(), decimation_stride(nominal.steps()));
  const Index at_t0 = nominal.index_at(config.t0);

  IntegratorConfig ic;
  ic.dt = config.dt;
  ic.t_end = config.t_end;
  ic.retardation = config.retardation;
  std::optional<RamanPulse> raman;
  if (config.raman) raman = RamanPulse{config.raman->t_pi, config.raman->delta};

  struct Trial {
    Peak peak;
    double fidelity_at_t0 = 0.0;
    VectorXcd a_t0;
    VectorXd fidelity_rows;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(noise.trials));
  parallel_for(noise.trials, options.jobs, [&](int i) {
    Rng rng = trial_rng(noise.seed, static_cast<std::uint64_t>(i));
    const DirectionalSpectrum drive = perturb_spectrum(res.drive, noise, rng);
    const EmitterArray array = perturb_positions(res.array, noise, rng);
    const Trajectory traj = evolve(array, DriveSchedule{drive, raman}, EmitterState::ground(n), ic);
    const VectorXd f = fidelity_series(traj.a, target);
    Trial& t = trials[static_cast<std::size_t>(i)];
    t.peak = peak_over(f, traj, rows);
    t.fidelity_at_t0 = f(at_t0);
    t.a_t0 = traj.a.row(at_t0).transpose();
    t.fidelity_rows.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) t.fidelity_rows(static_cast<Index>(r)) = f(rows[r]);
  });

  const auto count = static_cast<double>(trials.size());
  double mean = 0.0, mean_t0 = 0.0;
  for (const auto& t : trials) {
    mean += t.peak.value;
    mean_t0 += t.fidelity_at_t0;
  }
  mean /= count;
  mean_t0 /= count;
  double var = 0.0;
  for (const auto& t : trials) var += (t.peak.value - mean) * (t.peak.value - mean);
  const double stddev = trials.size() > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;

  json per_trial = json::array();
  for (std::size_t i = 0; i < trials.size(); ++i)
    per_trial.push_back({{"trial", i},
                         {"peak_fidelity", trials[i].peak.value},
                         {"t_peak_fidelity", trials[i].peak.time},
                         {"fidelity_at_t0", trials[i].fidelity_at_t0}});

  json s;
  s["name"] = config.name;
  s["seed"] = noise.seed;
  s["trials"] = noise.trials;
  s["spectrum_rel"] = noise.spectrum_rel;
  s["position_rel"] = noise.position_rel;
  s["law"] = noise.law == NoiseLaw::uniform ? "uniform" : "gaussian";
  s["nominal_peak_fidelity"] = res.summary.at("peak_fidelity");
  s["mean_peak_fidelity"] = mean;
  s["std_peak_fidelity"] = stddev;
  s["mean_fidelity_at_t0"] = mean_t0;
  s["per_trial"] = per_trial;
  s["trial0_re_a_at_t0"] = real_parts(trials.front().a_t0);
  s["trial0_im_a_at_t0"] = imag_parts(trials.front().a_t0);

  // mean ± std fidelity curve over trials
  std::ostringstream curve;
  curve << "t,mean_fidelity,std_fidelity,nominal_fidelity\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double m = 0.0, v = 0.0;
    for (const auto& t : trials) m += t.fidelity_rows(static_cast<Index>(r));
    m /= count;
    for (const auto& t : trials) {
      const double d = t.fidelity_rows(static_cast<Index>(r)) - m;
      v += d * d;
    }
    const double sd = trials.size() > 1 ? std::sqrt(v / (count - 1.0)) : 0.0;
    curve << format_number(nominal.times(rows[r])) << ',' << format_number(m) << ','
          << format_number(sd) << ',' << format_number(res.fidelity(rows[r])) << '\n';
  }
  write_text(res.dir / "mc_fidelity.csv", curve.str());

  res.failed_checks = evaluate_checks(config.checks, s);
  s["checks_passed"] = res.failed_checks.empty();
  res.summary = s;
  res.summary_json = res.dir / "mc.json";
  write_json(res.summary_json, s);
  write_json(res.dir / "config.json", config_to_json(config));
  if (options.plots) res.svgs = emit_plots(res.dir);
  return res;
}

std::vector<fs::path> emit_plots(const fs::path& dir) {
  const fs::path traj_path = dir / "trajectory.csv";
  if (!fs::exists(traj_path)) throw std::runtime_error("no trajectory.csv in " + dir.string());
  const CsvTable traj = read_csv(traj_path);
  if (traj.rows.empty()) throw std::runtime_error(traj_path.string() + " has no data rows");

  std::vector<std::pair<fs::path, std::string>> pending;
  const auto t = traj.values(0);

  // amplitudes: real solid, imaginary dashed; |c> traces only when populated
  std::vector<svg::Series> amp;
  std::vector<svg::Series> metastable;
  for (int j = 1;; ++j) {
    const int re = traj.column("re_a" + std::to_string(j));
    if (re < 0) break;
    if (j > 10) continue;
    const auto col = svg::color(static_cast<std::size_t>(j - 1));
    amp.push_back({"Re a" + std::to_string(j), t, traj.values(re), col, false});
    amp.push_back({"Im a" + std::to_string(j), t, traj.values(re + 1), col, true});
    const auto rc = traj.values(re + 2), ic = traj.values(re + 3);
    bool populated = false;
    for (std::size_t i = 0; i < rc.size(); ++i) populated = populated || rc[i] != 0.0 || ic[i] != 0.0;
    if (populated) {
      metastable.push_back({"Re c" + std::to_string(j), t, rc, col, false});
      metastable.push_back({"Im c" + std::to_string(j), t, ic, col, true});
    }
  }
  if (amp.empty()) throw std::runtime_error(traj_path.string() + " has no amplitude columns");
  pending.emplace_back(dir / "amplitudes.svg", svg::line_chart("Emitter amplitudes |a>", "t (1/Γ)", "amplitude", amp));
  if (!metastable.empty())
    pending.emplace_back(dir / "metastable.svg",
                         svg::line_chart("Emitter amplitudes |c>", "t (1/Γ)", "amplitude", metastable));

  std::vector<svg::Series> fid;
  if (const int f = traj.column("fidelity"); f >= 0) fid.push_back({"F_a", t, traj.values(f), svg::color(0)});
  if (const int f = traj.column("fidelity_c"); f >= 0)
    fid.push_back({"F_c", t, traj.values(f), svg::color(1), true});
  if (!fid.empty()) pending.emplace_back(dir / "fidelity.svg", svg::line_chart("Fidelity", "t (1/Γ)", "F", fid));
  if (const int c = traj.column("concurrence"); c >= 0)
    pending.emplace_back(dir / "concurrence.svg",
                         svg::line_chart("Concurrence", "t (1/Γ)", "C",
                                         {{"2|a1||a2|", t, traj.values(c), svg::color(0)}}));

  if (const fs::path sp = dir / "spectrum.csv"; fs::exists(sp)) {
    const CsvTable spec = read_csv(sp);
    if (spec.rows.empty()) throw std::runtime_error(sp.string() + " has no data rows");
    const auto x = spec.values(0);
    pending.emplace_back(dir / "spectrum.svg",
                         svg::line_chart("Input photon spectrum", "δω (Γ)", "amplitude",
                                         {{"Re right", x, spec.values(1), svg::color(1)},
                                          {"Im right", x, spec.values(2), svg::color(1), true},
                                          {"Re left", x, spec.values(3), svg::color(0)},
                                          {"Im left", x, spec.values(4), svg::color(0), true}}));
  }

  if (const fs::path sj = dir / "summary.json"; fs::exists(sj)) {
    const json s = read_json(sj);
    std::optional<json> mc;
    if (fs::exists(dir / "mc.json")) mc = read_json(dir / "mc.json");
    std::vector<std::string> labels{"expected", "computed"};
    if (mc) labels.emplace_back("noisy");
    for (const auto& [part, title] : {std::pair{"re", "Re a_j at t0"}, std::pair{"im", "Im a_j at t0"}}) {
      const auto expected = s.at(std::string("target_") + part).get<std::vector<double>>();
      const auto computed = s.at(std::string(part) + "_a_at_t0").get<std::vector<double>>();
      std::vector<double> noisy;
      if (mc) noisy = mc->at(std::string("trial0_") + part + "_a_at_t0").get<std::vector<double>>();
      std::vector<svg::BarGroup> groups;
      for (std::size_t j = 0; j < expected.size(); ++j) {
        svg::BarGroup g{std::to_string(j + 1), {expected[j], computed.at(j)}};
        if (mc) g.values.push_back(noisy.at(j));
        groups.push_back(std::move(g));
      }
      pending.emplace_back(dir / (std::string("bars_") + part + ".svg"), svg::bar_chart(title, labels, groups));
    }
  }

  if (const fs::path mp = dir / "mc_fidelity.csv"; fs::exists(mp)) {
    const CsvTable mcf = read_csv(mp);
    if (mcf.rows.empty()) throw std::runtime_error(mp.string() + " has no data rows");
    const auto x = mcf.values(0);
    pending.emplace_back(dir / "mc_fidelity.svg",
                         svg::line_chart("Fidelity with noise", "t (1/Γ)", "F",
                                         {{"nominal", x, mcf.values(3), svg::color(1)},
                                          {"noisy mean", x, mcf.values(1), svg::color(0), true}}));
  }

  std::vector<fs::path> written;
  for (const auto& [path, body] : pending) {
    write_text(path, body);
    written.push_back(path);
  }
  return written;
}

}  // namespace wgqed
