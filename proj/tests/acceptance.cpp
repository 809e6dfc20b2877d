// Acceptance run: one PASS/FAIL line per criterion.
//   wgqed_acceptance <work_dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wgqed/dynamics.hpp"
#include "wgqed/oracle.hpp"
#include "wgqed/scenario.hpp"
#include "wgqed/spectrum.hpp"

namespace fs = std::filesystem;
using namespace wgqed;

namespace {

fs::path g_work;
std::map<std::string, ScenarioResult> g_runs;

const ScenarioResult& run(const std::string& name) {
  auto it = g_runs.find(name);
  if (it != g_runs.end()) return it->second;
  RunOptions opt;
  opt.out_dir = g_work / "runs";
  opt.plots = false;
  return g_runs.emplace(name, run_scenario(builtin_scenario(name), opt)).first->second;
}

double num(const ScenarioResult& r, const std::string& key) { return r.summary.at(key).get<double>(); }
double num(const ScenarioResult& r, const std::string& key, std::size_t i) {
  return r.summary.at(key).at(i).get<double>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Collects named sub-checks; the criterion passes when all of them do.
struct Report {
  bool ok = true;
  std::ostringstream text;

  void near(const std::string& what, double value, double expected, double tol) {
    expect(what, value, std::abs(value - expected) <= tol,
           "(" + fmt(expected) + " ± " + fmt(tol) + ")");
  }
  void at_least(const std::string& what, double value, double lo) {
    expect(what, value, value >= lo, "(≥ " + fmt(lo) + ")");
  }
  void at_most(const std::string& what, double value, double hi) {
    expect(what, value, value <= hi, "(≤ " + fmt(hi) + ")");
  }
  void flag(const std::string& what, bool pass) {
    if (text.tellp() > 0) text << "; ";
    text << what << (pass ? "" : " [miss]");
    ok = ok && pass;
  }

 private:
  void expect(const std::string& what, double value, bool pass, const std::string& window) {
    if (text.tellp() > 0) text << "; ";
    text << what << " = " << fmt(value) << ' ' << window << (pass ? "" : " [miss]");
    ok = ok && pass;
  }
};

int g_failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Report&)>& body) {
  Report r;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.ok = false;
    r.text << (r.text.tellp() > 0 ? "; " : "") << "error: " << e.what();
  }
  if (!r.ok) ++g_failures;
  std::printf("%s %d %s: %s\n", r.ok ? "PASS" : "FAIL", id, title.c_str(), r.text.str().c_str());
  std::fflush(stdout);
}

double max_abs(const VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Oracle run on the same injected photon as the delay-equation run.
struct CrossCheck {
  double max_error = 0.0;
  double norm_drift = 0.0;
};

CrossCheck cross_check(const std::string& name) {
  const ScenarioConfig config = builtin_scenario(name);
  const ScenarioResult& base = run(name);
  const DirectionalSpectrum drive =
      config.sampling ? base.drive : coarse_sample(base.designed, 81, -10.0, 10.0);
  const Index n = base.array.size();

  IntegratorConfig ic;
  ic.t_end = config.t_end;
  ic.dt = config.dt;
  const Trajectory traj = evolve(base.array, DriveSchedule{drive, std::nullopt}, EmitterState::ground(n), ic);

  const OracleBand band = resolving_band(base.array);
  const SpectralGrid modes = mode_grid_for(drive.grid, band.half_width, 2.0 * kPi<double> / config.t_end);
  OracleConfig oc;
  oc.integrator = ic;
  oc.integrator.dt = config.gamma_free == 0.0 ? 5e-4 : 1e-3;
  oc.checkpoint_every = static_cast<Index>(std::llround(0.05 / oc.integrator.dt));
  oc.cutoff = band.cutoff;
  const FullState init{EmitterState::ground(n), field_from_spectrum(drive, modes)};
  const std::vector<FullState> states = oracle_evolve(base.array, init, std::nullopt, oc);

  CrossCheck out;
  for (const auto& s : states) {
    const VectorXcd dde = traj.a.row(traj.index_at(s.emitters.t)).transpose();
    out.max_error = std::max(out.max_error, max_abs(s.emitters.a - dde));
  }
  out.norm_drift = std::abs(total_norm(states.back()) - total_norm(states.front()));
  return out;
}

std::vector<std::string> fig2_names() {
  std::vector<std::string> out;
  for (const auto& n : builtin_names())
    if (n.rfind("fig2-", 0) == 0) out.push_back(n);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Files under `a` and `b` with identical relative paths and bytes.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files, std::string& diff) {
  std::vector<fs::path> rel_a, rel_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b));
  std::sort(rel_a.begin(), rel_a.end());
  std::sort(rel_b.begin(), rel_b.end());
  files = rel_a.size();
  if (rel_a != rel_b) {
    diff = "file lists differ";
    return false;
  }
  for (const auto& r : rel_a)
    if (slurp(a / r) != slurp(b / r)) {
      diff = r.string();
      return false;
    }
  return true;
}

void reproducible_run(const fs::path& root, int jobs) {
  RunOptions opt;
  opt.out_dir = root;
  opt.jobs = jobs;
  for (const char* name : {"fig2-symmetric", "fig4-raman"}) {
    const ScenarioResult r = run_scenario(builtin_scenario(name), opt);
    emit_plots(r.dir);
  }
  ScenarioConfig noisy = builtin_scenario("fig3-timed-dicke-10-noisy");
  noisy.noise->trials = 8;
  const ScenarioResult r = run_monte_carlo(noisy, opt);
  emit_plots(r.dir);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <work_dir>\n", argv[0]);
    return 2;
  }
  g_work = argv[1];
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  criterion(1, "fig2 symmetric state", [](Report& r) {
    const auto& s = run("fig2-symmetric");
    for (std::size_t j = 0; j < 2; ++j) {
      r.near("Re a" + std::to_string(j + 1), num(s, "re_a_at_t0", j), 0.70, 0.02);
      r.at_most("|Im a" + std::to_string(j + 1) + "|", std::abs(num(s, "im_a_at_t0", j)), 0.02);
    }
    r.at_least("peak F", num(s, "peak_fidelity"), 0.98);
  });

  criterion(2, "fig2 imperfections", [](Report& r) {
    r.near("lossy peak F", num(run("fig2-symmetric-lossy"), "peak_fidelity"), 0.90, 0.03);
    r.near("coarse peak F", num(run("fig2-symmetric-coarse"), "peak_fidelity"), 0.90, 0.03);
  });

  criterion(3, "fig2 concurrence at t0", [](Report& r) {
    r.near("ideal", num(run("fig2-symmetric"), "concurrence_at_t0"), 0.94, 0.03);
    r.near("lossy", num(run("fig2-symmetric-lossy"), "concurrence_at_t0"), 0.76, 0.04);
    r.near("coarse", num(run("fig2-symmetric-coarse"), "concurrence_at_t0"), 0.75, 0.04);
  });

  criterion(4, "fig2 antisymmetric state", [](Report& r) {
    const auto& s = run("fig2-antisymmetric");
    r.near("peak F", num(s, "peak_fidelity"), 0.98, 0.01);
    r.at_most("max|L + R|", max_abs(s.designed.left + s.designed.right), 1e-10);
  });

  criterion(5, "fig2 timed-Dicke state", [](Report& r) {
    const auto& s = run("fig2-timed-dicke");
    r.near("Re a1", num(s, "re_a_at_t0", 0), 0.492, 0.01);
    r.near("Im a1", num(s, "im_a_at_t0", 0), -0.492, 0.01);
    r.near("Re a2", num(s, "re_a_at_t0", 1), 0.492, 0.01);
    r.near("Im a2", num(s, "im_a_at_t0", 1), 0.492, 0.01);
    r.near("F(t0)", num(s, "fidelity_at_t0"), 0.985, 0.01);
    r.near("lossy peak F", num(run("fig2-timed-dicke-lossy"), "peak_fidelity"), 0.90, 0.03);
    r.near("coarse peak F", num(run("fig2-timed-dicke-coarse"), "peak_fidelity"), 0.87, 0.03);
  });

  criterion(6, "fig3 ten-emitter timed-Dicke", [](Report& r) {
    const auto& s = run("fig3-timed-dicke-10");
    r.near("peak F", num(s, "peak_fidelity"), 0.96, 0.02);
    r.near("t_peak", num(s, "t_peak_fidelity"), 20.0, 0.5);
    r.at_least("directionality", num(s, "directionality"), 5.0);
    RunOptions opt;
    opt.out_dir = g_work / "runs";
    opt.plots = false;
    const ScenarioResult mc = run_monte_carlo(builtin_scenario("fig3-timed-dicke-10-noisy"), opt);
    r.at_least("trials", mc.summary.at("trials").get<double>(), 32);
    r.near("MC mean peak F", mc.summary.at("mean_peak_fidelity").get<double>(), 0.96, 0.03);
  });

  criterion(7, "fig4 Raman transfer", [](Report& r) {
    const auto& s = run("fig4-raman");
    double min_c = 1e300, max_a = -1e300;
    for (Index k = 0; k < s.trajectory.steps(); ++k) {
      if (s.trajectory.times(k) < 11.0 - 1e-9) continue;
      min_c = std::min(min_c, s.fidelity_c(k));
      max_a = std::max(max_a, s.fidelity(k));
    }
    r.at_least("min F_c (t ≥ 11)", min_c, 0.95);
    r.at_most("max F_a (t ≥ 11)", max_a, 0.1);
  });

  criterion(8, "property suite", [](Report& r) {
    // (a) free decay
    {
      const EmitterArray one(std::vector<double>{0.0}, PhysicalParams{});
      IntegratorConfig ic;
      ic.t_end = 10.0;
      const Trajectory tr = evolve(one, DriveSchedule::none(), EmitterState{VectorXcd::Ones(1), VectorXcd::Zero(1), 0.0}, ic);
      double err = 0.0;
      for (Index k = 0; k < tr.steps(); ++k)
        err = std::max(err, std::abs(tr.a(k, 0) - std::exp(-tr.times(k) / 2.0)));
      r.at_most("(a) free decay error", err, 1e-6);
    }
    // (b) DDE balance
    {
      double worst = 0.0;
      for (const auto& name : builtin_names()) {
        if (name.find("noisy") != std::string::npos) continue;
        const ScenarioConfig c = builtin_scenario(name);
        if (c.gamma_free != 0.0 || c.sampling) continue;
        worst = std::max(worst, std::abs(num(run(name), "excitation_balance") - 1.0));
      }
      r.at_most("(b) DDE |balance - 1|", worst, 0.02);
    }
    // (b, c) oracle
    {
      double drift = 0.0, err = 0.0;
      for (const auto& name : fig2_names()) {
        const CrossCheck x = cross_check(name);
        err = std::max(err, x.max_error);
        if (builtin_scenario(name).gamma_free == 0.0) drift = std::max(drift, x.norm_drift);
      }
      r.at_most("(b) oracle norm drift", drift, 1e-6);
      r.at_most("(c) oracle vs DDE", err, 1e-2);
    }
    // (d) emission norm at W = 20
    {
      const SpectralGrid wide = SpectralGrid::symmetric(20.0, 4001);
      const EmitterArray pair(std::vector<double>{-0.125, 0.125}, PhysicalParams{});
      const EmitterArray single(std::vector<double>{0.0}, PhysicalParams{});
      const std::vector<int> plus{1, 1}, minus{1, -1}, one{1};
      double worst = 0.0;
      worst = std::max(worst, std::abs(spectral_norm(emission_spectrum(single, dicke_target(1, one), wide)) - 1.0));
      worst = std::max(worst, std::abs(spectral_norm(emission_spectrum(pair, dicke_target(2, plus), wide)) - 1.0));
      worst = std::max(worst, std::abs(spectral_norm(emission_spectrum(pair, dicke_target(2, minus), wide)) - 1.0));
      worst = std::max(worst, std::abs(spectral_norm(emission_spectrum(pair, timed_dicke_target(pair), wide)) - 1.0));
      r.at_most("(d) |emission norm - 1|", worst, 0.02);
    }
    // (e) mirror symmetry
    {
      const SpectralGrid grid = SpectralGrid::symmetric(10.0, 2001);
      const EmitterArray pair(std::vector<double>{-0.125, 0.125}, PhysicalParams{});
      const std::vector<int> plus{1, 1}, minus{1, -1};
      const auto sym = emission_spectrum(pair, dicke_target(2, plus), grid);
      const auto anti = emission_spectrum(pair, dicke_target(2, minus), grid);
      const auto& in_sym = run("fig2-symmetric").designed;
      const auto& in_anti = run("fig2-antisymmetric").designed;
      double worst = max_abs(sym.left - sym.right);
      worst = std::max(worst, max_abs(anti.left + anti.right));
      worst = std::max(worst, max_abs(in_sym.left - in_sym.right));
      worst = std::max(worst, max_abs(in_anti.left + in_anti.right));
      r.at_most("(e) mirror error", worst, 1e-10);
    }
    // (f) linear-solve residual
    {
      double worst = 0.0;
      for (const char* name : {"fig2-symmetric", "fig2-antisymmetric", "fig2-timed-dicke", "fig3-timed-dicke-10"}) {
        const auto& s = run(name);
        const auto re = s.summary.at("target_re").get<std::vector<double>>();
        const auto im = s.summary.at("target_im").get<std::vector<double>>();
        VectorXcd target(s.array.size());
        for (Index j = 0; j < target.size(); ++j)
          target(j) = {re[static_cast<std::size_t>(j)], im[static_cast<std::size_t>(j)]};
        const TargetState t(target);
        const SpectralGrid& g = s.designed.grid;
        for (Index i = 0; i < g.size(); ++i) {
          const VectorXcd chi = solve_chi(s.array, t, g[i]);
          worst = std::max(worst, (collective_matrix(s.array, g[i]) * chi - t.amps()).norm());
        }
      }
      r.at_most("(f) residual", worst, 1e-10);
    }
    // (g) fixed-seed reproducibility
    {
      reproducible_run(g_work / "repro-1", 1);
      reproducible_run(g_work / "repro-2", 2);
      std::size_t files = 0;
      std::string diff;
      const bool same = same_tree(g_work / "repro-1", g_work / "repro-2", files, diff);
      r.flag("(g) " + std::to_string(files) + " files byte-identical" + (same ? "" : " (" + diff + ")"),
             same && files > 0);
    }
  });

  return g_failures == 0 ? 0 : 1;
}
