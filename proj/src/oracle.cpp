#include "wgqed/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wgqed/errors.hpp"

namespace wgqed {

namespace {

constexpr double kTwoPi = 2.0 * kPi<double>;
constexpr Index kResyncSteps = 512;

// Plain complex products; std::complex operator* goes through the
// NaN-recovering library routine in non-vectorized loops.
inline cdouble mul(cdouble x, cdouble y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

// conj(x) · y
inline cdouble mul_conj(cdouble x, cdouble y) {
  return {x.real() * y.real() + x.imag() * y.imag(), x.real() * y.imag() - x.imag() * y.real()};
}

inline cdouble times_minus_i(cdouble x) { return {x.imag(), -x.real()}; }

// Discrete-mode amplitudes B_m = β̃_m √w_m, so that Σ|B_m|² is the photon norm.
struct DiscreteField {
  VectorXcd right;
  VectorXcd left;
};

}  // namespace

ModeField ModeField::vacuum(const SpectralGrid& grid) {
  return {grid, VectorXcd::Zero(grid.size()), VectorXcd::Zero(grid.size())};
}

double ModeField::norm() const {
  const VectorXd w = grid.weights();
  return w.dot(right.cwiseAbs2()) + w.dot(left.cwiseAbs2());
}

double total_norm(const FullState& state) {
  return state.emitters.population() + state.field.norm();
}

SpectralGrid mode_grid_for(const SpectralGrid& source, double min_half_width,
                           double max_spacing) {
  if (!(max_spacing > 0)) throw std::invalid_argument("mode_grid_for: max_spacing must be > 0");
  const double tol = 1e-12 * std::max(1.0, min_half_width);
  if (source.lo() <= -min_half_width + tol && source.hi() >= min_half_width - tol &&
      source.spacing() <= max_spacing)
    return source;
  const auto refine = static_cast<Index>(std::ceil(source.spacing() / max_spacing - 1e-12));
  const double h = source.spacing() / static_cast<double>(refine);
  const auto below = static_cast<Index>(std::max(0.0, std::ceil((source.lo() + min_half_width) / h - 1e-9)));
  const auto above = static_cast<Index>(std::max(0.0, std::ceil((min_half_width - source.hi()) / h - 1e-9)));
  const Index n = (source.size() - 1) * refine + below + above + 1;
  return SpectralGrid(source.lo() - static_cast<double>(below) * h,
                      source.hi() + static_cast<double>(above) * h, n);
}

ModeField field_from_spectrum(const DirectionalSpectrum& spectrum, const SpectralGrid& modes) {
  if (spectrum.grid == modes) return {modes, spectrum.right, spectrum.left};
  ModeField field = ModeField::vacuum(modes);
  const VectorXd w_src = spectrum.grid.weights();
  const VectorXd w_mode = modes.weights();
  const double h = modes.spacing();
  for (Index i = 0; i < spectrum.grid.size(); ++i) {
    const double x = spectrum.grid[i];
    const auto m = static_cast<Index>(std::llround((x - modes.lo()) / h));
    if (m < 0 || m >= modes.size() || std::abs(modes[m] - x) > 1e-6 * h) {
      std::ostringstream msg;
      msg << "field_from_spectrum: detuning " << x << " is not a mode of the oracle grid";
      throw std::invalid_argument(msg.str());
    }
    const double scale = w_src(i) / w_mode(m);
    field.right(m) += scale * spectrum.right(i);
    field.left(m) += scale * spectrum.left(i);
  }
  return field;
}

DirectionalSpectrum field_spectrum(const ModeField& field) {
  return {field.grid, field.right, field.left};
}

OracleBand resolving_band(const EmitterArray& array) {
  const double tau = array.min_delay();
  if (!std::isfinite(tau)) return {};
  const double cutoff = 3.0 / tau;
  return {cutoff, std::max(10.0, 3.0 * cutoff)};
}

std::vector<FullState> oracle_evolve(const EmitterArray& array, const FullState& init,
                                     const std::optional<RamanPulse>& raman,
                                     const OracleConfig& config) {
  const IntegratorConfig& ic = config.integrator;
  ic.validate();
  if (config.cutoff < 0) throw std::invalid_argument("oracle_evolve: cutoff must be >= 0");
  if (config.checkpoint_every < 1)
    throw std::invalid_argument("oracle_evolve: checkpoint_every must be >= 1");
  const Index n = array.size();
  if (init.emitters.a.size() != n || init.emitters.c.size() != n)
    throw std::invalid_argument("oracle_evolve: emitter state does not match the array");
  const SpectralGrid& grid = init.field.grid;
  const double duration = ic.t_end - init.emitters.t;
  const auto steps = static_cast<Index>(std::llround(duration / ic.dt));
  if (steps < 1) throw std::invalid_argument("oracle_evolve: t_end must lie after the start time");

  if (grid.lo() > -10.0 + 1e-9 || grid.hi() < 10.0 - 1e-9)
    throw IntegrationError("oracle_evolve: mode grid must span at least [-10, 10] Γ");
  const double max_spacing = kTwoPi / duration;
  if (grid.spacing() > max_spacing * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "oracle_evolve: mode spacing " << grid.spacing() << " exceeds 2π/t = " << max_spacing
        << "; field recurs before t_end, need at least "
        << static_cast<Index>(std::ceil((grid.hi() - grid.lo()) / max_spacing)) + 1 << " modes";
    throw IntegrationError(msg.str());
  }

  const auto& p = array.params();
  const Index modes = grid.size();
  const VectorXd x = grid.detunings();
  const VectorXd w = grid.weights();

  // g² ∝ exp(−δω²/2σ²) when a cutoff σ is set
  auto envelope = [&](double dw) {
    if (!(config.cutoff > 0)) return 1.0;
    return std::exp(-dw * dw / (4.0 * config.cutoff * config.cutoff));
  };
  // cr[m·n + j] = g_m e^{+i k_m r_j}, cl[m·n + j] = g_m e^{−i k_m r_j}
  std::vector<cdouble> cr(static_cast<std::size_t>(modes * n)), cl(cr.size());
  for (Index m = 0; m < modes; ++m) {
    const double g = std::sqrt(p.gamma_wg * w(m) / (4.0 * kPi<double>)) * envelope(x(m));
    const double k = p.k_a() + x(m) / p.v_g;
    for (Index j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(m * n + j);
      cr[idx] = std::polar(g, k * array.positions()(j));
      cl[idx] = std::polar(g, -k * array.positions()(j));
    }
  }
  const VectorXd sqrt_w = w.cwiseSqrt();

  DiscreteField field{init.field.right.cwiseProduct(sqrt_w.cast<cdouble>()),
                      init.field.left.cwiseProduct(sqrt_w.cast<cdouble>())};
  VectorXcd a = init.emitters.a;
  VectorXcd c = init.emitters.c;
  const double half_loss = p.gamma_free / 2.0;

  auto snapshot = [&](double t) {
    FullState s;
    s.emitters = {a, c, t};
    s.field = {grid, field.right.cwiseQuotient(sqrt_w.cast<cdouble>()),
               field.left.cwiseQuotient(sqrt_w.cast<cdouble>())};
    return s;
  };

  VectorXcd half_step(modes);
  for (Index m = 0; m < modes; ++m) half_step(m) = std::polar(1.0, -x(m) * ic.dt / 2.0);
  VectorXcd phasor(modes);  // e^{−iδω t} at the start of the step
  auto resync = [&](double t) {
    for (Index m = 0; m < modes; ++m) phasor(m) = std::polar(1.0, -x(m) * t);
  };
  auto omega_at = [&](double t) { return raman ? (*raman)(t) : 0.0; };

  // RK4 stage k-vectors are overwritten in place; acc_* collect the weighted sum.
  VectorXcd k_r = VectorXcd::Zero(modes), k_l = VectorXcd::Zero(modes);
  VectorXcd acc_r(modes), acc_l(modes);
  VectorXcd k_a = VectorXcd::Zero(n), k_c = VectorXcd::Zero(n), acc_a(n), acc_c(n);
  VectorXcd a_s(n), c_s(n), drive(n);
  constexpr double kAlpha[4] = {0.0, 0.5, 0.5, 1.0};
  constexpr double kWeight[4] = {1.0, 2.0, 2.0, 1.0};

  std::vector<FullState> out;
  out.reserve(static_cast<std::size_t>(steps / config.checkpoint_every + 2));
  out.push_back(snapshot(init.emitters.t));

  for (Index s = 0; s < steps; ++s) {
    const double t = init.emitters.t + static_cast<double>(s) * ic.dt;
    const double dt = ic.dt;
    if (s % kResyncSteps == 0) resync(t);

    for (int stage = 0; stage < 4; ++stage) {
      const double h = kAlpha[stage] * dt;
      const double wgt = kWeight[stage];
      const double omega = omega_at(t + h);
      a_s = a + h * k_a;
      c_s = c + h * k_c;
      drive.setZero();
      for (Index m = 0; m < modes; ++m) {
        cdouble ph = phasor(m);
        if (stage > 0) ph = mul(ph, half_step(m));
        if (stage == 3) ph = mul(ph, half_step(m));
        const cdouble br = field.right(m) + h * k_r(m);
        const cdouble bl = field.left(m) + h * k_l(m);
        const cdouble pr = mul(ph, br), pl = mul(ph, bl);
        const cdouble* gr = &cr[static_cast<std::size_t>(m * n)];
        const cdouble* gl = &cl[static_cast<std::size_t>(m * n)];
        cdouble sr(0.0), sl(0.0);
        for (Index j = 0; j < n; ++j) {
          drive(j) += mul(gr[j], pr) + mul(gl[j], pl);
          sr += mul_conj(gr[j], a_s(j));
          sl += mul_conj(gl[j], a_s(j));
        }
        // −i conj(ph) s
        const cdouble dr = times_minus_i(mul_conj(ph, sr));
        const cdouble dl = times_minus_i(mul_conj(ph, sl));
        k_r(m) = dr;
        k_l(m) = dl;
        if (stage == 0) {
          acc_r(m) = dr;
          acc_l(m) = dl;
        } else {
          acc_r(m) += wgt * dr;
          acc_l(m) += wgt * dl;
        }
      }
      for (Index j = 0; j < n; ++j) {
        k_a(j) = times_minus_i(drive(j) + omega * c_s(j)) - half_loss * a_s(j);
        k_c(j) = times_minus_i(omega * a_s(j));
      }
      if (stage == 0) {
        acc_a = k_a;
        acc_c = k_c;
      } else {
        acc_a += wgt * k_a;
        acc_c += wgt * k_c;
      }
    }

    a += (dt / 6.0) * acc_a;
    c += (dt / 6.0) * acc_c;
    field.right += (dt / 6.0) * acc_r;
    field.left += (dt / 6.0) * acc_l;
    phasor = phasor.cwiseProduct(half_step).cwiseProduct(half_step);

    if (!a.allFinite()) throw IntegrationError("oracle_evolve: non-finite emitter amplitude");
    if ((s + 1) % config.checkpoint_every == 0 || s + 1 == steps) out.push_back(snapshot(t + dt));
  }
  return out;
}

}  // namespace wgqed
