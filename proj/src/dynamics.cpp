#include "wgqed/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "wgqed/errors.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

namespace {

constexpr double kPiD = kPi<double>;
constexpr Index kResyncInterval = 1024;
constexpr Index kChirpMinModes = 64;
constexpr Index kChirpBlock = 8192;

double prefactor(const PhysicalParams& p) { return std::sqrt(p.gamma_wg / (4.0 * kPiD)); }

}  // namespace

double RamanPulse::amplitude() const { return std::sqrt(kPiD) / (2.0 * width); }

double RamanPulse::operator()(double t) const {
  const double x = (t - t_pi) / width;
  return amplitude() * std::exp(-x * x);
}

DriveSchedule DriveSchedule::none() {
  return {DirectionalSpectrum::zero(SpectralGrid::symmetric(1.0, 2)), std::nullopt};
}

void IntegratorConfig::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("integrator dt must be > 0");
  if (!std::isfinite(t_end)) throw std::invalid_argument("integrator t_end must be finite");
}

VectorXcd drive_field(const DriveSchedule& schedule, const EmitterArray& array, double t) {
  const auto& s = schedule.spectrum;
  const auto& p = array.params();
  const VectorXd w = s.grid.weights();
  VectorXcd b = VectorXcd::Zero(array.size());
  for (Index m = 0; m < s.grid.size(); ++m) {
    const double dw = s.grid[m];
    const double k = p.k_a() + dw / p.v_g;
    const cdouble time_phase = std::polar(1.0, -dw * t);
    for (Index j = 0; j < array.size(); ++j) {
      const double r = array.positions()(j);
      b(j) += w(m) * time_phase *
              (s.right(m) * std::polar(1.0, k * r) + s.left(m) * std::polar(1.0, -k * r));
    }
  }
  return -kI<double> * prefactor(p) * b;
}

double raman_amplitude(const DriveSchedule& schedule, double t) {
  return schedule.raman ? (*schedule.raman)(t) : 0.0;
}

DriveSampler::DriveSampler(const DirectionalSpectrum& spectrum, const EmitterArray& array,
                           double t_start, double h)
    : detunings_(spectrum.grid.detunings()), t_start_(t_start), h_(h) {
  const auto& p = array.params();
  const Index n = array.size();
  const Index m_count = spectrum.grid.size();
  const VectorXd w = spectrum.grid.weights();
  const cdouble pref = -kI<double> * prefactor(p);
  coefficients_.resize(n, m_count);
  for (Index m = 0; m < m_count; ++m) {
    const double k = p.k_a() + detunings_(m) / p.v_g;
    for (Index j = 0; j < n; ++j) {
      const double r = array.positions()(j);
      coefficients_(j, m) = pref * w(m) *
                            (spectrum.right(m) * std::polar(1.0, k * r) +
                             spectrum.left(m) * std::polar(1.0, -k * r));
    }
  }
  step_.resize(m_count);
  for (Index m = 0; m < m_count; ++m) step_(m) = std::polar(1.0, -detunings_(m) * h_);
  resync();
}

void DriveSampler::resync() {
  const double t = t_start_ + static_cast<double>(k_) * h_;
  phasor_.resize(detunings_.size());
  for (Index m = 0; m < detunings_.size(); ++m) phasor_(m) = std::polar(1.0, -detunings_(m) * t);
}

VectorXcd DriveSampler::next() {
  VectorXcd b = coefficients_ * phasor_;
  ++k_;
  if (k_ % kResyncInterval == 0)
    resync();
  else
    phasor_.array() *= step_.array();
  return b;
}

void DriveSampler::fill(MatrixXcd& out) {
  const Index m_count = detunings_.size();
  const Index n = coefficients_.rows();
  if (m_count < kChirpMinModes || out.cols() < kChirpBlock) {
    for (Index k = 0; k < out.cols(); ++k) out.col(k) = next();
    return;
  }
  // Chirp-z (Bluestein): with δω_m = lo + mΔ and θ = Δh,
  //   Σ_m C_m e^{−iδω_m (t_a + kh)} = e^{−i lo (t_a + kh)} e^{−iθk²/2} Σ_m a_m g_{k−m},
  //   a_m = C_m e^{−imΔ t_a} e^{−iθm²/2},  g_n = e^{iθn²/2}.
  const double lo = detunings_(0);
  const double spacing = (detunings_(m_count - 1) - lo) / static_cast<double>(m_count - 1);
  const double theta = spacing * h_;
  Index len = 1;
  while (len < m_count + kChirpBlock - 1) len *= 2;

  Eigen::FFT<double> fft;
  VectorXcd chirp = VectorXcd::Zero(len);
  for (Index k = 0; k < kChirpBlock; ++k) chirp(k) = std::polar(1.0, theta * static_cast<double>(k * k) / 2.0);
  for (Index m = 1; m < m_count; ++m) chirp(len - m) = std::polar(1.0, theta * static_cast<double>(m * m) / 2.0);
  VectorXcd chirp_hat(len);
  fft.fwd(chirp_hat, chirp);

  VectorXcd pre(m_count), post(kChirpBlock);
  for (Index m = 0; m < m_count; ++m) pre(m) = std::polar(1.0, -theta * static_cast<double>(m * m) / 2.0);
  VectorXcd buffer(len), spectrum(len), conv(len);
  for (Index start = 0; start < out.cols(); start += kChirpBlock) {
    const Index count = std::min(kChirpBlock, out.cols() - start);
    const double t_a = t_start_ + static_cast<double>(k_ + start) * h_;
    for (Index k = 0; k < count; ++k) {
      const double kk = static_cast<double>(k);
      post(k) = std::polar(1.0, -lo * (t_a + kk * h_) - theta * kk * kk / 2.0);
    }
    for (Index j = 0; j < n; ++j) {
      buffer.setZero();
      for (Index m = 0; m < m_count; ++m)
        buffer(m) = coefficients_(j, m) * pre(m) * std::polar(1.0, -static_cast<double>(m) * spacing * t_a);
      fft.fwd(spectrum, buffer);
      spectrum.array() *= chirp_hat.array();
      fft.inv(conv, spectrum);
      out.row(j).segment(start, count) = conv.head(count).cwiseProduct(post.head(count)).transpose();
    }
  }
  k_ += out.cols();
  resync();
}

Trajectory evolve(const EmitterArray& array, const DriveSchedule& schedule,
                  const EmitterState& init, const IntegratorConfig& config) {
  config.validate();
  const Index n = array.size();
  if (init.a.size() != n || init.c.size() != n)
    throw std::invalid_argument("evolve: initial state size does not match the array");
  const auto& p = array.params();
  const double dt = config.dt;
  const double t_start = init.t;
  const auto steps = static_cast<Index>(std::llround((config.t_end - t_start) / dt));
  if (steps < 1) throw std::invalid_argument("evolve: t_end must lie at least one step after start");

  const bool retarded = config.retardation && n > 1;
  if (retarded && dt > array.min_delay() * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "evolve: dt = " << dt << " exceeds the shortest emitter delay " << array.min_delay()
        << "; reduce dt or disable retardation";
    throw IntegrationError(msg.str());
  }

  // Instantaneous couplings act on stage values; delayed ones read the history.
  MatrixXcd instant = MatrixXcd::Zero(n, n);
  MatrixXcd delayed = MatrixXcd::Zero(n, n);
  MatrixXd offset = MatrixXd::Zero(n, n);  // delay in units of dt
  for (Index j = 0; j < n; ++j) {
    for (Index l = 0; l < n; ++l) {
      const cdouble kjl = std::polar(p.gamma_wg / 2.0, p.k_a() * array.distance(j, l));
      if (j == l || !retarded) {
        instant(j, l) = kjl;
      } else {
        delayed(j, l) = kjl;
        offset(j, l) = array.delay(j, l) / dt;
      }
    }
    instant(j, j) += p.gamma_free / 2.0;
  }

  const bool driven = !schedule.spectrum.is_zero();
  MatrixXcd drive;  // N × (2·steps + 1), samples every dt/2
  if (driven) {
    drive.resize(n, 2 * steps + 1);
    DriveSampler sampler(schedule.spectrum, array, t_start, dt / 2.0);
    sampler.fill(drive);
  }

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.a.resize(steps + 1, n);
  traj.c.resize(steps + 1, n);
  if (config.keep_drive) traj.drive = MatrixXcd::Zero(steps + 1, n);
  for (Index s = 0; s <= steps; ++s) traj.times(s) = t_start + static_cast<double>(s) * dt;
  traj.a.row(0) = init.a.transpose();
  traj.c.row(0) = init.c.transpose();

  const bool zero_history = config.history == HistoryPolicy::zero;
  auto history = [&](Index l, double x, Index current) -> cdouble {
    if (x < 0.0) return zero_history ? cdouble(0.0) : init.a(l);
    const auto i = static_cast<Index>(std::floor(x));
    if (i >= current) return traj.a(current, l);
    const double f = x - static_cast<double>(i);
    return traj.a(i, l) * (1.0 - f) + traj.a(i + 1, l) * f;
  };
  auto delayed_sum = [&](Index step, double theta) {
    VectorXcd d = VectorXcd::Zero(n);
    if (!retarded) return d;
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < n; ++l)
        if (l != j)
          d(j) += delayed(j, l) * history(l, static_cast<double>(step) + theta - offset(j, l), step);
    return d;
  };

  VectorXcd a = init.a;
  VectorXcd c = init.c;
  VectorXcd zero_drive = VectorXcd::Zero(n);
  const cdouble i1 = kI<double>;
  for (Index s = 0; s < steps; ++s) {
    const double t = traj.times(s);
    const VectorXcd d0 = delayed_sum(s, 0.0);
    const VectorXcd dh = delayed_sum(s, 0.5);
    const VectorXcd d1 = delayed_sum(s, 1.0);
    const auto b0 = driven ? VectorXcd(drive.col(2 * s)) : zero_drive;
    const auto bh = driven ? VectorXcd(drive.col(2 * s + 1)) : zero_drive;
    const auto b1 = driven ? VectorXcd(drive.col(2 * s + 2)) : zero_drive;
    const double w0 = raman_amplitude(schedule, t);
    const double wh = raman_amplitude(schedule, t + dt / 2.0);
    const double w1 = raman_amplitude(schedule, t + dt);

    auto rhs_a = [&](const VectorXcd& av, const VectorXcd& cv, const VectorXcd& b,
                     const VectorXcd& d, double omega) -> VectorXcd {
      return b - d - instant * av - i1 * omega * cv;
    };
    auto rhs_c = [&](const VectorXcd& av, double omega) -> VectorXcd { return -i1 * omega * av; };

    const VectorXcd ka1 = rhs_a(a, c, b0, d0, w0);
    const VectorXcd kc1 = rhs_c(a, w0);
    const VectorXcd a2 = a + 0.5 * dt * ka1, c2 = c + 0.5 * dt * kc1;
    const VectorXcd ka2 = rhs_a(a2, c2, bh, dh, wh);
    const VectorXcd kc2 = rhs_c(a2, wh);
    const VectorXcd a3 = a + 0.5 * dt * ka2, c3 = c + 0.5 * dt * kc2;
    const VectorXcd ka3 = rhs_a(a3, c3, bh, dh, wh);
    const VectorXcd kc3 = rhs_c(a3, wh);
    const VectorXcd a4 = a + dt * ka3, c4 = c + dt * kc3;
    const VectorXcd ka4 = rhs_a(a4, c4, b1, d1, w1);
    const VectorXcd kc4 = rhs_c(a4, w1);
    a += (dt / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    c += (dt / 6.0) * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4);

    if (!a.allFinite() || !c.allFinite()) {
      std::ostringstream msg;
      msg << "evolve: non-finite amplitude at t = " << t + dt << " (step " << s + 1 << ")";
      throw IntegrationError(msg.str());
    }
    traj.a.row(s + 1) = a.transpose();
    traj.c.row(s + 1) = c.transpose();
  }
  if (config.keep_drive && driven)
    for (Index s = 0; s <= steps; ++s) traj.drive.row(s) = drive.col(2 * s).transpose();
  return traj;
}

DirectionalSpectrum output_spectrum(const Trajectory& traj, const EmitterArray& array,
                                    const DirectionalSpectrum& initial_spectrum,
                                    const SpectralGrid& grid, std::ostream* warnings) {
  const Index n = array.size();
  if (traj.emitters() != n)
    throw std::invalid_argument("output_spectrum: trajectory does not match the array");
  if (traj.steps() < 2) throw std::invalid_argument("output_spectrum: trajectory too short");
  const auto& p = array.params();

  auto out = DirectionalSpectrum::zero(grid);
  const VectorXd x = grid.detunings();
  if (initial_spectrum.grid == grid) {
    out.right = initial_spectrum.right;
    out.left = initial_spectrum.left;
  } else {
    const auto& g0 = initial_spectrum.grid;
    for (Index m = 0; m < grid.size(); ++m) {
      if (x(m) < g0.lo() || x(m) > g0.hi()) continue;
      out.right(m) = detail::interpolate(g0, initial_spectrum.right, x(m));
      out.left(m) = detail::interpolate(g0, initial_spectrum.left, x(m));
    }
  }

  // X(m, j) = ∫ e^{iδω_m t} a_j(t) dt, blocked as Φ (M × B) · A (B × N).
  const Index steps = traj.steps();
  const double dt = traj.times(1) - traj.times(0);
  constexpr Index kBlock = 256;
  MatrixXcd acc = MatrixXcd::Zero(grid.size(), n);
  VectorXcd step(grid.size());
  for (Index m = 0; m < grid.size(); ++m) step(m) = std::polar(1.0, x(m) * dt);
  MatrixXcd phi(grid.size(), kBlock);
  for (Index s0 = 0; s0 < steps; s0 += kBlock) {
    const Index len = std::min(kBlock, steps - s0);
    for (Index m = 0; m < grid.size(); ++m) phi(m, 0) = std::polar(1.0, x(m) * traj.times(s0));
    for (Index b = 1; b < len; ++b) phi.col(b) = phi.col(b - 1).cwiseProduct(step);
    MatrixXcd weighted = traj.a.middleRows(s0, len) * dt;
    if (s0 == 0) weighted.row(0) *= 0.5;
    if (s0 + len == steps) weighted.row(len - 1) *= 0.5;
    acc.noalias() += phi.leftCols(len) * weighted;
  }

  const cdouble pref = -kI<double> * prefactor(p);
  for (Index m = 0; m < grid.size(); ++m) {
    const double k = p.k_a() + x(m) / p.v_g;
    const VectorXcd ph_r = detail::outgoing_phases(array, k);
    const VectorXcd ph_l = detail::outgoing_phases(array, -k);
    out.right(m) += pref * (ph_r.transpose() * acc.row(m).transpose())(0);
    out.left(m) += pref * (ph_l.transpose() * acc.row(m).transpose())(0);
  }

  const double residual = traj.a.row(steps - 1).squaredNorm();
  if (warnings && residual > 1e-4)
    *warnings << "output_spectrum: " << residual
              << " excitation remains in |a> at the final time; spectrum is incomplete\n";
  return out;
}

}  // namespace wgqed
