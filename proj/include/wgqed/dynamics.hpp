#pragma once

// Driven emitter dynamics after eliminating the waveguide continuum: a linear
// delay differential equation with the photon drive b_j(t), free-space loss
// and an optional classical Raman pulse coupling |a> and |c>.

#include <optional>
#include <ostream>

#include "wgqed/eigen_types.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

/// Gaussian Raman pulse Ω(t) = √π/(2δ) exp(−(t − t_pi)²/δ²); ∫Ω dt = π/2.
struct RamanPulse {
  double t_pi = 0.0;
  double width = 0.1;

  double amplitude() const;
  double operator()(double t) const;
};

struct DriveSchedule {
  DirectionalSpectrum spectrum;
  std::optional<RamanPulse> raman;

  /// No photon and no Raman pulse.
  static DriveSchedule none();
};

enum class HistoryPolicy {
  zero,           // a_l(t) = 0 for t before the start time
  initial_state,  // a_l(t) = a_l(start) for t before the start time
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 20.0;
  bool retardation = true;
  HistoryPolicy history = HistoryPolicy::zero;
  bool keep_drive = false;  // store b_j(t) in the trajectory

  void validate() const;
};

/// b_j(t) = −i √(Γ/4π) ∫dδω e^{−iδω t} [β̃_R e^{+i k r_j} + β̃_L e^{−i k r_j}],
/// k = k_a + δω/v_g, trapezoidal quadrature on the spectrum grid.
VectorXcd drive_field(const DriveSchedule& schedule, const EmitterArray& array, double t);

double raman_amplitude(const DriveSchedule& schedule, double t);

/// Evaluates b_j(t) at t_start + k·h, k = 0, 1, 2, ... in sequence. The mode
/// phasors are advanced by multiplication and resynchronized periodically.
class DriveSampler {
 public:
  DriveSampler(const DirectionalSpectrum& spectrum, const EmitterArray& array, double t_start,
               double h);

  /// Value at the current sample time; advances to the next one.
  VectorXcd next();

  /// Fills the columns of `out` with consecutive samples. Large grids use a
  /// chirp-z transform in blocks; the result matches next() to rounding.
  void fill(MatrixXcd& out);

 private:
  void resync();

  MatrixXcd coefficients_;  // N × M, quadrature weights and spatial phases folded in
  VectorXd detunings_;
  VectorXcd phasor_;  // e^{−iδω_m t_k}
  VectorXcd step_;    // e^{−iδω_m h}
  double t_start_;
  double h_;
  Index k_ = 0;
};

/// Fixed-step RK4 for
///   ȧ_j = b_j − Σ_l (Γ/2) e^{i k_a r_jl} a_l(t − τ_jl) − (γ/2) a_j − iΩ c_j,
///   ċ_j = −iΩ a_j,
/// with linear interpolation of the delayed history. Every step is recorded.
Trajectory evolve(const EmitterArray& array, const DriveSchedule& schedule,
                  const EmitterState& init, const IntegratorConfig& config);

/// Photon spectrum at the end of the trajectory,
///   β̃_dir(δω) = β̃_dir(δω, 0) − i √(Γ/4π) Σ_j e^{−i k_dir r_j} ∫ e^{iδω t} a_j(t) dt,
/// with the time integral by the trapezoidal rule. The initial spectrum is
/// linearly interpolated onto `grid` (zero outside its own grid). When the
/// chain still holds more than 1e-4 population in |a> a note goes to
/// `warnings` if given.
DirectionalSpectrum output_spectrum(const Trajectory& traj, const EmitterArray& array,
                                    const DirectionalSpectrum& initial_spectrum,
                                    const SpectralGrid& grid, std::ostream* warnings = nullptr);

}  // namespace wgqed
