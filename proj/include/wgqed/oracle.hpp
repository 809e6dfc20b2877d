#pragma once

// Brute-force reference: emitters coupled to an explicit, finite set of
// waveguide modes, integrated without eliminating the field. Used only to
// check the delay-equation solver and the spectrum formulas.

#include <optional>
#include <vector>

#include "wgqed/dynamics.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

/// Field amplitudes β̃(δω, t) in the interaction picture, continuum-normalized
/// like DirectionalSpectrum: the photon norm is the trapezoidal integral.
struct ModeField {
  SpectralGrid grid;
  VectorXcd right;
  VectorXcd left;

  static ModeField vacuum(const SpectralGrid& grid);
  double norm() const;
};

struct FullState {
  EmitterState emitters;
  ModeField field;
};

double total_norm(const FullState& state);

/// Mode grid of spacing ≤ max_spacing covering ±min_half_width that contains
/// every point of `source` (its spacing is an integer fraction of the source
/// spacing). Returns `source` itself when it already qualifies.
SpectralGrid mode_grid_for(const SpectralGrid& source, double min_half_width, double max_spacing);

/// Places a photon spectrum on the mode grid so that it produces the same
/// drive b_j(t) as the spectrum does in the delay-equation solver. Every source
/// point must coincide with a mode. For identical grids this is a plain copy.
ModeField field_from_spectrum(const DirectionalSpectrum& spectrum, const SpectralGrid& modes);

/// Reads the mode amplitudes back as a spectrum on the mode grid.
DirectionalSpectrum field_spectrum(const ModeField& field);

struct OracleConfig {
  IntegratorConfig integrator;
  Index checkpoint_every = 10;  // steps between stored states
  // Gaussian width σ (in Γ) of the coupling envelope, g_m² ∝ exp(−δω²/2σ²);
  // 0 keeps the coupling flat up to the band edge.
  double cutoff = 0.0;
};

/// Envelope width that resolves the shortest emitter-to-emitter delay,
/// σ = 3 / τ_min (0 for a single emitter), and a band half-width of 3σ
/// (at least 10Γ).
struct OracleBand {
  double cutoff = 0.0;
  double half_width = 10.0;
};
OracleBand resolving_band(const EmitterArray& array);

/// RK4 on the full single-excitation amplitude equations with discrete modes,
/// coupling g_m = √(Γ w_m / 4π) per branch (w_m the trapezoid weight) and the
/// phases e^{∓iδω t} kept explicit. γ enters as −(γ/2) a_j. Requires the mode
/// grid to span at least ±10Γ and its spacing to stay below 2π/t_end.
std::vector<FullState> oracle_evolve(const EmitterArray& array, const FullState& init,
                                     const std::optional<RamanPulse>& raman,
                                     const OracleConfig& config);

}  // namespace wgqed
