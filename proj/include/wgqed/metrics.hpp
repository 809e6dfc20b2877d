#pragma once

#include <cstdint>
#include <random>

#include "wgqed/eigen_types.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

/// Amplitude overlap |Σ_j conj(target_j) a_j|, without renormalizing `amps`.
double fidelity(const VectorXcd& amps, const TargetState& target);

/// 2|a_1||a_2| for a two-emitter single-excitation state.
double concurrence_two(const VectorXcd& amps);

enum class NoiseLaw {
  uniform,   // u, φ ~ U[−ε, ε]
  gaussian,  // u, φ ~ N(0, ε²)
};

struct NoiseSpec {
  double spectrum_rel = 0.0;
  double position_rel = 0.0;
  std::uint64_t seed = 1;
  int trials = 1;
  NoiseLaw law = NoiseLaw::uniform;

  void validate() const;
};

using Rng = std::mt19937_64;

/// Independent generator for one Monte-Carlo trial, derived from (seed, trial).
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Multiplies every sample of both branches by (1 + u) e^{iφ}, then rescales
/// back to the input spectral norm.
DirectionalSpectrum perturb_spectrum(const DirectionalSpectrum& spectrum, const NoiseSpec& noise,
                                     Rng& rng);

/// Shifts each emitter by u × (its nearest-neighbour spacing), u drawn per
/// the noise law with width position_rel. Draws are repeated (up to 100
/// times) if the order of the chain would change.
EmitterArray perturb_positions(const EmitterArray& array, const NoiseSpec& noise, Rng& rng);

}  // namespace wgqed
