#include "wgqed/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgqed/errors.hpp"

namespace wgqed {

namespace {

double draw(NoiseLaw law, double eps, Rng& rng) {
  if (eps == 0.0) return 0.0;
  if (law == NoiseLaw::gaussian) return std::normal_distribution<double>(0.0, eps)(rng);
  return std::uniform_real_distribution<double>(-eps, eps)(rng);
}

}  // namespace

double fidelity(const VectorXcd& amps, const TargetState& target) {
  if (amps.size() != target.size())
    throw std::invalid_argument("fidelity: state and target lengths differ");
  return std::abs(target.amps().dot(amps));
}

double concurrence_two(const VectorXcd& amps) {
  if (amps.size() != 2) throw std::invalid_argument("concurrence_two: needs exactly two emitters");
  return 2.0 * std::abs(amps(0)) * std::abs(amps(1));
}

void NoiseSpec::validate() const {
  if (!(spectrum_rel >= 0.0 && spectrum_rel < 1.0))
    throw std::invalid_argument("noise: spectrum uncertainty must lie in [0, 1)");
  if (!(position_rel >= 0.0 && position_rel < 1.0))
    throw std::invalid_argument("noise: position uncertainty must lie in [0, 1)");
  if (trials < 1) throw std::invalid_argument("noise: trials must be >= 1");
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    0x77617665u};
  return Rng(seq);
}

DirectionalSpectrum perturb_spectrum(const DirectionalSpectrum& spectrum, const NoiseSpec& noise,
                                     Rng& rng) {
  noise.validate();
  const double eps = noise.spectrum_rel;
  if (eps == 0.0) return spectrum;
  DirectionalSpectrum out = spectrum;
  auto jitter = [&](cdouble v) {
    const double u = draw(noise.law, eps, rng);
    const double phi = draw(noise.law, eps, rng);
    return v * std::polar(1.0 + u, phi);
  };
  for (Index i = 0; i < out.grid.size(); ++i) out.right(i) = jitter(out.right(i));
  for (Index i = 0; i < out.grid.size(); ++i) out.left(i) = jitter(out.left(i));
  const double before = spectral_norm(spectrum);
  const double after = spectral_norm(out);
  if (after > 0.0) {
    const double scale = std::sqrt(before / after);
    out.right *= scale;
    out.left *= scale;
  }
  return out;
}

EmitterArray perturb_positions(const EmitterArray& array, const NoiseSpec& noise, Rng& rng) {
  noise.validate();
  const double eps = noise.position_rel;
  const Index n = array.size();
  if (eps == 0.0 || n < 2) return array;
  const VectorXd& r = array.positions();
  VectorXd spacing(n);
  for (Index j = 0; j < n; ++j) {
    double s = std::numeric_limits<double>::infinity();
    if (j > 0) s = std::min(s, r(j) - r(j - 1));
    if (j + 1 < n) s = std::min(s, r(j + 1) - r(j));
    spacing(j) = s;
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    VectorXd moved = r;
    for (Index j = 0; j < n; ++j) moved(j) += draw(noise.law, eps, rng) * spacing(j);
    bool ordered = true;
    for (Index j = 1; j < n; ++j) ordered = ordered && moved(j) > moved(j - 1);
    if (ordered) return EmitterArray::from_lengths(std::move(moved), array.params());
  }
  throw GeometryError("perturb_positions: could not draw an ordered chain in 100 attempts");
}

}  // namespace wgqed
