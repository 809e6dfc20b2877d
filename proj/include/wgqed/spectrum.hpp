#pragma once

// Collective spectral response of the chain and design of the time-reversed
// single-photon input.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <Eigen/LU>

#include "wgqed/eigen_types.hpp"
#include "wgqed/errors.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

template <typename Real>
using ChiVector = VectorXc<Real>;

/// Reciprocal condition estimates below this are treated as singular.
inline constexpr double kMinRcond = 1e-12;

/// [M]_jl = (Γ/2) exp(i (k_a + δω/v_g) r_jl) − i δω δ_jl.
template <typename Real>
MatrixXc<Real> collective_matrix(const BasicEmitterArray<Real>& array,
                                 std::type_identity_t<Real> delta_omega) {
  const auto& p = array.params();
  const Real k = p.k_a() + delta_omega / p.v_g;
  const Index n = array.size();
  MatrixXc<Real> m(n, n);
  for (Index j = 0; j < n; ++j) {
    m(j, j) = std::complex<Real>(p.gamma_wg / 2, -delta_omega);
    for (Index l = j + 1; l < n; ++l) {
      const auto v = std::polar(p.gamma_wg / 2, k * array.distance(j, l));
      m(j, l) = v;
      m(l, j) = v;
    }
  }
  return m;
}

namespace detail {

template <typename Real>
VectorXc<Real> solve_collective(const BasicEmitterArray<Real>& array, const VectorXc<Real>& rhs,
                                Real delta_omega) {
  const MatrixXc<Real> m = collective_matrix(array, delta_omega);
  const Eigen::PartialPivLU<MatrixXc<Real>> lu(m);
  const Real rcond = lu.rcond();
  if (!(rcond > Real(kMinRcond))) {
    std::ostringstream msg;
    msg << "collective matrix is singular at delta_omega = " << static_cast<double>(delta_omega)
        << " (rcond " << static_cast<double>(rcond)
        << "): the target overlaps a non-decaying subradiant mode at this detuning";
    throw SolverError(msg.str(), static_cast<double>(delta_omega), static_cast<double>(rcond));
  }
  return lu.solve(rhs);
}

/// exp(-i k r_j) for every emitter.
template <typename Real>
VectorXc<Real> outgoing_phases(const BasicEmitterArray<Real>& array, Real k) {
  VectorXc<Real> ph(array.size());
  for (Index j = 0; j < array.size(); ++j) ph(j) = std::polar(Real(1), -k * array.positions()(j));
  return ph;
}

template <typename Real>
Real coupling_prefactor(const BasicPhysicalParams<Real>& p) {
  return std::sqrt(p.gamma_wg / (Real(4) * kPi<Real>));
}

}  // namespace detail

/// χ(δω) = M(δω)⁻¹ a(0), by LU solve.
template <typename Real>
ChiVector<Real> solve_chi(const BasicEmitterArray<Real>& array,
                          const BasicTargetState<Real>& target,
                          std::type_identity_t<Real> delta_omega) {
  if (target.size() != array.size())
    throw std::invalid_argument("solve_chi: target size does not match the array");
  return detail::solve_collective(array, target.amps(), delta_omega);
}

/// Late-time spectrum emitted by the chain prepared in `initial` with no input:
/// β̃_dir(δω) = −i √(Γ/4π) Σ_j exp(−i k_dir r_j) χ_j(δω), k_R = k_a + δω/v_g, k_L = −k_R.
template <typename Real>
BasicDirectionalSpectrum<Real> emission_spectrum(const BasicEmitterArray<Real>& array,
                                                 const BasicTargetState<Real>& initial,
                                                 const BasicSpectralGrid<Real>& grid) {
  const auto& p = array.params();
  const std::complex<Real> pref = -kI<Real> * detail::coupling_prefactor(p);
  auto out = BasicDirectionalSpectrum<Real>::zero(grid);
  for (Index i = 0; i < grid.size(); ++i) {
    const Real dw = grid[i];
    const Real k = p.k_a() + dw / p.v_g;
    const ChiVector<Real> chi = solve_chi(array, initial, dw);
    out.right(i) = pref * detail::outgoing_phases(array, k).cwiseProduct(chi).sum();
    out.left(i) = pref * detail::outgoing_phases(array, -k).cwiseProduct(chi).sum();
  }
  return out;
}

/// Input photon that drives the chain into `target` at time t0: the
/// conjugated, direction-reversed emission of conj(target),
/// β̃_dir(δω) = i √(Γ/4π) Σ_jl exp(−i k_dir r_j) [M⁻¹]*_jl a_l · exp(i δω t0),
/// rescaled to unit spectral norm.
template <typename Real>
BasicDirectionalSpectrum<Real> time_reversed_input(const BasicEmitterArray<Real>& array,
                                                   const BasicTargetState<Real>& target,
                                                   const BasicSpectralGrid<Real>& grid, std::type_identity_t<Real> t0) {
  if (target.size() != array.size())
    throw std::invalid_argument("time_reversed_input: target size does not match the array");
  const auto& p = array.params();
  const std::complex<Real> pref = kI<Real> * detail::coupling_prefactor(p);
  const VectorXc<Real> conj_target = target.amps().conjugate();
  auto out = BasicDirectionalSpectrum<Real>::zero(grid);
  for (Index i = 0; i < grid.size(); ++i) {
    const Real dw = grid[i];
    const Real k = p.k_a() + dw / p.v_g;
    // [M⁻¹]* a = conj(M⁻¹ conj(a))
    const VectorXc<Real> x = detail::solve_collective(array, conj_target, dw).conjugate();
    const std::complex<Real> shift = pref * std::polar(Real(1), dw * t0);
    out.right(i) = shift * detail::outgoing_phases(array, k).cwiseProduct(x).sum();
    out.left(i) = shift * detail::outgoing_phases(array, -k).cwiseProduct(x).sum();
  }
  const Real norm = spectral_norm(out);
  if (!(norm > 0)) throw std::runtime_error("time_reversed_input: designed spectrum vanishes");
  const Real scale = Real(1) / std::sqrt(norm);
  out.right *= scale;
  out.left *= scale;
  return out;
}

namespace detail {

template <typename Real>
std::complex<Real> interpolate(const BasicSpectralGrid<Real>& g, const VectorXc<Real>& v, Real x) {
  const Real pos = (x - g.lo()) / g.spacing();
  auto i = static_cast<Index>(std::floor(static_cast<double>(pos)));
  i = std::clamp<Index>(i, 0, g.size() - 2);
  const Real f = std::clamp(pos - Real(i), Real(0), Real(1));
  return v(i) * (Real(1) - f) + v(i + 1) * f;
}

}  // namespace detail

/// Samples `spectrum` at n uniformly spaced detunings spanning [lo, hi].
/// The sampled values are kept as they are: spectral weight outside the
/// window is discarded rather than redistributed, so the result carries norm
/// below one when the window clips the spectrum.
template <typename Real>
BasicDirectionalSpectrum<Real> coarse_sample(const BasicDirectionalSpectrum<Real>& spectrum,
                                             Index n, std::type_identity_t<Real> lo,
                                             std::type_identity_t<Real> hi) {
  if (n < 2) throw std::invalid_argument("coarse_sample: need at least 2 components");
  if (!spectrum.grid.contains(lo, hi))
    throw std::invalid_argument("coarse_sample: extent lies outside the source grid");
  const BasicSpectralGrid<Real> coarse(lo, hi, n);
  auto out = BasicDirectionalSpectrum<Real>::zero(coarse);
  for (Index i = 0; i < n; ++i) {
    out.right(i) = detail::interpolate(spectrum.grid, spectrum.right, coarse[i]);
    out.left(i) = detail::interpolate(spectrum.grid, spectrum.left, coarse[i]);
  }
  return out;
}

/// |⟨x|y⟩| / (‖x‖ ‖y‖) over both branches; both spectra must share a grid.
template <typename Real>
Real spectral_overlap(const BasicDirectionalSpectrum<Real>& x,
                      const BasicDirectionalSpectrum<Real>& y) {
  if (!(x.grid == y.grid)) throw std::invalid_argument("spectral_overlap: grids differ");
  const VectorX<Real> w = x.grid.weights();
  const std::complex<Real> ip =
      (x.right.conjugate().cwiseProduct(y.right) + x.left.conjugate().cwiseProduct(y.left))
          .cwiseProduct(w.template cast<std::complex<Real>>())
          .sum();
  return std::abs(ip) / std::sqrt(spectral_norm(x) * spectral_norm(y));
}

}  // namespace wgqed
