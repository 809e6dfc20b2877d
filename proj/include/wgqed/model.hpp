#pragma once

// Physical parameterization, chain geometry, single-excitation state
// containers and spectral grids. Units: Γ = 1 sets the rate scale, v_g = 1 the
// length scale (length in v_g/Γ, time in 1/Γ, detuning in Γ).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgqed/eigen_types.hpp"
#include "wgqed/errors.hpp"

namespace wgqed {

template <typename Real>
struct BasicPhysicalParams {
  Real gamma_wg = Real(1);    // waveguide decay rate Γ
  Real gamma_free = Real(0);  // free-space population decay rate γ
  Real v_g = Real(1);         // group velocity
  Real lambda_a = Real(0.05); // transition wavelength in v_g/Γ

  Real k_a() const { return Real(2) * kPi<Real> / lambda_a; }

  void validate() const {
    if (!(gamma_wg > 0)) throw std::invalid_argument("gamma_wg must be > 0");
    if (!(gamma_free >= 0)) throw std::invalid_argument("gamma_free must be >= 0");
    if (!(v_g > 0)) throw std::invalid_argument("v_g must be > 0");
    if (!(lambda_a > 0)) throw std::invalid_argument("lambda_a must be > 0");
  }
};

/// Emitters along the waveguide axis. Positions are held in length units;
/// pairwise distances and propagation delays are precomputed.
template <typename Real>
class BasicEmitterArray {
 public:
  using Params = BasicPhysicalParams<Real>;

  BasicEmitterArray(std::span<const Real> positions_in_lambda, const Params& params)
      : params_(params) {
    params_.validate();
    VectorX<Real> lengths(static_cast<Index>(positions_in_lambda.size()));
    for (Index j = 0; j < lengths.size(); ++j)
      lengths(j) = positions_in_lambda[static_cast<std::size_t>(j)] * params_.lambda_a;
    init(std::move(lengths));
  }

  static BasicEmitterArray from_lengths(VectorX<Real> positions, const Params& params) {
    return BasicEmitterArray(std::move(positions), params, LengthTag{});
  }

  Index size() const { return positions_.size(); }
  const Params& params() const { return params_; }

  /// Positions in length units (v_g/Γ).
  const VectorX<Real>& positions() const { return positions_; }
  VectorX<Real> positions_in_lambda() const { return positions_ / params_.lambda_a; }

  const MatrixX<Real>& distances() const { return distances_; }
  Real distance(Index j, Index l) const { return distances_(j, l); }
  Real delay(Index j, Index l) const { return distances_(j, l) / params_.v_g; }

  /// Smallest nonzero pairwise delay; +inf for a single emitter.
  Real min_delay() const {
    Real best = std::numeric_limits<Real>::infinity();
    for (Index j = 0; j + 1 < size(); ++j) best = std::min(best, delay(j, j + 1));
    return best;
  }

 private:
  struct LengthTag {};

  BasicEmitterArray(VectorX<Real> positions, const Params& params, LengthTag)
      : params_(params) {
    params_.validate();
    init(std::move(positions));
  }

  void init(VectorX<Real> positions) {
    if (positions.size() == 0) throw GeometryError("emitter array needs at least one position");
    for (Index j = 0; j < positions.size(); ++j) {
      if (!std::isfinite(static_cast<double>(positions(j))))
        throw GeometryError("emitter position is not finite");
      if (j > 0 && !(positions(j) > positions(j - 1)))
        throw GeometryError("emitter positions must be strictly increasing (index " +
                            std::to_string(j) + ")");
    }
    positions_ = std::move(positions);
    const Index n = positions_.size();
    distances_.resize(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < n; ++l) distances_(j, l) = std::abs(positions_(j) - positions_(l));
  }

  Params params_;
  VectorX<Real> positions_;
  MatrixX<Real> distances_;
};

template <typename Real>
BasicEmitterArray<Real> build_emitter_array(std::span<const Real> positions_in_lambda,
                                            const BasicPhysicalParams<Real>& params) {
  return BasicEmitterArray<Real>(positions_in_lambda, params);
}

/// Single-excitation amplitudes a_j(0) to prepare; always unit norm.
template <typename Real>
class BasicTargetState {
 public:
  explicit BasicTargetState(VectorXc<Real> amps) : amps_(std::move(amps)) {
    const Real norm = amps_.norm();
    if (amps_.size() == 0 || !(norm > 0) || !std::isfinite(static_cast<double>(norm)))
      throw std::invalid_argument("target state needs a nonzero, finite amplitude vector");
    amps_ /= norm;
  }

  Index size() const { return amps_.size(); }
  const VectorXc<Real>& amps() const { return amps_; }
  std::complex<Real> operator[](Index j) const { return amps_(j); }

 private:
  VectorXc<Real> amps_;
};

/// Dicke-type state a_j = sign_j / √n.
template <typename Real = double>
BasicTargetState<Real> dicke_target(Index n, std::span<const int> signs) {
  if (n < 1) throw std::invalid_argument("dicke_target: n must be >= 1");
  if (static_cast<Index>(signs.size()) != n)
    throw std::invalid_argument("dicke_target: need one sign per emitter");
  VectorXc<Real> amps(n);
  for (Index j = 0; j < n; ++j) {
    const int s = signs[static_cast<std::size_t>(j)];
    if (s != 1 && s != -1) throw std::invalid_argument("dicke_target: signs must be +1 or -1");
    amps(j) = std::complex<Real>(Real(s), Real(0));
  }
  return BasicTargetState<Real>(std::move(amps));
}

/// Timed-Dicke state a_j = exp(i k_a r_j) / √N.
template <typename Real>
BasicTargetState<Real> timed_dicke_target(const BasicEmitterArray<Real>& array) {
  const Real ka = array.params().k_a();
  VectorXc<Real> amps(array.size());
  for (Index j = 0; j < array.size(); ++j) amps(j) = std::polar(Real(1), ka * array.positions()(j));
  return BasicTargetState<Real>(std::move(amps));
}

template <typename Real>
struct BasicEmitterState {
  VectorXc<Real> a;  // excited |a>
  VectorXc<Real> c;  // metastable |c>
  Real t = Real(0);

  static BasicEmitterState ground(Index n, Real t0 = Real(0)) {
    return {VectorXc<Real>::Zero(n), VectorXc<Real>::Zero(n), t0};
  }
  static BasicEmitterState excited(const BasicTargetState<Real>& s, Real t0 = Real(0)) {
    return {s.amps(), VectorXc<Real>::Zero(s.size()), t0};
  }

  Index size() const { return a.size(); }
  Real population() const { return a.squaredNorm() + c.squaredNorm(); }
};

/// Uniform detuning grid on [lo, hi] with trapezoidal quadrature weights.
template <typename Real>
class BasicSpectralGrid {
 public:
  BasicSpectralGrid() = default;
  BasicSpectralGrid(Real lo, Real hi, Index n_points) : lo_(lo), hi_(hi), n_(n_points) {
    if (n_points < 2) throw std::invalid_argument("spectral grid needs at least 2 points");
    if (!(hi > lo)) throw std::invalid_argument("spectral grid needs hi > lo");
  }

  /// Grid on [-half_width, +half_width].
  static BasicSpectralGrid symmetric(Real half_width, Index n_points) {
    if (!(half_width > 0)) throw std::invalid_argument("spectral grid half-width must be > 0");
    return BasicSpectralGrid(-half_width, half_width, n_points);
  }

  Index size() const { return n_; }
  Real lo() const { return lo_; }
  Real hi() const { return hi_; }
  Real spacing() const { return (hi_ - lo_) / Real(n_ - 1); }
  Real operator[](Index i) const {
    // endpoints exact so that symmetric grids stay symmetric to the last bit
    if (i == n_ - 1) return hi_;
    return lo_ + Real(i) * spacing();
  }

  VectorX<Real> detunings() const {
    VectorX<Real> x(n_);
    for (Index i = 0; i < n_; ++i) x(i) = (*this)[i];
    return x;
  }
  VectorX<Real> weights() const {
    VectorX<Real> w = VectorX<Real>::Constant(n_, spacing());
    w(0) *= Real(0.5);
    w(n_ - 1) *= Real(0.5);
    return w;
  }

  bool contains(Real lo, Real hi) const {
    const Real slack = Real(1e-12) * std::max(Real(1), hi_ - lo_);
    return lo >= lo_ - slack && hi <= hi_ + slack;
  }

  friend bool operator==(const BasicSpectralGrid& a, const BasicSpectralGrid& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.n_ == b.n_;
  }

 private:
  Real lo_ = Real(-1);
  Real hi_ = Real(1);
  Index n_ = 2;
};

/// Continuum-normalized photon amplitudes β̃_R(δω), β̃_L(δω) for the right-
/// (k > 0) and left-propagating (k < 0) branches.
template <typename Real>
struct BasicDirectionalSpectrum {
  BasicSpectralGrid<Real> grid;
  VectorXc<Real> right;
  VectorXc<Real> left;

  static BasicDirectionalSpectrum zero(const BasicSpectralGrid<Real>& g) {
    return {g, VectorXc<Real>::Zero(g.size()), VectorXc<Real>::Zero(g.size())};
  }

  bool is_zero() const { return right.isZero(Real(0)) && left.isZero(Real(0)); }
};

/// Trapezoidal ∫(|β̃_R|² + |β̃_L|²) dδω.
template <typename Real>
Real spectral_norm(const BasicDirectionalSpectrum<Real>& s) {
  const VectorX<Real> w = s.grid.weights();
  return w.dot(s.right.cwiseAbs2()) + w.dot(s.left.cwiseAbs2());
}

template <typename Real>
Real branch_norm(const BasicSpectralGrid<Real>& g, const VectorXc<Real>& branch) {
  return g.weights().dot(branch.cwiseAbs2());
}

/// Uniform-step time series; row n of `a` / `c` holds the amplitudes at times(n).
template <typename Real>
struct BasicTrajectory {
  VectorX<Real> times;
  MatrixXc<Real> a;
  MatrixXc<Real> c;
  MatrixXc<Real> drive;  // optional b_j(t) record, same layout; empty when not kept

  Index steps() const { return times.size(); }
  Index emitters() const { return a.cols(); }

  BasicEmitterState<Real> state(Index n) const {
    return {a.row(n).transpose(), c.row(n).transpose(), times(n)};
  }
  BasicEmitterState<Real> back() const { return state(steps() - 1); }

  /// Index of the sample closest to t.
  Index index_at(Real t) const {
    if (times.size() < 2) return 0;
    const Real dt = times(1) - times(0);
    const auto i = static_cast<Index>(std::llround(static_cast<double>((t - times(0)) / dt)));
    return std::clamp<Index>(i, 0, times.size() - 1);
  }
};

using PhysicalParams = BasicPhysicalParams<double>;
using EmitterArray = BasicEmitterArray<double>;
using TargetState = BasicTargetState<double>;
using EmitterState = BasicEmitterState<double>;
using SpectralGrid = BasicSpectralGrid<double>;
using DirectionalSpectrum = BasicDirectionalSpectrum<double>;
using Trajectory = BasicTrajectory<double>;

}  // namespace wgqed
