#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wgqed/metrics.hpp"
#include "wgqed/spectrum.hpp"

using namespace wgqed;

TEST_SUITE("metrics") {

TEST_CASE("fidelity examples") {
  const auto td = timed_dicke_target(testing::pair());
  VectorXcd a(2);
  a << cdouble(0.492, -0.492), cdouble(0.492, 0.492);
  CHECK(fidelity(a, td) == doctest::Approx(0.984).epsilon(1e-3));
  CHECK(fidelity(td.amps(), td) == doctest::Approx(1.0));
  VectorXcd e0 = VectorXcd::Zero(3), e1 = VectorXcd::Zero(3);
  e0(0) = 1;
  e1(1) = 1;
  CHECK(fidelity(e1, TargetState(e0)) == 0.0);
  CHECK_THROWS(fidelity(e1, td));
}

TEST_CASE("fidelity ignores global phases and obeys Cauchy-Schwarz") {
  const auto td = timed_dicke_target(testing::pair());
  VectorXcd a(2);
  a << cdouble(0.3, -0.1), cdouble(0.2, 0.6);
  const double f = fidelity(a, td);
  CHECK(fidelity(a * std::polar(1.0, 1.234), td) == doctest::Approx(f));
  CHECK(fidelity(a, TargetState(td.amps() * std::polar(1.0, -0.5))) == doctest::Approx(f));
  CHECK(f <= a.norm() + 1e-15);
  CHECK(fidelity(0.7 * td.amps(), td) == doctest::Approx(0.7));
}

TEST_CASE("two-emitter concurrence") {
  VectorXcd a(2);
  a << 0.686, cdouble(0, 0.686);
  CHECK(concurrence_two(a) == doctest::Approx(0.94).epsilon(1e-3));
  a << 0.8, 0.0;
  CHECK(concurrence_two(a) == 0.0);
  a << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(concurrence_two(a) == doctest::Approx(1.0));
  a << cdouble(0.3, 0.2), cdouble(-0.1, 0.5);
  CHECK(concurrence_two(a) <= a.squaredNorm());
  CHECK_THROWS(concurrence_two(VectorXcd::Zero(3)));
}

TEST_CASE("noise spec validation") {
  NoiseSpec n;
  CHECK_NOTHROW(n.validate());
  n.spectrum_rel = 1.0;
  CHECK_THROWS(n.validate());
  n = NoiseSpec{};
  n.trials = 0;
  CHECK_THROWS(n.validate());
  n = NoiseSpec{};
  n.position_rel = -0.1;
  CHECK_THROWS(n.validate());
}

TEST_CASE("zero noise is the identity") {
  const auto arr = testing::pair();
  const auto spec = time_reversed_input(arr, testing::symmetric(), SpectralGrid::symmetric(10.0, 201), 5.0);
  NoiseSpec n;
  Rng rng = trial_rng(7, 0);
  const auto s = perturb_spectrum(spec, n, rng);
  CHECK(s.right == spec.right);
  CHECK(s.left == spec.left);
  const auto p = perturb_positions(arr, n, rng);
  CHECK(p.positions() == arr.positions());
}

TEST_CASE("spectrum noise keeps the norm and is reproducible") {
  const auto arr = testing::pair();
  const auto spec = time_reversed_input(arr, timed_dicke_target(arr), SpectralGrid::symmetric(10.0, 401), 5.0);
  NoiseSpec n;
  n.spectrum_rel = 0.1;
  Rng r1 = trial_rng(1, 3), r2 = trial_rng(1, 3), r3 = trial_rng(1, 4);
  const auto a = perturb_spectrum(spec, n, r1);
  const auto b = perturb_spectrum(spec, n, r2);
  const auto c = perturb_spectrum(spec, n, r3);
  CHECK(a.right == b.right);
  CHECK(a.left == b.left);
  CHECK(a.right != c.right);
  CHECK(spectral_norm(a) == doctest::Approx(spectral_norm(spec)).epsilon(1e-12));
  // per-sample modulus change bounded by (1 ± ε) before the global rescale
  const double scale = std::sqrt(spectral_norm(spec) / spectral_norm(a));
  for (Index i = 0; i < spec.grid.size(); i += 10) {
    if (std::abs(spec.right(i)) < 1e-12) continue;
    const double ratio = std::abs(a.right(i)) / (scale * std::abs(spec.right(i)));
    CHECK(ratio >= 0.9 - 1e-9);
    CHECK(ratio <= 1.1 + 1e-9);
  }
  n.law = NoiseLaw::gaussian;
  Rng r4 = trial_rng(1, 3);
  CHECK(perturb_spectrum(spec, n, r4).right != a.right);
}

TEST_CASE("position noise stays within a fraction of the spacing") {
  std::vector<double> pos;
  for (int j = 1; j <= 10; ++j) pos.push_back(-1.125 + 0.25 * j);
  const auto arr = testing::array_of(pos);
  NoiseSpec n;
  n.position_rel = 0.1;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng = trial_rng(1, trial);
    const auto p = perturb_positions(arr, n, rng);
    const VectorXd shift = (p.positions_in_lambda() - arr.positions_in_lambda()).cwiseAbs();
    CHECK(shift.maxCoeff() <= 0.025 + 1e-12);
    CHECK(shift.maxCoeff() > 0);
    CHECK(p.params().lambda_a == arr.params().lambda_a);
  }
  Rng a = trial_rng(9, 1), b = trial_rng(9, 1);
  CHECK(perturb_positions(arr, n, a).positions() == perturb_positions(arr, n, b).positions());
}

}
