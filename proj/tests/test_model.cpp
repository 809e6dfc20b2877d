#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "wgqed/errors.hpp"
#include "wgqed/model.hpp"

using namespace wgqed;

TEST_SUITE("model") {

TEST_CASE("physical parameters") {
  PhysicalParams p;
  CHECK(p.k_a() == doctest::Approx(2 * kPi<double> / 0.05));
  CHECK_NOTHROW(p.validate());
  p.gamma_free = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PhysicalParams{};
  p.lambda_a = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("emitter array geometry") {
  const auto arr = testing::pair();
  REQUIRE(arr.size() == 2);
  CHECK(arr.positions()(0) == doctest::Approx(-0.00625));
  CHECK(arr.distance(0, 1) == doctest::Approx(0.0125));
  CHECK(arr.delay(1, 0) == doctest::Approx(0.0125));
  CHECK(arr.min_delay() == doctest::Approx(0.0125));
  CHECK(arr.positions_in_lambda()(1) == doctest::Approx(0.125));
  CHECK(arr.params().k_a() * arr.distance(0, 1) == doctest::Approx(kPi<double> / 2));

  CHECK(std::isinf(testing::array_of({0.0}).min_delay()));

  const auto lengths = EmitterArray::from_lengths(VectorXd::LinSpaced(3, 0.0, 0.1), PhysicalParams{});
  CHECK(lengths.distance(0, 2) == doctest::Approx(0.1));
}

TEST_CASE("emitter array rejects bad geometry") {
  CHECK_THROWS_AS(testing::array_of({}), GeometryError);
  CHECK_THROWS_AS(testing::array_of({0.1, 0.0}), GeometryError);
  CHECK_THROWS_AS(testing::array_of({0.1, 0.1}), GeometryError);
  CHECK_THROWS_AS(testing::array_of({0.0, std::numeric_limits<double>::quiet_NaN()}), GeometryError);
  std::vector<double> pos{0.0, 0.25};
  CHECK(build_emitter_array(std::span<const double>(pos), PhysicalParams{}).size() == 2);
}

TEST_CASE("target states") {
  const auto sym = testing::symmetric();
  CHECK(sym[0] == cdouble(1 / std::sqrt(2.0), 0));
  CHECK(sym.amps().norm() == doctest::Approx(1.0));
  const auto anti = testing::antisymmetric();
  CHECK(anti[1].real() == doctest::Approx(-1 / std::sqrt(2.0)));

  CHECK_THROWS(dicke_target(2, std::vector<int>{1}));
  CHECK_THROWS(dicke_target(2, std::vector<int>{1, 2}));
  CHECK_THROWS(TargetState(VectorXcd::Zero(3)));

  VectorXcd raw(2);
  raw << cdouble(3, 0), cdouble(0, 4);
  const TargetState t(raw);
  CHECK(std::abs(t[1] - cdouble(0, 0.8)) < 1e-15);
}

TEST_CASE("timed-Dicke target for the two-emitter pair") {
  // a_j = e^{i k_a r_j}/√2 with k_a r_j = ∓π/4
  const auto td = timed_dicke_target(testing::pair());
  const double h = 0.5;
  CHECK(std::abs(td[0] - cdouble(h, -h)) < 1e-12);
  CHECK(std::abs(td[1] - cdouble(h, h)) < 1e-12);
}

TEST_CASE("spectral grid") {
  const auto g = SpectralGrid::symmetric(10.0, 2001);
  CHECK(g.size() == 2001);
  CHECK(g.spacing() == doctest::Approx(0.01));
  CHECK(g[0] == -10.0);
  CHECK(g[2000] == 10.0);
  CHECK(g[1000] == doctest::Approx(0.0));
  CHECK(g.weights().sum() == doctest::Approx(20.0));
  CHECK(g.contains(-2.5, 2.5));
  CHECK_FALSE(g.contains(-11, 0));
  CHECK(g == SpectralGrid::symmetric(10.0, 2001));
  CHECK_FALSE(g == SpectralGrid::symmetric(10.0, 2000));
  CHECK_THROWS(SpectralGrid(1.0, 1.0, 5));
  CHECK_THROWS(SpectralGrid(0.0, 1.0, 1));
  CHECK_THROWS(SpectralGrid::symmetric(-1.0, 5));
}

TEST_CASE("spectra and norms") {
  const SpectralGrid g(0.0, 2.0, 3);
  auto s = DirectionalSpectrum::zero(g);
  CHECK(s.is_zero());
  s.right.setConstant(cdouble(0, 1));
  s.left(1) = 2.0;
  CHECK_FALSE(s.is_zero());
  // trapezoid: ∫|β_R|² = 2, |β_L|² = 4 at the midpoint with weight 1
  CHECK(branch_norm(g, s.right) == doctest::Approx(2.0));
  CHECK(spectral_norm(s) == doctest::Approx(6.0));
}

TEST_CASE("emitter state and trajectory indexing") {
  const auto e = EmitterState::excited(testing::symmetric(), 1.5);
  CHECK(e.t == 1.5);
  CHECK(e.population() == doctest::Approx(1.0));
  CHECK(EmitterState::ground(3).population() == 0.0);

  Trajectory tr;
  tr.times = VectorXd::LinSpaced(11, 0.0, 1.0);
  tr.a = MatrixXcd::Zero(11, 2);
  tr.c = MatrixXcd::Zero(11, 2);
  tr.a(4, 1) = 0.5;
  CHECK(tr.index_at(0.41) == 4);
  CHECK(tr.index_at(-3.0) == 0);
  CHECK(tr.index_at(7.0) == 10);
  CHECK(tr.state(4).a(1) == cdouble(0.5));
  CHECK(tr.back().t == 1.0);
}

TEST_CASE("single-precision instantiation") {
  BasicPhysicalParams<float> p;
  const std::vector<float> pos{-0.125f, 0.125f};
  const BasicEmitterArray<float> arr(std::span<const float>(pos), p);
  CHECK(arr.distance(0, 1) == doctest::Approx(0.0125f));
  const auto td = timed_dicke_target(arr);
  CHECK(std::abs(td[1] - std::complex<float>(0.5f, 0.5f)) < 1e-5f);
}

}
