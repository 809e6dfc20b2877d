#pragma once

#include <complex>

#include <Eigen/Dense>

namespace wgqed {

using Index = Eigen::Index;

template <typename Real>
using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorXc = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using MatrixXc = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using cdouble = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

template <typename Real>
inline constexpr Real kPi = Real(3.141592653589793238462643383279502884L);

template <typename Real>
inline constexpr std::complex<Real> kI{Real(0), Real(1)};

}  // namespace wgqed
