// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace remskit {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using CMatrixRM = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kMu0 = 1.25663706212e-6;       // H/m
inline constexpr double kZ0 = kMu0 * kSpeedOfLight;     // free-space impedance, ohm
inline constexpr Complex kJ{0.0, 1.0};

inline double wavenumber(double frequency_hz) { return 2.0 * kPi * frequency_hz / kSpeedOfLight; }
inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

// Threshold on the condition number of every matrix inverted by the solvers.
inline constexpr double kMaxCondition = 1e12;

}  // namespace remskit
