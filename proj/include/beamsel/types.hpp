#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace beamsel {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::ArrayXXd;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

using ArrayXXb = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle in radians to [-pi, pi).
inline double wrap_phase(double x) {
  double y = std::fmod(x + kPi, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  return y - kPi;
}

inline double db_from_power(double p) { return 10.0 * std::log10(p); }
inline double power_from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace beamsel
