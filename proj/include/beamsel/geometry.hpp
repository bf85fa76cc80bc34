#pragma once

#include "beamsel/types.hpp"

namespace beamsel {

/// Planar direct-radiating array. A rows x cols grid of individually
/// controlled subarrays, each itself a small uniform grid of radiators fed
/// through one RF chain. Columns step along the x axis, which maps to
/// azimuth; rows step along y, which maps to elevation.
struct ArrayGeometry {
  double carrier_frequency_hz = 0.0;
  double wavelength_m = 0.0;
  int chain_rows = 0;              ///< controlled subarrays along y
  int chain_cols = 0;              ///< controlled subarrays along x
  int elements_per_subarray = 0;   ///< radiators per subarray, per axis
  double element_pitch_m = 0.0;    ///< spacing of radiators inside a subarray
  double subarray_pitch_m = 0.0;   ///< spacing of subarray centres
  double efficiency = 0.0;         ///< aperture efficiency used when sizing
  double element_exponent = 1.0;   ///< element pattern is cos(theta)^exponent

  double wavenumber() const { return 2.0 * kPi / wavelength_m; }

  /// Throws DomainError on non-physical values.
  void validate() const;

  /// The 19 GHz Ka-band reference design: 4x4 subarrays of 7/8-wavelength
  /// elements on a 36x36 chain grid, 0.9 aperture efficiency.
  static ArrayGeometry standard();
};

/// Positive root of sin(x)/x = value, for value in (0, 1). Bisection to
/// 1e-12 on (0, pi), where the sinc is strictly decreasing.
double inverse_sinc(double value);

/// Number of uniform radiators per axis needed for a given half-power
/// beamwidth: the half-power sinc argument scaled by wavelength over
/// efficiency, beamwidth and twice the pitch, rounded up.
int dimension_array(double beamwidth_rad, double element_pitch_m,
                    double wavelength_m, double efficiency);

}  // namespace beamsel
