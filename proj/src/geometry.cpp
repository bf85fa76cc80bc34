#include "beamsel/geometry.hpp"

#include <cmath>
#include <string>

#include "beamsel/errors.hpp"

namespace beamsel {

void ArrayGeometry::validate() const {
  if (!(carrier_frequency_hz > 0.0))
    throw DomainError("geometry: carrier frequency must be positive");
  if (!(wavelength_m > 0.0))
    throw DomainError("geometry: wavelength must be positive");
  if (chain_rows < 1 || chain_cols < 1)
    throw DomainError("geometry: need at least one chain per axis");
  if (elements_per_subarray < 1)
    throw DomainError("geometry: need at least one element per subarray axis");
  if (!(element_pitch_m > 0.0) || !(subarray_pitch_m > 0.0))
    throw DomainError("geometry: pitches must be positive");
  if (subarray_pitch_m + 1e-12 < elements_per_subarray * element_pitch_m)
    throw DomainError("geometry: subarrays overlap");
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw DomainError("geometry: efficiency must be in (0, 1]");
  if (!(element_exponent >= 0.0))
    throw DomainError("geometry: element exponent must be non-negative");
}

ArrayGeometry ArrayGeometry::standard() {
  ArrayGeometry g;
  g.carrier_frequency_hz = 19.0e9;
  g.wavelength_m = kSpeedOfLight / g.carrier_frequency_hz;
  g.chain_rows = 36;
  g.chain_cols = 36;
  g.elements_per_subarray = 4;
  g.element_pitch_m = 0.875 * g.wavelength_m;
  g.subarray_pitch_m = 4.0 * g.element_pitch_m;  // contiguous 4x4 tiles
  g.efficiency = 0.9;
  g.element_exponent = 1.0;
  return g;
}

double inverse_sinc(double value) {
  if (!(value > 0.0) || !(value < 1.0))
    throw DomainError("inverse_sinc: value must be in (0, 1)");
  double lo = 0.0;   // sinc -> 1 as x -> 0
  double hi = kPi;   // sinc(pi) = 0
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (std::sin(mid) / mid > value)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

int dimension_array(double beamwidth_rad, double element_pitch_m,
                    double wavelength_m, double efficiency) {
  if (!(beamwidth_rad > 0.0))
    throw DomainError("dimension_array: beamwidth must be positive");
  if (!(element_pitch_m > 0.0))
    throw DomainError("dimension_array: element pitch must be positive");
  if (!(wavelength_m > 0.0))
    throw DomainError("dimension_array: wavelength must be positive");
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw DomainError("dimension_array: efficiency must be in (0, 1]");

  const double x_half = inverse_sinc(1.0 / std::sqrt(2.0));
  const double n = x_half * wavelength_m /
                   (efficiency * beamwidth_rad * 2.0 * element_pitch_m);
  // Round up, but forgive float noise when n lands on an integer: an exact
  // design inverted back through this formula must not gain an element.
  const double snapped = std::ceil(n - 1e-9);
  if (snapped > 1e9)
    throw DomainError("dimension_array: beamwidth needs an absurd aperture");
  return static_cast<int>(snapped);
}

}  // namespace beamsel
