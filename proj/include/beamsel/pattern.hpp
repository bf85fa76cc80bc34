#pragma once

#include "beamsel/geometry.hpp"
#include "beamsel/types.hpp"
#include "beamsel/weights.hpp"

namespace beamsel {

/// Far-field direction in sine space. u pairs with the x/azimuth axis and
/// v with the y/elevation axis: u = sin(az), v = sin(el). The polar angle
/// off boresight is asin(hypot(u, v)).
struct Direction {
  double u = 0.0;
  double v = 0.0;

  static Direction from_el_az_deg(double el_deg, double az_deg);
  static Direction from_theta_phi(double theta_rad, double phi_rad);

  double theta_rad() const;
  double phi_rad() const;
  double cos_theta() const;  ///< clamped to 0 past the horizon
};

enum class CutKind { azimuth, elevation };

/// 1-D slice of the normalized power pattern, uniform in angle. The swept
/// coordinate is azimuth for an azimuth cut (elevation held at
/// fixed_angle_deg) and vice versa. Peak sample is exactly 0 dB; samples
/// are floored 400 dB below the peak so exact nulls stay finite.
struct PatternCut {
  CutKind kind = CutKind::azimuth;
  double fixed_angle_deg = 0.0;
  double start_deg = 0.0;
  double step_deg = 0.0;
  ArrayXd mag_db;

  Index size() const { return mag_db.size(); }
  double angle_deg(Index i) const {
    return start_deg + step_deg * static_cast<double>(i);
  }
};

/// Hemisphere quadrature for the directivity integral: composite trapezoid
/// in theta, periodic rule in phi. Theta nodes are split into a dense panel
/// covering the main lobe and a coarse panel for the rest; a uniform grid
/// would need several thousand nodes to sample a 0.4-degree lobe honestly.
struct QuadratureGrid {
  int n_theta = 512;
  int n_phi = 2048;
  double panel_split_deg = 10.0;  ///< dense panel covers [0, split]
  double panel_fraction = 0.75;   ///< share of theta nodes in the dense panel
};

/// Sidelobe search window in sine space. Sidelobes are measured within
/// span_periods grating-lobe periods of the main-lobe peak; neighborhoods
/// of the grating lobes themselves (one null-to-null main-lobe width) are
/// excluded, since the chain pitch puts them well above any taper floor.
struct SllWindow {
  double period_u = 0.0;
  double span_periods = 1.0;

  static SllWindow for_geometry(const ArrayGeometry& g) {
    return SllWindow{g.wavelength_m / g.subarray_pitch_m, 1.0};
  }
};

struct MeasurementConfig {
  double cut_half_span_deg = 8.7;
  double cut_step_deg = 0.01;
  QuadratureGrid quadrature;
  SllWindow sll_window;  ///< period_u == 0 means derive from geometry
};

struct PatternMetrics {
  double beamwidth_az_deg = 0.0;
  double beamwidth_el_deg = 0.0;
  double sll_az_db = 0.0;
  double sll_el_db = 0.0;
  double eirp_dbw = 0.0;
  double directivity_dbi = 0.0;
  double peak_el_deg = 0.0;
  double peak_az_deg = 0.0;
};

/// Complex pattern value: chain-grid sum x subarray factor x element
/// factor cos(theta)^q. Chain indices are centered on the array middle, so
/// symmetric tapers produce a real boresight sum.
Complex array_factor(const ArrayGeometry& g, const WeightMatrix& w,
                     double theta_rad, double phi_rad);
Complex array_factor(const ArrayGeometry& g, const WeightMatrix& w,
                     const Direction& d);

PatternCut compute_cut(const ArrayGeometry& g, const WeightMatrix& w,
                       CutKind kind, double center_el_deg,
                       double center_az_deg, double half_span_deg = 8.7,
                       double step_deg = 0.01);

/// Angular separation of the -3 dB crossings bracketing the cut peak,
/// located by linear interpolation in dB.
double measure_beamwidth(const PatternCut& cut);

/// Highest local maximum outside the main lobe but inside the window.
/// The main lobe spans from the peak down to the first local minimum on
/// each side.
double measure_sll(const PatternCut& cut, const SllWindow& window);

/// 10*log10(4*pi*|AF(steer)|^2 / integral of |AF|^2 over the visible
/// hemisphere).
double directivity_dbi(const ArrayGeometry& g, const WeightMatrix& w,
                       double steer_el_deg, double steer_az_deg,
                       const QuadratureGrid& grid = {});

/// EIRP in dBW: radiated power (per-element power times sum of squared
/// active amplitudes) plus directivity toward the steer direction.
double compute_eirp(const ArrayGeometry& g, const WeightMatrix& w,
                    double steer_el_deg, double steer_az_deg,
                    const QuadratureGrid& grid = {});

/// Full metric set from two cuts through `center` plus the directivity
/// integral. EIRP is evaluated toward `center` (the commanded pointing).
PatternMetrics measure_metrics(const ArrayGeometry& g, const WeightMatrix& w,
                               double center_el_deg, double center_az_deg,
                               const MeasurementConfig& cfg = {});

}  // namespace beamsel
