#pragma once

#include <vector>

#include "beamsel/geometry.hpp"
#include "beamsel/types.hpp"
#include "beamsel/weights.hpp"

namespace beamsel {

/// First-sidelobe level of a long uniform aperture. Taper requests at or
/// above this level cannot lower any sidelobe, so they degenerate to
/// uniform weighting.
inline constexpr double kUniformSllDb = -13.26;

struct TaperBounds {
  double min_db = -60.0;
  double max_db = -13.0;
};

struct NullDirection {
  double theta_rad = 0.0;
  double phi_rad = 0.0;
};

/// Full recipe for one weight matrix: where to point, how hard to taper
/// each axis, how much of the aperture to light up, drive power, and any
/// directions to null out.
struct SynthesisParams {
  double steer_theta_rad = 0.0;
  double steer_phi_rad = 0.0;
  double taper_sll_az_db = -25.0;  ///< column taper (x axis)
  double taper_sll_el_db = -25.0;  ///< row taper (y axis)
  int active_rows = 1;
  int active_cols = 1;
  double power_scale = 1.0;  ///< per-element drive power, watts at amp 1
  std::vector<NullDirection> nulls;
};

/// Progressive phase shifts aligning a rows x cols grid toward
/// (theta0, phi0): -k*(x*u0 + y*v0) at each grid offset, centered indices,
/// wrapped to [-pi, pi).
ArrayXXd steering_phases(const ArrayGeometry& g, double theta0_rad,
                         double phi0_rad, Index rows, Index cols);

/// Dolph-Chebyshev coefficients for an m-element uniform-pitch line,
/// normalized to max 1. Built by expanding the pattern polynomial from its
/// unit-circle zeros, which stays exact for even and odd m alike.
/// Levels at or above kUniformSllDb return the uniform taper.
ArrayXd chebyshev_taper(Index m, double design_sll_db);

/// Projects the excitation orthogonal to the steering vector of null_dir
/// over the same active mask, forcing the chain-grid factor to zero there.
/// Refuses directions that correlate too strongly with the current
/// excitation: nulling inside the main lobe would gut the beam.
WeightMatrix inject_null(const ArrayGeometry& g, const WeightMatrix& w,
                         double null_theta_rad, double null_phi_rad);

/// Chebyshev row/column tapers on a centered active window, times steering
/// phases, then null injection and power scaling.
WeightMatrix synthesize(const ArrayGeometry& g, const SynthesisParams& params,
                        const TaperBounds& bounds = {});

}  // namespace beamsel
