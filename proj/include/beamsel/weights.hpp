#pragma once

#include "beamsel/types.hpp"

namespace beamsel {

/// Complex excitation of the chain grid. Amplitudes are linear voltage
/// ratios normalized so the strongest active chain is exactly 1; the
/// absolute drive level lives in per_element_power_w. Chains outside the
/// active mask hold amplitude exactly 0 and phase 0.
struct WeightMatrix {
  ArrayXXd amplitudes;      // rows x cols, >= 0
  ArrayXXd phases_rad;      // rows x cols, wrapped to [-pi, pi)
  ArrayXXb active;          // rows x cols
  double per_element_power_w = 1.0;

  Index rows() const { return amplitudes.rows(); }
  Index cols() const { return amplitudes.cols(); }

  Index active_count() const;

  /// Power summed over active chains: per_element_power_w * sum(a^2).
  double radiated_power_w() const;

  /// amplitude * exp(j*phase), exact zero where inactive.
  MatrixXcd excitation() const;

  /// Restores the canonical form after editing: zeroes inactive entries,
  /// wraps phases, rescales the max active amplitude to 1 and folds the
  /// squared scale into per_element_power_w (radiated power unchanged).
  void canonicalize();

  /// Throws DomainError unless the matrix is in canonical form.
  void validate() const;

  static WeightMatrix uniform(Index rows, Index cols);
};

}  // namespace beamsel
