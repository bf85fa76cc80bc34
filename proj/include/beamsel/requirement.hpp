#pragma once

#include <array>

#include "beamsel/pattern.hpp"
#include "beamsel/types.hpp"

namespace beamsel {

/// One beam request: the 7 quantities every downstream stage consumes, in
/// the canonical feature order of features()/from_features() and of all
/// dataset CSV columns.
struct BeamRequirement {
  double bw_az_deg = 0.0;
  double bw_el_deg = 0.0;
  double sll_az_db = 0.0;
  double sll_el_db = 0.0;
  double eirp_dbw = 0.0;
  double point_el_deg = 0.0;
  double point_az_deg = 0.0;

  VectorXd features() const;
  static BeamRequirement from_features(const VectorXd& f);

  Direction pointing() const {
    return Direction::from_el_az_deg(point_el_deg, point_az_deg);
  }

  /// Structural checks only (positive beamwidths, negative SLL, pointing
  /// inside the visible cone); range membership is the sampler's business.
  void validate() const;

  static constexpr int kFeatureCount = 7;
  static const std::array<const char*, kFeatureCount> kFeatureNames;
};

struct CostWeights {
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;

  void validate() const;
};

/// How the EIRP error term treats sign. The symmetric absolute form is the
/// default; the signed form matches the cost expression literally but
/// rewards arbitrarily low EIRP, so it stays behind a flag.
enum class EirpMode { absolute, signed_diff };

struct CostBreakdown {
  double z1 = 0.0;  ///< beamwidth error term
  double z2 = 0.0;  ///< sidelobe error term
  double z3 = 0.0;  ///< EIRP error term
  double total = 0.0;
};

/// Weighted relative-error sum between requested and measured beam
/// quantities. dB quantities are compared as dB values with |target|
/// denominators.
CostBreakdown evaluate_cost(const BeamRequirement& req,
                            const PatternMetrics& metrics,
                            const CostWeights& weights,
                            EirpMode mode = EirpMode::absolute);

}  // namespace beamsel
