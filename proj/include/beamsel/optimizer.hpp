#pragma once

#include <stdexcept>
#include <string>

#include "beamsel/requirement.hpp"
#include "beamsel/synthesis.hpp"

namespace beamsel {

struct OptimizeOptions {
  /// Distinct pattern evaluations allowed. A pattern evaluation is one
  /// (aperture, taper) combination measured; power moves reuse it for free
  /// because drive power shifts EIRP arithmetically without touching the
  /// normalized pattern.
  int budget = 160;
  EirpMode eirp_mode = EirpMode::absolute;
  TaperBounds taper_bounds;
  MeasurementConfig measurement = search_measurement();

  /// Coarser grid and shorter cuts than the reporting defaults: the search
  /// needs relative ordering of candidates, not publication accuracy.
  static MeasurementConfig search_measurement();
};

struct OptimizeResult {
  WeightMatrix weights;
  SynthesisParams params;
  PatternMetrics metrics;
  CostBreakdown cost;
  double elapsed_s = 0.0;
  int evaluations = 0;
};

/// No candidate produced a measurable pattern. Carries the least-bad
/// matrix found so callers can inspect what the search was up against.
class OptimizationFailure : public std::runtime_error {
 public:
  OptimizationFailure(const std::string& what, OptimizeResult best_effort)
      : std::runtime_error(what), best_(std::move(best_effort)) {}

  const OptimizeResult& best_effort() const { return best_; }

 private:
  OptimizeResult best_;
};

/// Two-stage search over (active_rows, active_cols, taper levels, power)
/// with steering fixed to the requirement pointing: an aperture/taper grid
/// around an analytic warm start, then coordinate descent with shrinking
/// steps. Fully deterministic; a larger budget only appends candidates, so
/// the best cost is monotone in the budget.
OptimizeResult optimize_matrix(const ArrayGeometry& g,
                               const BeamRequirement& req,
                               const CostWeights& weights,
                               const OptimizeOptions& opts = {});

}  // namespace beamsel
