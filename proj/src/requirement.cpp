#include "beamsel/requirement.hpp"

#include <cmath>

#include "beamsel/errors.hpp"

namespace beamsel {

const std::array<const char*, BeamRequirement::kFeatureCount>
    BeamRequirement::kFeatureNames = {
        "bw_az_deg",  "bw_el_deg",    "sll_az_db",   "sll_el_db",
        "eirp_dbw",   "point_el_deg", "point_az_deg"};

VectorXd BeamRequirement::features() const {
  VectorXd f(kFeatureCount);
  f << bw_az_deg, bw_el_deg, sll_az_db, sll_el_db, eirp_dbw, point_el_deg,
      point_az_deg;
  return f;
}

BeamRequirement BeamRequirement::from_features(const VectorXd& f) {
  if (f.size() != kFeatureCount)
    throw DomainError("requirement: feature vector must have 7 entries");
  BeamRequirement r;
  r.bw_az_deg = f(0);
  r.bw_el_deg = f(1);
  r.sll_az_db = f(2);
  r.sll_el_db = f(3);
  r.eirp_dbw = f(4);
  r.point_el_deg = f(5);
  r.point_az_deg = f(6);
  return r;
}

void BeamRequirement::validate() const {
  for (double v : {bw_az_deg, bw_el_deg, sll_az_db, sll_el_db, eirp_dbw,
                   point_el_deg, point_az_deg})
    if (!std::isfinite(v)) throw DomainError("requirement: non-finite field");
  if (!(bw_az_deg > 0.0) || !(bw_el_deg > 0.0))
    throw DomainError("requirement: beamwidths must be positive");
  if (!(sll_az_db < 0.0) || !(sll_el_db < 0.0))
    throw DomainError("requirement: SLL targets must be negative dB");
  if (std::abs(point_el_deg) >= 90.0 || std::abs(point_az_deg) >= 90.0)
    throw DomainError("requirement: pointing outside the visible cone");
}

void CostWeights::validate() const {
  if (!std::isfinite(k1) || !std::isfinite(k2) || !std::isfinite(k3))
    throw DomainError("cost weights must be finite");
  if (k1 < 0.0 || k2 < 0.0 || k3 < 0.0)
    throw DomainError("cost weights must be non-negative");
  if (k1 == 0.0 && k2 == 0.0 && k3 == 0.0)
    throw DomainError("cost weights must not all be zero");
}

CostBreakdown evaluate_cost(const BeamRequirement& req,
                            const PatternMetrics& metrics,
                            const CostWeights& weights, EirpMode mode) {
  weights.validate();
  if (req.bw_az_deg == 0.0 || req.bw_el_deg == 0.0 || req.sll_az_db == 0.0 ||
      req.sll_el_db == 0.0 || req.eirp_dbw == 0.0)
    throw DomainError("cost: requirement target appears as a zero denominator");

  CostBreakdown c;
  c.z1 = std::abs(metrics.beamwidth_az_deg - req.bw_az_deg) / req.bw_az_deg +
         std::abs(metrics.beamwidth_el_deg - req.bw_el_deg) / req.bw_el_deg;
  c.z2 =
      std::abs(metrics.sll_az_db - req.sll_az_db) / std::abs(req.sll_az_db) +
      std::abs(metrics.sll_el_db - req.sll_el_db) / std::abs(req.sll_el_db);
  c.z3 = mode == EirpMode::absolute
             ? std::abs(metrics.eirp_dbw - req.eirp_dbw) /
                   std::abs(req.eirp_dbw)
             : (metrics.eirp_dbw - req.eirp_dbw) / req.eirp_dbw;
  c.total = weights.k1 * c.z1 + weights.k2 * c.z2 + weights.k3 * c.z3;
  return c;
}

}  // namespace beamsel
