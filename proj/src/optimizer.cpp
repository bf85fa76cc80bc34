#include "beamsel/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "beamsel/errors.hpp"
#include "beamsel/pattern.hpp"

namespace beamsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPowerDbLimit = 40.0;  // CD power knob range around analytic

/// Cached measurement of one (aperture, taper) combination. Everything a
/// cost evaluation needs that does not depend on drive power.
struct EvalEntry {
  bool feasible = false;
  double bw_az = 0.0, bw_el = 0.0;
  double sll_az = 0.0, sll_el = 0.0;
  double directivity = 0.0;
  double amp2_sum = 0.0;
};

struct ParamsVec {
  int rows = 0, cols = 0;
  double taper_az = 0.0, taper_el = 0.0;
  double power_db = 0.0;  // offset from the analytic power solve

  auto tie() const { return std::tie(rows, cols, taper_az, taper_el, power_db); }
  bool operator==(const ParamsVec& o) const { return tie() == o.tie(); }
  bool operator<(const ParamsVec& o) const { return tie() < o.tie(); }
};

using Key = std::tuple<int, int, long long, long long>;

Key make_key(int r, int c, double taz, double tel) {
  return {r, c, std::llround(taz * 1e6), std::llround(tel * 1e6)};
}

struct Search {
  const ArrayGeometry& g;
  const BeamRequirement& req;
  const CostWeights& weights;
  const OptimizeOptions& opts;
  double theta0, phi0;
  SllWindow window;
  std::map<Key, EvalEntry> cache;
  int evals = 0;
  bool exhausted = false;

  const EvalEntry* evaluate(int r, int c, double taz, double tel) {
    const Key key = make_key(r, c, taz, tel);
    auto it = cache.find(key);
    if (it != cache.end()) return &it->second;
    if (evals >= opts.budget) {
      exhausted = true;
      return nullptr;
    }

    EvalEntry entry;
    SynthesisParams sp;
    sp.steer_theta_rad = theta0;
    sp.steer_phi_rad = phi0;
    sp.taper_sll_az_db = taz;
    sp.taper_sll_el_db = tel;
    sp.active_rows = r;
    sp.active_cols = c;
    sp.power_scale = 1.0;
    WeightMatrix wm;
    bool built = false;
    try {
      wm = synthesize(g, sp, opts.taper_bounds);
      built = true;
    } catch (const DomainError&) {
      // Unbuildable combination: cache as infeasible without charging the
      // budget, since no pattern was evaluated.
    }
    if (built) {
      ++evals;
      try {
        const MeasurementConfig& mc = opts.measurement;
        const PatternCut az =
            compute_cut(g, wm, CutKind::azimuth, req.point_el_deg,
                        req.point_az_deg, mc.cut_half_span_deg, mc.cut_step_deg);
        const PatternCut el =
            compute_cut(g, wm, CutKind::elevation, req.point_el_deg,
                        req.point_az_deg, mc.cut_half_span_deg, mc.cut_step_deg);
        entry.bw_az = measure_beamwidth(az);
        entry.bw_el = measure_beamwidth(el);
        entry.sll_az = measure_sll(az, window);
        entry.sll_el = measure_sll(el, window);
        entry.directivity = directivity_dbi(g, wm, req.point_el_deg,
                                            req.point_az_deg, mc.quadrature);
        entry.amp2_sum = (wm.amplitudes * wm.amplitudes).sum();
        entry.feasible = true;
      } catch (const MeasurementError&) {
        entry.feasible = false;  // e.g. main lobe wider than the cut
      }
    }
    return &cache.emplace(key, entry).first->second;
  }

  /// Analytic drive power putting EIRP exactly on target, before the CD
  /// power offset: the pattern shape fixes directivity, so power is the one
  /// knob with a closed-form solve.
  double analytic_power_w(const EvalEntry& e) const {
    return std::pow(10.0, (req.eirp_dbw - e.directivity) / 10.0) / e.amp2_sum;
  }

  double cost_of(const EvalEntry& e, double power_db) const {
    if (!e.feasible) return kInf;
    PatternMetrics m;
    m.beamwidth_az_deg = e.bw_az;
    m.beamwidth_el_deg = e.bw_el;
    m.sll_az_db = e.sll_az;
    m.sll_el_db = e.sll_el;
    m.directivity_dbi = e.directivity;
    m.eirp_dbw = req.eirp_dbw + power_db;  // exact: power shifts EIRP in dB
    return evaluate_cost(req, m, weights, opts.eirp_mode).total;
  }
};

/// Chebyshev beam-broadening factor relative to uniform weighting,
/// continued through the low-sidelobe-ratio regime where the usual cosh
/// argument turns imaginary.
double broadening_factor(double sll_db) {
  const double ratio = std::pow(10.0, -sll_db / 20.0);
  const double a = std::acosh(std::max(1.0, ratio));
  const double s = a * a - kPi * kPi;
  const double val = s >= 0.0 ? std::cosh(std::sqrt(s)) : std::cos(std::sqrt(-s));
  const double term = 2.0 * val / ratio;
  return 1.0 + 0.636 * term * term;
}

int clamp_int(double x, int lo, int hi) {
  return std::clamp(static_cast<int>(std::llround(x)), lo, hi);
}

}  // namespace

MeasurementConfig OptimizeOptions::search_measurement() {
  MeasurementConfig m;
  m.cut_half_span_deg = 3.0;
  m.cut_step_deg = 0.01;
  m.quadrature.n_theta = 256;
  m.quadrature.n_phi = 512;
  return m;
}

OptimizeResult optimize_matrix(const ArrayGeometry& g,
                               const BeamRequirement& req,
                               const CostWeights& weights,
                               const OptimizeOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  g.validate();
  req.validate();
  weights.validate();
  if (opts.budget < 50)
    throw DomainError("optimizer: budget below the minimum of 50");

  const Direction pointing = req.pointing();
  Search search{g,
                req,
                weights,
                opts,
                pointing.theta_rad(),
                pointing.phi_rad(),
                opts.measurement.sll_window.period_u > 0.0
                    ? opts.measurement.sll_window
                    : SllWindow::for_geometry(g),
                {},
                0,
                false};

  const TaperBounds& tb = opts.taper_bounds;
  auto clamp_taper = [&](double t) { return std::clamp(t, tb.min_db, tb.max_db); };

  // Warm start: invert the uniform-aperture beamwidth rule per axis, widen
  // by the Chebyshev broadening factor, and aim the tapers straight at the
  // requested sidelobe levels.
  const double uniform_bw_deg =
      rad2deg(0.886 * g.wavelength_m / g.subarray_pitch_m);
  const double taz0 = clamp_taper(req.sll_az_db);
  const double tel0 = clamp_taper(req.sll_el_db);
  const int c0 = clamp_int(broadening_factor(taz0) * uniform_bw_deg /
                               req.bw_az_deg,
                           2, g.chain_cols);
  const int r0 = clamp_int(broadening_factor(tel0) * uniform_bw_deg /
                               req.bw_el_deg,
                           2, g.chain_rows);

  ParamsVec best;
  double best_cost = kInf;
  bool any_feasible = false;

  auto try_candidate = [&](ParamsVec pv) -> double {
    if (search.exhausted) return kInf;
    const EvalEntry* e = search.evaluate(pv.rows, pv.cols, pv.taper_az,
                                         pv.taper_el);
    if (e == nullptr) return kInf;
    const double cost = search.cost_of(*e, pv.power_db);
    if (std::isfinite(cost)) {
      any_feasible = true;
      if (cost < best_cost || (cost == best_cost && pv < best)) {
        best_cost = cost;
        best = pv;
      }
    }
    return cost;
  };

  // Stage 1: aperture grid around the warm start at the target tapers,
  // then a joint taper nudge at the best aperture so far.
  try_candidate({r0, c0, taz0, tel0, 0.0});
  for (int dr : {-4, -2, 0, 2, 4}) {
    for (int dc : {-4, -2, 0, 2, 4}) {
      ParamsVec pv{std::clamp(r0 + dr, 2, g.chain_rows),
                   std::clamp(c0 + dc, 2, g.chain_cols), taz0, tel0, 0.0};
      try_candidate(pv);
    }
  }
  if (any_feasible) {
    for (double dt : {-1.0, 1.0}) {
      ParamsVec pv = best;
      pv.taper_az = clamp_taper(pv.taper_az + dt);
      pv.taper_el = clamp_taper(pv.taper_el + dt);
      try_candidate(pv);
    }
  }

  // Stage 2: coordinate descent with shrinking steps.
  if (any_feasible) {
    ParamsVec cur = best;
    double cur_cost = best_cost;
    double step_rows = 2.0, step_cols = 2.0;
    double step_tel = 2.0, step_taz = 2.0, step_pow = 1.0;
    enum class Knob { rows, cols, taper_el, taper_az, power };
    const Knob order[] = {Knob::rows, Knob::cols, Knob::taper_el,
                          Knob::taper_az, Knob::power};

    while (!search.exhausted) {
      bool improved = false;
      for (Knob knob : order) {
        for (double sign : {1.0, -1.0}) {
          if (search.exhausted) break;
          ParamsVec cand = cur;
          switch (knob) {
            case Knob::rows:
              cand.rows = std::clamp(
                  cur.rows + static_cast<int>(sign * std::llround(step_rows)),
                  2, g.chain_rows);
              break;
            case Knob::cols:
              cand.cols = std::clamp(
                  cur.cols + static_cast<int>(sign * std::llround(step_cols)),
                  2, g.chain_cols);
              break;
            case Knob::taper_el:
              cand.taper_el = clamp_taper(cur.taper_el + sign * step_tel);
              break;
            case Knob::taper_az:
              cand.taper_az = clamp_taper(cur.taper_az + sign * step_taz);
              break;
            case Knob::power:
              cand.power_db = std::clamp(cur.power_db + sign * step_pow,
                                         -kPowerDbLimit, kPowerDbLimit);
              break;
          }
          if (cand == cur) continue;
          const double cost = try_candidate(cand);
          if (cost < cur_cost || (cost == cur_cost && cand < cur)) {
            cur = cand;
            cur_cost = cost;
            improved = true;
          }
        }
      }
      if (!improved) {
        const bool at_floor = step_rows <= 1.0 && step_cols <= 1.0 &&
                              step_tel <= 0.25 && step_taz <= 0.25 &&
                              step_pow <= 0.1;
        if (at_floor) break;
        step_rows = std::max(1.0, 0.5 * step_rows);
        step_cols = std::max(1.0, 0.5 * step_cols);
        step_tel = std::max(0.25, 0.5 * step_tel);
        step_taz = std::max(0.25, 0.5 * step_taz);
        step_pow = std::max(0.1, 0.5 * step_pow);
      }
    }
  }

  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  if (!any_feasible) {
    SynthesisParams sp;
    sp.steer_theta_rad = search.theta0;
    sp.steer_phi_rad = search.phi0;
    sp.taper_sll_az_db = taz0;
    sp.taper_sll_el_db = tel0;
    sp.active_rows = r0;
    sp.active_cols = c0;
    sp.power_scale = 1.0;
    OptimizeResult best_effort;
    best_effort.weights = synthesize(g, sp, tb);
    best_effort.params = sp;
    best_effort.cost = CostBreakdown{kInf, kInf, kInf, kInf};
    best_effort.elapsed_s = elapsed();
    best_effort.evaluations = search.evals;
    throw OptimizationFailure(
        "optimizer: no candidate produced a measurable pattern", best_effort);
  }

  const EvalEntry& e =
      *search.evaluate(best.rows, best.cols, best.taper_az, best.taper_el);
  SynthesisParams sp;
  sp.steer_theta_rad = search.theta0;
  sp.steer_phi_rad = search.phi0;
  sp.taper_sll_az_db = best.taper_az;
  sp.taper_sll_el_db = best.taper_el;
  sp.active_rows = best.rows;
  sp.active_cols = best.cols;
  sp.power_scale =
      search.analytic_power_w(e) * std::pow(10.0, best.power_db / 10.0);

  OptimizeResult result;
  result.weights = synthesize(g, sp, tb);
  result.params = sp;
  result.metrics = measure_metrics(g, result.weights, req.point_el_deg,
                                   req.point_az_deg, opts.measurement);
  result.cost = evaluate_cost(req, result.metrics, weights, opts.eirp_mode);
  result.elapsed_s = elapsed();
  result.evaluations = search.evals;
  return result;
}

}  // namespace beamsel
