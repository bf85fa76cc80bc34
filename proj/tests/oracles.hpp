// Reference implementations used only by tests. Everything here is written
// the slow, obvious way (direct sums, dense scans, finite differences) so a
// bug in the library's fast paths cannot hide in a shared shortcut.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "beamsel/geometry.hpp"
#include "beamsel/mlp.hpp"
#include "beamsel/pattern.hpp"
#include "beamsel/requirement.hpp"
#include "beamsel/types.hpp"
#include "beamsel/weights.hpp"

namespace oracles {

using namespace beamsel;

/// Pattern power at (u, v) by direct summation: chain-grid double loop with
/// centered positions, per-axis cosine subarray sums, cos^q element factor.
inline double direct_power(const ArrayGeometry& g, const WeightMatrix& w,
                           double u, double v) {
  const double k = g.wavenumber();
  const MatrixXcd e = w.excitation();
  const double cx = 0.5 * static_cast<double>(w.cols() - 1);
  const double cy = 0.5 * static_cast<double>(w.rows() - 1);

  Complex chain(0.0, 0.0);
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      const double x = (static_cast<double>(j) - cx) * g.subarray_pitch_m;
      const double y = (static_cast<double>(i) - cy) * g.subarray_pitch_m;
      chain += e(i, j) * std::polar(1.0, k * (x * u + y * v));
    }
  }

  auto sub_axis = [&](double s) {
    const int n = g.elements_per_subarray;
    const double c0 = 0.5 * static_cast<double>(n - 1);
    Complex acc(0.0, 0.0);
    for (int a = 0; a < n; ++a) {
      const double off = (static_cast<double>(a) - c0) * g.element_pitch_m;
      acc += std::polar(1.0, k * off * s);
    }
    return acc;
  };
  const double sub = std::abs(sub_axis(u)) * std::abs(sub_axis(v));

  const double ct2 = std::max(0.0, 1.0 - u * u - v * v);
  const double elem2 = std::pow(ct2, g.element_exponent);
  return std::norm(chain) * sub * sub * elem2;
}

/// Normalized dB cut sampled by direct summation at each angle.
inline std::vector<double> direct_cut_db(const ArrayGeometry& g,
                                         const WeightMatrix& w, CutKind kind,
                                         double fixed_deg,
                                         const std::vector<double>& sweep_deg) {
  const double fixed_s = std::sin(deg2rad(fixed_deg));
  std::vector<double> p(sweep_deg.size());
  for (std::size_t i = 0; i < sweep_deg.size(); ++i) {
    const double s = std::sin(deg2rad(sweep_deg[i]));
    const double u = kind == CutKind::azimuth ? s : fixed_s;
    const double v = kind == CutKind::azimuth ? fixed_s : s;
    p[i] = direct_power(g, w, u, v);
  }
  const double pk = *std::max_element(p.begin(), p.end());
  std::vector<double> db(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    db[i] = 10.0 * std::log10(std::max(p[i] / pk, 1e-40));
  return db;
}

/// -3 dB width from a dense dB scan, linear interpolation between samples.
inline double scan_beamwidth_deg(const std::vector<double>& db,
                                 const std::vector<double>& angles_deg) {
  const std::size_t pk = static_cast<std::size_t>(
      std::max_element(db.begin(), db.end()) - db.begin());
  const double target = db[pk] - 3.0;
  auto cross = [&](long from, long step) {
    for (long i = from; i + step >= 0 &&
                        i + step < static_cast<long>(db.size());
         i += step) {
      const double a = db[static_cast<std::size_t>(i)];
      const double b = db[static_cast<std::size_t>(i + step)];
      if ((a >= target) != (b >= target) || b == target) {
        const double t = (target - a) / (b - a);
        return angles_deg[static_cast<std::size_t>(i)] +
               t * (angles_deg[static_cast<std::size_t>(i + step)] -
                    angles_deg[static_cast<std::size_t>(i)]);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double lo = cross(static_cast<long>(pk), -1);
  const double hi = cross(static_cast<long>(pk), +1);
  return hi - lo;
}

/// Hemisphere power integral by plain dense trapezoid/periodic quadrature,
/// sampling the pattern pointwise through direct_power.
inline double direct_hemisphere_integral(const ArrayGeometry& g,
                                         const WeightMatrix& w, int n_theta,
                                         int n_phi) {
  double total = 0.0;
  const double dt = (kPi / 2.0) / static_cast<double>(n_theta - 1);
  const double dp = 2.0 * kPi / static_cast<double>(n_phi);
  for (int it = 0; it < n_theta; ++it) {
    const double theta = dt * static_cast<double>(it);
    const double wt = (it == 0 || it == n_theta - 1) ? 0.5 : 1.0;
    double ring = 0.0;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = dp * static_cast<double>(ip);
      const double u = std::sin(theta) * std::cos(phi);
      const double v = std::sin(theta) * std::sin(phi);
      ring += direct_power(g, w, u, v);
    }
    total += wt * ring * std::sin(theta);
  }
  return total * dt * dp;
}

/// The cost function, written a second time from its definition.
inline double ref_cost(const BeamRequirement& r, const PatternMetrics& m,
                       const CostWeights& kw, bool signed_eirp) {
  const double z1 = std::abs((m.beamwidth_az_deg - r.bw_az_deg) / r.bw_az_deg) +
                    std::abs((m.beamwidth_el_deg - r.bw_el_deg) / r.bw_el_deg);
  const double z2 =
      std::abs((m.sll_az_db - r.sll_az_db) / std::abs(r.sll_az_db)) +
      std::abs((m.sll_el_db - r.sll_el_db) / std::abs(r.sll_el_db));
  const double z3 = signed_eirp
                        ? (m.eirp_dbw - r.eirp_dbw) / r.eirp_dbw
                        : std::abs(m.eirp_dbw - r.eirp_dbw) / std::abs(r.eirp_dbw);
  return kw.k1 * z1 + kw.k2 * z2 + kw.k3 * z3;
}

/// Central finite difference of the mean cross-entropy loss with respect to
/// one parameter slot, perturbing a copy of the model.
inline double fd_loss_slope(const MlpModel& model, const TrainingBatch& batch,
                            std::size_t layer, Index row, Index col,
                            bool is_bias, double h = 1e-5) {
  auto eval = [&](double delta) {
    MlpModel m = model;
    if (is_bias)
      m.biases[layer](row) += delta;
    else
      m.weights[layer](row, col) += delta;
    return loss_mean(forward_batch(m, batch.inputs), batch.labels);
  };
  return (eval(h) - eval(-h)) / (2.0 * h);
}

/// Best possible k-means inertia for tiny inputs by enumerating every
/// assignment of rows to k clusters (k^n cases).
inline double best_partition_inertia(const MatrixXd& pts, int k) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  const long long total = static_cast<long long>(std::pow(k, n));
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int i = 0; i < n; ++i) {
      assign[static_cast<std::size_t>(i)] = static_cast<int>(c % k);
      c /= k;
    }
    double inertia = 0.0;
    for (int cl = 0; cl < k; ++cl) {
      VectorXd centroid = VectorXd::Zero(pts.cols());
      int count = 0;
      for (int i = 0; i < n; ++i)
        if (assign[static_cast<std::size_t>(i)] == cl) {
          centroid += pts.row(i).transpose();
          ++count;
        }
      if (count == 0) continue;
      centroid /= static_cast<double>(count);
      for (int i = 0; i < n; ++i)
        if (assign[static_cast<std::size_t>(i)] == cl)
          inertia += (pts.row(i).transpose() - centroid).squaredNorm();
    }
    best = std::min(best, inertia);
  }
  return best;
}

}  // namespace oracles
