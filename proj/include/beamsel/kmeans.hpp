#pragma once

#include <cstdint>
#include <vector>

#include "beamsel/optimizer.hpp"
#include "beamsel/requirement.hpp"
#include "beamsel/types.hpp"
#include "beamsel/weights.hpp"

namespace beamsel {

/// Per-feature z-score statistics, frozen at fit time and shared between
/// the cluster model and the classifier. Features mix degrees, dB and dBW;
/// raw Euclidean distance would be an EIRP contest.
struct FeatureNormalizer {
  VectorXd means;
  VectorXd std_devs;
  bool had_degenerate = false;  ///< some feature had ~zero spread (std forced to 1)

  VectorXd normalize(const VectorXd& raw) const;
  VectorXd denormalize(const VectorXd& normed) const;
  MatrixXd normalize_rows(const MatrixXd& raw) const;
  bool approx_equal(const FeatureNormalizer& other, double tol = 1e-9) const;

  /// Population statistics over rows.
  static FeatureNormalizer fit(const MatrixXd& raw_rows);
};

struct KmeansOptions {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-6;  ///< max centroid shift declaring convergence
};

struct KmeansDiagnostics {
  std::vector<double> inertia_per_iteration;  ///< winning restart, after each assignment
  int iterations = 0;
  int winning_restart = 0;
};

struct ClusterModel {
  int k = 0;
  MatrixXd centroids;  // k x features, normalized space
  FeatureNormalizer normalizer;
  double inertia = 0.0;
  std::vector<WeightMatrix> representatives;  ///< empty until built

  BeamRequirement centroid_requirement(int cluster) const;
};

/// Lloyd's algorithm with kmeans++ seeding, best of `restarts` runs by
/// final inertia. Own RNG draws throughout so results are identical across
/// platforms and standard libraries.
ClusterModel kmeans_fit(const MatrixXd& features_raw, int k,
                        std::uint64_t seed, const KmeansOptions& opts = {},
                        KmeansDiagnostics* diagnostics = nullptr);

/// Index of the nearest centroid in normalized space; ties to the lowest.
int assign(const ClusterModel& model, const BeamRequirement& req);
VectorXi assign_rows(const ClusterModel& model, const MatrixXd& features_raw);

/// Runs the reference optimizer on each centroid's de-normalized
/// requirement and stores the K resulting matrices in the model.
void build_representatives(const ArrayGeometry& g, ClusterModel& model,
                           const CostWeights& weights,
                           const OptimizeOptions& opts);

}  // namespace beamsel
