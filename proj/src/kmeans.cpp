#include "beamsel/kmeans.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "beamsel/errors.hpp"
#include "beamsel/rng.hpp"

namespace beamsel {

namespace {

int nearest_centroid(const MatrixXd& centroids, const VectorXd& x) {
  int best = 0;
  double best_d2 = (centroids.row(0).transpose() - x).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d2 = (centroids.row(c).transpose() - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

MatrixXd kmeanspp_seed(const MatrixXd& x, int k, Rng& rng) {
  const Index n = x.rows();
  MatrixXd centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Index>(rng.next_below(n)));
  VectorXd d2 = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick;
    if (total > 0.0) {
      const double target = rng.next_double() * total;
      double cum = 0.0;
      pick = n - 1;  // numeric slack lands on the last point
      for (Index i = 0; i < n; ++i) {
        cum += d2(i);
        if (cum > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.next_below(n));  // all points coincide
    }
    centroids.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

struct LloydRun {
  MatrixXd centroids;
  double inertia = 0.0;
  std::vector<double> inertia_history;
  int iterations = 0;
};

LloydRun lloyd(const MatrixXd& x, int k, Rng& rng, const KmeansOptions& opts) {
  const Index n = x.rows();
  LloydRun run;
  run.centroids = kmeanspp_seed(x, k, rng);
  std::vector<int> labels(n, 0);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      labels[i] = nearest_centroid(run.centroids, x.row(i).transpose());
      inertia += (run.centroids.row(labels[i]) - x.row(i)).squaredNorm();
    }
    run.inertia_history.push_back(inertia);
    run.inertia = inertia;
    ++run.iterations;

    MatrixXd sums = MatrixXd::Zero(k, x.cols());
    VectorXi counts = VectorXi::Zero(k);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += x.row(i);
      counts(labels[i]) += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) continue;
      // Empty cluster: hand it the point farthest from its own centroid.
      Index far = 0;
      double far_d2 = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (counts(labels[i]) <= 1) continue;  // do not empty another cluster
        const double d2 =
            (run.centroids.row(labels[i]) - x.row(i)).squaredNorm();
        if (d2 > far_d2) {
          far_d2 = d2;
          far = i;
        }
      }
      if (far_d2 < 0.0) continue;  // nothing stealable; leave centroid put
      sums.row(labels[far]) -= x.row(far);
      counts(labels[far]) -= 1;
      labels[far] = c;
      sums.row(c) = x.row(far);
      counts(c) = 1;
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts(c) == 0) continue;
      const VectorXd next = sums.row(c).transpose() / counts(c);
      shift = std::max(shift,
                       (next - run.centroids.row(c).transpose()).norm());
      run.centroids.row(c) = next.transpose();
    }
    if (shift < opts.tol) break;
  }

  // Final assignment against the settled centroids.
  double inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int c = nearest_centroid(run.centroids, x.row(i).transpose());
    inertia += (run.centroids.row(c) - x.row(i)).squaredNorm();
  }
  run.inertia_history.push_back(inertia);
  run.inertia = inertia;
  return run;
}

}  // namespace

VectorXd FeatureNormalizer::normalize(const VectorXd& raw) const {
  if (raw.size() != means.size())
    throw DomainError("normalizer: feature length mismatch");
  return (raw - means).cwiseQuotient(std_devs);
}

VectorXd FeatureNormalizer::denormalize(const VectorXd& normed) const {
  if (normed.size() != means.size())
    throw DomainError("normalizer: feature length mismatch");
  return normed.cwiseProduct(std_devs) + means;
}

MatrixXd FeatureNormalizer::normalize_rows(const MatrixXd& raw) const {
  if (raw.cols() != means.size())
    throw DomainError("normalizer: feature length mismatch");
  MatrixXd out = raw.rowwise() - means.transpose();
  out.array().rowwise() /= std_devs.transpose().array();
  return out;
}

bool FeatureNormalizer::approx_equal(const FeatureNormalizer& other,
                                     double tol) const {
  if (means.size() != other.means.size()) return false;
  return (means - other.means).cwiseAbs().maxCoeff() <= tol &&
         (std_devs - other.std_devs).cwiseAbs().maxCoeff() <= tol;
}

FeatureNormalizer FeatureNormalizer::fit(const MatrixXd& raw_rows) {
  if (raw_rows.rows() < 1) throw DomainError("normalizer: no rows to fit");
  FeatureNormalizer n;
  n.means = raw_rows.colwise().mean();
  const Index rows = raw_rows.rows();
  n.std_devs.resize(raw_rows.cols());
  for (Index j = 0; j < raw_rows.cols(); ++j) {
    const double var =
        (raw_rows.col(j).array() - n.means(j)).square().sum() / rows;
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      n.std_devs(j) = 1.0;
      n.had_degenerate = true;
    } else {
      n.std_devs(j) = sd;
    }
  }
  return n;
}

BeamRequirement ClusterModel::centroid_requirement(int cluster) const {
  if (cluster < 0 || cluster >= k)
    throw DomainError("cluster model: index out of range");
  return BeamRequirement::from_features(
      normalizer.denormalize(centroids.row(cluster).transpose()));
}

ClusterModel kmeans_fit(const MatrixXd& features_raw, int k,
                        std::uint64_t seed, const KmeansOptions& opts,
                        KmeansDiagnostics* diagnostics) {
  if (k < 1) throw DomainError("kmeans: K must be at least 1");
  if (features_raw.rows() < k)
    throw DomainError("kmeans: fewer points than clusters");
  if (opts.restarts < 1 || opts.max_iters < 1 || !(opts.tol >= 0.0))
    throw DomainError("kmeans: malformed options");

  ClusterModel model;
  model.k = k;
  model.normalizer = FeatureNormalizer::fit(features_raw);
  const MatrixXd x = model.normalizer.normalize_rows(features_raw);

  LloydRun best;
  best.inertia = std::numeric_limits<double>::infinity();
  int best_restart = 0;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    LloydRun run = lloyd(x, k, rng, opts);
    if (run.inertia < best.inertia) {
      best = std::move(run);
      best_restart = r;
    }
  }

  model.centroids = best.centroids;
  model.inertia = best.inertia;
  if (diagnostics != nullptr) {
    diagnostics->inertia_per_iteration = best.inertia_history;
    diagnostics->iterations = best.iterations;
    diagnostics->winning_restart = best_restart;
  }
  return model;
}

int assign(const ClusterModel& model, const BeamRequirement& req) {
  if (model.k < 1 || model.centroids.rows() != model.k)
    throw DomainError("assign: model not fitted");
  return nearest_centroid(model.centroids,
                          model.normalizer.normalize(req.features()));
}

VectorXi assign_rows(const ClusterModel& model, const MatrixXd& features_raw) {
  const MatrixXd x = model.normalizer.normalize_rows(features_raw);
  VectorXi labels(x.rows());
  for (Index i = 0; i < x.rows(); ++i)
    labels(i) = nearest_centroid(model.centroids, x.row(i).transpose());
  return labels;
}

void build_representatives(const ArrayGeometry& g, ClusterModel& model,
                           const CostWeights& weights,
                           const OptimizeOptions& opts) {
  if (model.k < 1 || model.centroids.rows() != model.k)
    throw DomainError("representatives: model not fitted");
  model.representatives.clear();
  model.representatives.reserve(model.k);
  std::string failures;
  for (int c = 0; c < model.k; ++c) {
    try {
      OptimizeResult res =
          optimize_matrix(g, model.centroid_requirement(c), weights, opts);
      model.representatives.push_back(std::move(res.weights));
    } catch (const OptimizationFailure& e) {
      failures += (failures.empty() ? "cluster " : ", cluster ") +
                  std::to_string(c) + " (" + e.what() + ")";
      model.representatives.push_back(e.best_effort().weights);
    }
  }
  if (!failures.empty()) {
    OptimizeResult none;
    throw OptimizationFailure("representatives incomplete: " + failures, none);
  }
}

}  // namespace beamsel
