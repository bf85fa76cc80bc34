#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "beamsel/geometry.hpp"
#include "beamsel/kmeans.hpp"
#include "beamsel/types.hpp"

namespace beamsel {

enum class Activation { relu, tanh };

/// Fully connected feedforward classifier over the normalized requirement
/// features. Output layer is softmax over the K cluster classes.
struct MlpModel {
  std::vector<int> layer_sizes;     // [in, hidden..., K]
  std::vector<MatrixXd> weights;    // weights[l]: sizes[l+1] x sizes[l]
  std::vector<VectorXd> biases;     // biases[l]: sizes[l+1]
  Activation hidden_activation = Activation::relu;
  FeatureNormalizer normalizer;
  std::uint64_t init_seed = 0;

  int input_size() const { return layer_sizes.front(); }
  int class_count() const { return layer_sizes.back(); }
  void validate() const;

  /// Symmetric uniform init scaled by 1/sqrt(fan-in), zero biases, fixed
  /// draw order so a seed pins every parameter.
  static MlpModel init(const std::vector<int>& layer_sizes, Activation act,
                       std::uint64_t seed, const FeatureNormalizer& norm);
};

struct TrainingBatch {
  MatrixXd inputs;  // S x input_size, already normalized
  MatrixXd labels;  // S x K, one-hot rows

  Index size() const { return inputs.rows(); }
  void validate(int input_size, int class_count) const;
};

struct Hyperparams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 64;
  int max_epochs = 200;
  int patience = 20;  ///< stagnant validation epochs before early stop
};

struct RocCurve {
  ArrayXd thresholds;
  ArrayXd tpr;
  ArrayXd fpr;
};

struct TrainingReport {
  std::vector<double> train_loss;  // per-sample mean, per epoch
  std::vector<double> val_loss;
  std::vector<double> train_accuracy;
  std::vector<double> val_accuracy;
  MatrixXd confusion;          // K x K, row = true class, on validation
  std::vector<RocCurve> roc;   // one-vs-rest per class, on validation
  double wall_s = 0.0;
  int best_epoch = -1;  ///< epoch whose weights the returned model carries
  int epochs_run = 0;
};

struct Gradients {
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
};

/// Training blew up (non-finite loss). Carries the last finite state.
class TrainingFailure : public std::runtime_error {
 public:
  TrainingFailure(const std::string& what, MlpModel last_good,
                  TrainingReport partial)
      : std::runtime_error(what),
        last_good_(std::move(last_good)),
        partial_(std::move(partial)) {}

  const MlpModel& last_good_model() const { return last_good_; }
  const TrainingReport& partial_report() const { return partial_; }

 private:
  MlpModel last_good_;
  TrainingReport partial_;
};

VectorXd forward(const MlpModel& model, const VectorXd& normalized_input);
MatrixXd forward_batch(const MlpModel& model, const MatrixXd& inputs);

/// Categorical cross-entropy with probabilities clipped to [1e-12, 1].
double loss_sum(const MatrixXd& probabilities, const MatrixXd& one_hot);
double loss_mean(const MatrixXd& probabilities, const MatrixXd& one_hot);

/// Analytic gradients of the mean loss over the batch.
Gradients backward(const MlpModel& model, const TrainingBatch& batch);

/// Adam mini-batch training with early stopping on validation loss. The
/// returned model carries the best-validation-epoch weights, not the last
/// ones. Shuffling uses its own deterministic draws from `shuffle_seed`.
MlpModel train(const MlpModel& init, const TrainingBatch& train_set,
               const TrainingBatch& val_set, const Hyperparams& hp,
               std::uint64_t shuffle_seed, TrainingReport* report = nullptr);

/// Lowest index among maxima.
int argmax_index(const VectorXd& v);

struct Selection {
  int cluster = -1;
  WeightMatrix weights;
  VectorXd probabilities;
};

/// Classifier pick plus the cluster's representative matrix re-steered to
/// the requested pointing. Amplitudes, mask and drive power are taken from
/// the representative as-is; only the phase grid is recomputed.
Selection select_matrix(const MlpModel& model, const ClusterModel& clusters,
                        const ArrayGeometry& g, const BeamRequirement& req);

}  // namespace beamsel
