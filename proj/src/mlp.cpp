#include "beamsel/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "beamsel/errors.hpp"
#include "beamsel/rng.hpp"
#include "beamsel/synthesis.hpp"

namespace beamsel {

namespace {

constexpr double kProbClip = 1e-12;

MatrixXd activate(const MatrixXd& z, Activation act) {
  if (act == Activation::relu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

MatrixXd activate_grad(const MatrixXd& z, const MatrixXd& a, Activation act) {
  if (act == Activation::relu)
    return (z.array() > 0.0).cast<double>().matrix();
  return (1.0 - a.array().square()).matrix();
}

void softmax_rows_inplace(MatrixXd& z) {
  for (Index i = 0; i < z.rows(); ++i) {
    const double peak = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - peak).exp();
    z.row(i) /= z.row(i).sum();
  }
}

/// Forward pass keeping every layer's pre-activation and activation for
/// the backward sweep. activations[0] is the input batch.
struct ForwardTrace {
  std::vector<MatrixXd> zs;
  std::vector<MatrixXd> activations;
};

ForwardTrace forward_trace(const MlpModel& m, const MatrixXd& inputs) {
  ForwardTrace t;
  t.activations.push_back(inputs);
  const std::size_t layers = m.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    MatrixXd z = t.activations.back() * m.weights[l].transpose();
    z.rowwise() += m.biases[l].transpose();
    if (l + 1 < layers) {
      t.zs.push_back(z);
      t.activations.push_back(activate(z, m.hidden_activation));
    } else {
      softmax_rows_inplace(z);
      t.zs.push_back(MatrixXd());  // softmax grad is fused with the loss
      t.activations.push_back(std::move(z));
    }
  }
  return t;
}

double accuracy(const MatrixXd& probs, const MatrixXd& labels) {
  Index hits = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    if (argmax_index(probs.row(i).transpose()) ==
        argmax_index(labels.row(i).transpose()))
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(probs.rows());
}

MatrixXd gather_rows(const MatrixXd& m, const std::vector<Index>& idx,
                     std::size_t from, std::size_t to) {
  MatrixXd out(static_cast<Index>(to - from), m.cols());
  for (std::size_t i = from; i < to; ++i)
    out.row(static_cast<Index>(i - from)) = m.row(idx[i]);
  return out;
}

struct AdamState {
  std::vector<MatrixXd> mw, vw;
  std::vector<VectorXd> mb, vb;
  long long t = 0;

  explicit AdamState(const MlpModel& m) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      mw.push_back(MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
      vw.push_back(MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
      mb.push_back(VectorXd::Zero(m.biases[l].size()));
      vb.push_back(VectorXd::Zero(m.biases[l].size()));
    }
  }

  void update(MlpModel& m, const Gradients& g, const Hyperparams& hp) {
    ++t;
    const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      mw[l] = hp.beta1 * mw[l] + (1.0 - hp.beta1) * g.weights[l];
      vw[l] = (hp.beta2 * vw[l].array() +
               (1.0 - hp.beta2) * g.weights[l].array().square())
                  .matrix();
      m.weights[l].array() -=
          hp.learning_rate * (mw[l].array() / c1) /
          ((vw[l].array() / c2).sqrt() + hp.adam_epsilon);
      mb[l] = hp.beta1 * mb[l] + (1.0 - hp.beta1) * g.biases[l];
      vb[l] = (hp.beta2 * vb[l].array() +
               (1.0 - hp.beta2) * g.biases[l].array().square())
                  .matrix();
      m.biases[l].array() -=
          hp.learning_rate * (mb[l].array() / c1) /
          ((vb[l].array() / c2).sqrt() + hp.adam_epsilon);
    }
  }
};

}  // namespace

void MlpModel::validate() const {
  if (layer_sizes.size() < 2)
    throw DomainError("mlp: need at least input and output layers");
  for (int s : layer_sizes)
    if (s < 1) throw DomainError("mlp: layer sizes must be positive");
  if (weights.size() != layer_sizes.size() - 1 ||
      biases.size() != weights.size())
    throw DomainError("mlp: layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] ||
        weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1])
      throw DomainError("mlp: weight shapes do not chain");
  }
  if (normalizer.means.size() != layer_sizes.front())
    throw DomainError("mlp: normalizer width does not match the input layer");
}

MlpModel MlpModel::init(const std::vector<int>& layer_sizes, Activation act,
                        std::uint64_t seed, const FeatureNormalizer& norm) {
  MlpModel m;
  m.layer_sizes = layer_sizes;
  m.hidden_activation = act;
  m.normalizer = norm;
  m.init_seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    MatrixXd w(fan_out, fan_in);
    for (Index r = 0; r < w.rows(); ++r)
      for (Index c = 0; c < w.cols(); ++c)
        w(r, c) = rng.next_double(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(VectorXd::Zero(fan_out));
  }
  m.validate();
  return m;
}

void TrainingBatch::validate(int input_size, int class_count) const {
  if (inputs.rows() != labels.rows())
    throw DomainError("batch: inputs and labels disagree on sample count");
  if (inputs.rows() < 1) throw DomainError("batch: empty");
  if (inputs.cols() != input_size || labels.cols() != class_count)
    throw DomainError("batch: width does not match the model");
  for (Index i = 0; i < labels.rows(); ++i) {
    int ones = 0;
    for (Index j = 0; j < labels.cols(); ++j) {
      if (labels(i, j) == 1.0)
        ++ones;
      else if (labels(i, j) != 0.0)
        throw DomainError("batch: labels must be one-hot");
    }
    if (ones != 1) throw DomainError("batch: labels must be one-hot");
  }
}

VectorXd forward(const MlpModel& model, const VectorXd& normalized_input) {
  if (!normalized_input.allFinite())
    throw DomainError("forward: non-finite input");
  return forward_batch(model, normalized_input.transpose()).row(0).transpose();
}

MatrixXd forward_batch(const MlpModel& model, const MatrixXd& inputs) {
  model.validate();
  if (inputs.cols() != model.input_size())
    throw DomainError("forward: input width does not match the model");
  if (!inputs.allFinite()) throw DomainError("forward: non-finite input");
  return forward_trace(model, inputs).activations.back();
}

double loss_sum(const MatrixXd& probabilities, const MatrixXd& one_hot) {
  if (probabilities.rows() != one_hot.rows() ||
      probabilities.cols() != one_hot.cols())
    throw DomainError("loss: shape mismatch");
  double acc = 0.0;
  for (Index i = 0; i < probabilities.rows(); ++i)
    for (Index j = 0; j < probabilities.cols(); ++j)
      if (one_hot(i, j) != 0.0)
        acc -= one_hot(i, j) *
               std::log(std::clamp(probabilities(i, j), kProbClip, 1.0));
  return acc;
}

double loss_mean(const MatrixXd& probabilities, const MatrixXd& one_hot) {
  return loss_sum(probabilities, one_hot) /
         static_cast<double>(probabilities.rows());
}

Gradients backward(const MlpModel& model, const TrainingBatch& batch) {
  model.validate();
  batch.validate(model.input_size(), model.class_count());
  const ForwardTrace t = forward_trace(model, batch.inputs);
  const std::size_t layers = model.weights.size();
  const double inv_s = 1.0 / static_cast<double>(batch.size());

  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);

  // Softmax and cross-entropy fuse to (p - y) on the output logits.
  MatrixXd delta = (t.activations.back() - batch.labels) * inv_s;
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta.transpose() * t.activations[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * model.weights[l])
                  .cwiseProduct(activate_grad(t.zs[l - 1], t.activations[l],
                                              model.hidden_activation));
    }
  }
  return g;
}

MlpModel train(const MlpModel& init, const TrainingBatch& train_set,
               const TrainingBatch& val_set, const Hyperparams& hp,
               std::uint64_t shuffle_seed, TrainingReport* report) {
  const auto t_start = std::chrono::steady_clock::now();
  init.validate();
  train_set.validate(init.input_size(), init.class_count());
  val_set.validate(init.input_size(), init.class_count());
  if (hp.batch_size < 1 || hp.max_epochs < 1 || hp.patience < 1 ||
      !(hp.learning_rate > 0.0))
    throw DomainError("train: malformed hyperparameters");

  MlpModel model = init;
  AdamState adam(model);
  Rng rng(shuffle_seed);

  TrainingReport rep;
  MlpModel best_model = model;
  double best_val = std::numeric_limits<double>::infinity();
  int stall = 0;

  std::vector<Index> order(static_cast<std::size_t>(train_set.size()));
  std::iota(order.begin(), order.end(), Index{0});

  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t off = 0; off < order.size();
         off += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t end =
          std::min(order.size(), off + static_cast<std::size_t>(hp.batch_size));
      TrainingBatch mini;
      mini.inputs = gather_rows(train_set.inputs, order, off, end);
      mini.labels = gather_rows(train_set.labels, order, off, end);
      adam.update(model, backward(model, mini), hp);
    }

    const MatrixXd train_probs = forward_batch(model, train_set.inputs);
    const MatrixXd val_probs = forward_batch(model, val_set.inputs);
    const double tl = loss_mean(train_probs, train_set.labels);
    const double vl = loss_mean(val_probs, val_set.labels);
    if (!std::isfinite(tl) || !std::isfinite(vl)) {
      rep.wall_s = elapsed();
      rep.epochs_run = epoch;
      throw TrainingFailure("train: loss diverged at epoch " +
                                std::to_string(epoch),
                            best_val < std::numeric_limits<double>::infinity()
                                ? best_model
                                : init,
                            rep);
    }
    rep.train_loss.push_back(tl);
    rep.val_loss.push_back(vl);
    rep.train_accuracy.push_back(accuracy(train_probs, train_set.labels));
    rep.val_accuracy.push_back(accuracy(val_probs, val_set.labels));

    if (vl < best_val) {
      best_val = vl;
      best_model = model;
      rep.best_epoch = epoch;
      stall = 0;
    } else {
      ++stall;
    }
    rep.epochs_run = epoch + 1;
    if (stall >= hp.patience) break;
  }

  model = best_model;

  // Confusion matrix and one-vs-rest ROC on validation, with the restored
  // weights the caller actually receives.
  const int k = model.class_count();
  const MatrixXd val_probs = forward_batch(model, val_set.inputs);
  rep.confusion = MatrixXd::Zero(k, k);
  for (Index i = 0; i < val_probs.rows(); ++i) {
    const int truth = argmax_index(val_set.labels.row(i).transpose());
    const int pred = argmax_index(val_probs.row(i).transpose());
    rep.confusion(truth, pred) += 1.0;
  }
  const int n_thresholds = 501;
  rep.roc.resize(k);
  for (int c = 0; c < k; ++c) {
    RocCurve& roc = rep.roc[c];
    roc.thresholds.resize(n_thresholds);
    roc.tpr.resize(n_thresholds);
    roc.fpr.resize(n_thresholds);
    Index pos = 0, neg = 0;
    for (Index i = 0; i < val_probs.rows(); ++i)
      (val_set.labels(i, c) == 1.0 ? pos : neg) += 1;
    for (int t = 0; t < n_thresholds; ++t) {
      const double thr = static_cast<double>(t) / (n_thresholds - 1);
      Index tp = 0, fp = 0;
      for (Index i = 0; i < val_probs.rows(); ++i) {
        if (val_probs(i, c) < thr) continue;
        (val_set.labels(i, c) == 1.0 ? tp : fp) += 1;
      }
      roc.thresholds(t) = thr;
      roc.tpr(t) = pos > 0 ? static_cast<double>(tp) / pos : 0.0;
      roc.fpr(t) = neg > 0 ? static_cast<double>(fp) / neg : 0.0;
    }
  }
  rep.wall_s = elapsed();
  if (report != nullptr) *report = std::move(rep);
  return model;
}

int argmax_index(const VectorXd& v) {
  int best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = static_cast<int>(i);
  return best;
}

Selection select_matrix(const MlpModel& model, const ClusterModel& clusters,
                        const ArrayGeometry& g, const BeamRequirement& req) {
  model.validate();
  if (model.class_count() != clusters.k)
    throw ConfigError("select: classifier classes and cluster count differ");
  if (!model.normalizer.approx_equal(clusters.normalizer))
    throw ConfigError("select: classifier and clusters use different "
                      "feature normalizations");
  if (static_cast<int>(clusters.representatives.size()) != clusters.k)
    throw ConfigError("select: cluster model has no representatives");
  req.validate();

  Selection sel;
  sel.probabilities =
      forward(model, model.normalizer.normalize(req.features()));
  sel.cluster = argmax_index(sel.probabilities);
  sel.weights = clusters.representatives[static_cast<std::size_t>(sel.cluster)];

  const Direction pointing = req.pointing();
  sel.weights.phases_rad = steering_phases(
      g, pointing.theta_rad(), pointing.phi_rad(), sel.weights.rows(),
      sel.weights.cols());
  sel.weights.canonicalize();
  return sel;
}

}  // namespace beamsel
