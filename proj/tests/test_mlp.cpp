#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beamsel/errors.hpp"
#include "beamsel/mlp.hpp"
#include "beamsel/rng.hpp"
#include "beamsel/synthesis.hpp"
#include "oracles.hpp"

using namespace beamsel;

namespace {

FeatureNormalizer passthrough(int width) {
  FeatureNormalizer n;
  n.means = VectorXd::Zero(width);
  n.std_devs = VectorXd::Ones(width);
  return n;
}

TrainingBatch random_batch(Rng& rng, int samples, int width, int classes) {
  TrainingBatch b;
  b.inputs.resize(samples, width);
  b.labels = MatrixXd::Zero(samples, classes);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < width; ++j)
      b.inputs(i, j) = rng.next_double(-2.0, 2.0);
    b.labels(i, static_cast<Index>(rng.next_below(
                     static_cast<std::uint64_t>(classes)))) = 1.0;
  }
  return b;
}

/// Three Gaussian-ish blobs in 2-D, one-hot labeled; linearly separable.
TrainingBatch blob_batch(Rng& rng, int per_class) {
  const double centers[3][2] = {{-3.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}};
  TrainingBatch b;
  b.inputs.resize(3 * per_class, 2);
  b.labels = MatrixXd::Zero(3 * per_class, 3);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per_class; ++i) {
      const int r = c * per_class + i;
      b.inputs(r, 0) = centers[c][0] + rng.next_double(-1.0, 1.0);
      b.inputs(r, 1) = centers[c][1] + rng.next_double(-1.0, 1.0);
      b.labels(r, c) = 1.0;
    }
  return b;
}

}  // namespace

TEST_CASE("initialization is seeded and scaled by fan-in") {
  const std::vector<int> sizes{7, 16, 20};
  const MlpModel a = MlpModel::init(sizes, Activation::relu, 5, passthrough(7));
  const MlpModel b = MlpModel::init(sizes, Activation::relu, 5, passthrough(7));
  const MlpModel c = MlpModel::init(sizes, Activation::relu, 6, passthrough(7));

  REQUIRE(a.weights.size() == 2);
  CHECK(a.weights[0].rows() == 16);
  CHECK(a.weights[0].cols() == 7);
  CHECK((a.weights[0] - b.weights[0]).norm() == 0.0);
  CHECK((a.weights[1] - b.weights[1]).norm() == 0.0);
  CHECK((a.weights[0] - c.weights[0]).norm() > 0.0);

  CHECK(a.weights[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(7.0));
  CHECK(a.weights[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(16.0));
  CHECK(a.biases[0].norm() == 0.0);
  CHECK(a.biases[1].norm() == 0.0);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("model shape validation") {
  CHECK_THROWS_AS(MlpModel::init({7}, Activation::relu, 1, passthrough(7)),
                  DomainError);
  CHECK_THROWS_AS(MlpModel::init({7, 0, 3}, Activation::relu, 1, passthrough(7)),
                  DomainError);
  MlpModel m = MlpModel::init({4, 5, 3}, Activation::relu, 1, passthrough(4));
  m.weights[1].resize(3, 4);
  CHECK_THROWS_AS(m.validate(), DomainError);
}

TEST_CASE("softmax output is a stable distribution") {
  MlpModel m = MlpModel::init({2, 3}, Activation::relu, 3, passthrough(2));
  m.weights[0].setZero();
  m.biases[0].setZero();
  const VectorXd p = forward(m, VectorXd::Zero(2));
  CHECK(p(0) == doctest::Approx(1.0 / 3.0));
  CHECK(p(1) == doctest::Approx(1.0 / 3.0));
  CHECK(p.sum() == doctest::Approx(1.0));

  // Huge logits must not overflow: bias the first class sky-high.
  m.biases[0] << 1000.0, 0.0, -1000.0;
  const VectorXd q = forward(m, VectorXd::Zero(2));
  CHECK(q.allFinite());
  CHECK(q(0) == doctest::Approx(1.0));
  CHECK(q.sum() == doctest::Approx(1.0));
}

TEST_CASE("cross entropy agrees with the pencil value and is clipped") {
  MatrixXd p(2, 3);
  p << 0.7, 0.2, 0.1,
       0.0, 1.0, 0.0;  // hard zero must be clipped, not -inf
  MatrixXd y = MatrixXd::Zero(2, 3);
  y(0, 0) = 1.0;
  y(1, 0) = 1.0;
  const double want0 = -std::log(0.7);
  const double want1 = -std::log(1e-12);
  CHECK(loss_sum(p, y) == doctest::Approx(want0 + want1));
  CHECK(loss_mean(p, y) == doctest::Approx(0.5 * (want0 + want1)));
  CHECK(std::isfinite(loss_sum(p, y)));
}

TEST_CASE("backprop matches central finite differences") {
  // tanh keeps the loss smooth everywhere, which is what a finite
  // difference probe needs.
  Rng rng(2024);
  const MlpModel m =
      MlpModel::init({3, 5, 4}, Activation::tanh, 11, passthrough(3));
  const TrainingBatch batch = random_batch(rng, 6, 3, 4);
  const Gradients grads = backward(m, batch);

  REQUIRE(grads.weights.size() == 2);
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    for (Index r = 0; r < grads.weights[l].rows(); ++r)
      for (Index c = 0; c < grads.weights[l].cols(); ++c) {
        const double fd = oracles::fd_loss_slope(m, batch, l, r, c, false);
        CHECK(grads.weights[l](r, c) ==
              doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    for (Index r = 0; r < grads.biases[l].size(); ++r) {
      const double fd = oracles::fd_loss_slope(m, batch, l, r, 0, true);
      CHECK(grads.biases[l](r) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("backprop matches finite differences through relu too") {
  // relu is only piecewise smooth; nudge the biases so no preactivation
  // sits near the kink and the probe stays on one side.
  Rng rng(77);
  MlpModel m = MlpModel::init({3, 6, 3}, Activation::relu, 13, passthrough(3));
  m.biases[0].setConstant(0.05);
  const TrainingBatch batch = random_batch(rng, 5, 3, 3);
  const Gradients grads = backward(m, batch);
  int checked = 0;
  for (Index r = 0; r < grads.weights[0].rows(); ++r)
    for (Index c = 0; c < grads.weights[0].cols(); ++c) {
      const double fd = oracles::fd_loss_slope(m, batch, 0, r, c, false);
      CHECK(grads.weights[0](r, c) ==
            doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      ++checked;
    }
  CHECK(checked == 18);
}

TEST_CASE("argmax ties resolve to the lowest index") {
  VectorXd v(4);
  v << 0.2, 0.4, 0.4, 0.1;
  CHECK(argmax_index(v) == 1);
  v.setConstant(0.25);
  CHECK(argmax_index(v) == 0);
}

TEST_CASE("training separates easy blobs and restores the best epoch") {
  Rng rng(8);
  const TrainingBatch train_set = blob_batch(rng, 60);
  const TrainingBatch val_set = blob_batch(rng, 20);

  const MlpModel init =
      MlpModel::init({2, 16, 3}, Activation::relu, 21, passthrough(2));
  Hyperparams hp;
  hp.max_epochs = 150;
  hp.patience = 15;
  hp.batch_size = 32;

  TrainingReport report;
  const MlpModel trained = train(init, train_set, val_set, hp, 31, &report);

  REQUIRE(report.epochs_run > 0);
  CHECK(report.epochs_run <= hp.max_epochs);
  CHECK(report.train_loss.size() ==
        static_cast<std::size_t>(report.epochs_run));
  CHECK(report.val_loss.size() == report.train_loss.size());

  // accuracy on validation
  const MatrixXd probs = forward_batch(trained, val_set.inputs);
  int hits = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    if (val_set.labels(i, argmax_index(probs.row(i).transpose())) == 1.0)
      ++hits;
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(probs.rows()) >= 0.95);

  // best epoch bookkeeping: the reported best epoch attains the minimum
  // validation loss, and the returned weights reproduce exactly that loss.
  REQUIRE(report.best_epoch >= 0);
  double min_val = report.val_loss[0];
  for (double v : report.val_loss) min_val = std::min(min_val, v);
  CHECK(report.val_loss[static_cast<std::size_t>(report.best_epoch)] ==
        doctest::Approx(min_val));
  const double restored =
      loss_mean(forward_batch(trained, val_set.inputs), val_set.labels);
  CHECK(restored == doctest::Approx(min_val).epsilon(1e-12));

  // confusion matrix rows count validation truth
  CHECK(report.confusion.rows() == 3);
  CHECK(report.confusion.sum() == doctest::Approx(60.0));
  CHECK(report.roc.size() == 3);
  for (const RocCurve& rc : report.roc) {
    REQUIRE(rc.thresholds.size() == 501);
    CHECK(rc.tpr.minCoeff() >= 0.0);
    CHECK(rc.tpr.maxCoeff() <= 1.0);
    CHECK(rc.fpr.minCoeff() >= 0.0);
    CHECK(rc.fpr.maxCoeff() <= 1.0);
  }
}

TEST_CASE("early stopping fires on a stagnant validation set") {
  // Random labels carry no signal, so validation loss cannot keep
  // improving and the patience counter must trip long before the cap.
  Rng rng(3);
  const TrainingBatch train_set = random_batch(rng, 40, 2, 3);
  const TrainingBatch val_set = random_batch(rng, 20, 2, 3);
  const MlpModel init =
      MlpModel::init({2, 8, 3}, Activation::tanh, 4, passthrough(2));
  Hyperparams hp;
  hp.max_epochs = 500;
  hp.patience = 8;
  TrainingReport report;
  train(init, train_set, val_set, hp, 6, &report);
  CHECK(report.epochs_run < 500);
  CHECK(report.best_epoch <= report.epochs_run - 1);
}

TEST_CASE("diverging training fails loudly but keeps the best model") {
  Rng rng(5);
  const TrainingBatch train_set = blob_batch(rng, 30);
  const TrainingBatch val_set = blob_batch(rng, 10);
  const MlpModel init =
      MlpModel::init({2, 8, 3}, Activation::relu, 9, passthrough(2));
  Hyperparams hp;
  // A step this large drives the weights past the double range, so the
  // activations overflow and the epoch loss goes non-finite.
  hp.learning_rate = 1e308;
  hp.max_epochs = 50;
  try {
    train(init, train_set, val_set, hp, 2);
    FAIL("expected TrainingFailure");
  } catch (const TrainingFailure& e) {
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    CHECK_NOTHROW(e.last_good_model().validate());
    CHECK(e.partial_report().epochs_run >= 0);
  }
}

TEST_CASE("hyperparameter validation") {
  Rng rng(6);
  const TrainingBatch b = blob_batch(rng, 10);
  const MlpModel init =
      MlpModel::init({2, 4, 3}, Activation::relu, 1, passthrough(2));
  Hyperparams hp;
  hp.batch_size = 0;
  CHECK_THROWS_AS(train(init, b, b, hp, 1), DomainError);
  hp = Hyperparams{};
  hp.learning_rate = -1.0;
  CHECK_THROWS_AS(train(init, b, b, hp, 1), DomainError);
}

TEST_CASE("batch validation catches malformed labels") {
  TrainingBatch b;
  b.inputs = MatrixXd::Zero(3, 2);
  b.labels = MatrixXd::Zero(3, 3);
  b.labels(0, 0) = 1.0;
  b.labels(1, 1) = 1.0;
  // row 2 left all-zero: not one-hot
  CHECK_THROWS_AS(b.validate(2, 3), DomainError);
  b.labels(2, 0) = 0.7;
  CHECK_THROWS_AS(b.validate(2, 3), DomainError);
  b.labels(2, 0) = 1.0;
  CHECK_NOTHROW(b.validate(2, 3));
}

TEST_CASE("select_matrix re-steers the chosen representative") {
  const ArrayGeometry g = ArrayGeometry::standard();

  // Two clusters with distinct representatives.
  ClusterModel clusters;
  clusters.k = 2;
  clusters.normalizer = passthrough(7);
  clusters.centroids = MatrixXd::Zero(2, 7);
  SynthesisParams p;
  p.active_rows = 24;
  p.active_cols = 24;
  p.taper_sll_az_db = -25.0;
  p.taper_sll_el_db = -25.0;
  clusters.representatives.push_back(synthesize(g, p));
  p.active_rows = 30;
  p.active_cols = 30;
  clusters.representatives.push_back(synthesize(g, p));

  // A classifier rigged to always pick class 1.
  MlpModel m = MlpModel::init({7, 2}, Activation::relu, 1, passthrough(7));
  m.weights[0].setZero();
  m.biases[0] << -5.0, 5.0;

  BeamRequirement req;
  req.bw_az_deg = req.bw_el_deg = 1.0;
  req.sll_az_db = req.sll_el_db = -25.0;
  req.eirp_dbw = 60.0;
  req.point_el_deg = 2.0;
  req.point_az_deg = -3.0;

  const Selection sel = select_matrix(m, clusters, g, req);
  CHECK(sel.cluster == 1);
  CHECK(sel.probabilities.size() == 2);
  CHECK(sel.probabilities(1) > 0.99);

  // Amplitudes, mask and drive power come from the representative.
  const WeightMatrix& rep = clusters.representatives[1];
  CHECK((sel.weights.amplitudes == rep.amplitudes).all());
  CHECK((sel.weights.active == rep.active).all());
  CHECK(sel.weights.per_element_power_w == rep.per_element_power_w);

  // Phases are the steering profile for the requested pointing.
  const Direction d = req.pointing();
  const ArrayXXd want =
      steering_phases(g, d.theta_rad(), d.phi_rad(), 36, 36);
  double max_diff = 0.0;
  for (Index i = 0; i < 36; ++i)
    for (Index j = 0; j < 36; ++j)
      if (rep.active(i, j))
        max_diff = std::max(max_diff,
                            std::abs(sel.weights.phases_rad(i, j) - want(i, j)));
  CHECK(max_diff < 1e-12);

  // Config guards.
  ClusterModel bare = clusters;
  bare.representatives.clear();
  CHECK_THROWS_AS(select_matrix(m, bare, g, req), ConfigError);
  ClusterModel three = clusters;
  three.k = 3;
  CHECK_THROWS_AS(select_matrix(m, three, g, req), ConfigError);
}
