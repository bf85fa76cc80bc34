#include "beamsel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <utility>

#include "beamsel/errors.hpp"
#include "beamsel/rng.hpp"

namespace beamsel {

using io::fs::path;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Run manifest. One JSON file per output directory recording, for every
// stage that ran, its seed and the hash of every file it read and wrote.
// Before a stage consumes a file, the hash is compared against what the
// producing stage recorded, so stale or hand-edited artifacts fail fast
// instead of silently training on the wrong data.

class Manifest {
 public:
  static Manifest open(const path& dir, std::uint64_t master_seed) {
    Manifest m;
    m.path_ = dir / "manifest.json";
    if (io::fs::exists(m.path_)) {
      m.doc_ = io::read_json(m.path_);
      if (!m.doc_.contains("master_seed") || !m.doc_.contains("stages"))
        throw ParseError(m.path_.string(), "not a run manifest");
      const auto recorded = m.doc_["master_seed"].get<std::uint64_t>();
      if (recorded != master_seed)
        throw ConfigError("output directory belongs to master_seed " +
                          std::to_string(recorded) + ", refusing to mix in " +
                          std::to_string(master_seed));
    } else {
      m.doc_ = json{{"master_seed", master_seed}, {"stages", json::array()}};
    }
    return m;
  }

  /// Hash `file` and, if some recorded stage produced it, require a match.
  std::string verify_input(const path& file) const {
    if (!io::fs::exists(file))
      throw ConfigError("missing input " + file.string() +
                        "; run the producing stage first");
    const std::string actual = io::hash_hex(io::hash_file(file));
    const std::string name = file.filename().string();
    // Later entries shadow earlier ones after a stage rerun.
    for (auto it = doc_["stages"].rbegin(); it != doc_["stages"].rend(); ++it) {
      const auto& outputs = (*it)["outputs"];
      if (!outputs.contains(name)) continue;
      if (outputs[name].get<std::string>() != actual)
        throw ConfigError(file.string() +
                          " no longer matches the manifest; rerun stage '" +
                          (*it)["name"].get<std::string>() + "'");
      break;
    }
    return actual;
  }

  void record(const std::string& name, std::uint64_t seed,
              const std::vector<std::pair<std::string, std::string>>& inputs,
              const std::vector<path>& outputs, double elapsed_s) {
    json in = json::object();
    for (const auto& [file, hash] : inputs) in[file] = hash;
    json out = json::object();
    for (const auto& file : outputs)
      out[file.filename().string()] = io::hash_hex(io::hash_file(file));

    auto& stages = doc_["stages"];
    stages.erase(std::remove_if(stages.begin(), stages.end(),
                                [&](const json& s) {
                                  return s["name"].get<std::string>() == name;
                                }),
                 stages.end());
    stages.push_back(json{{"name", name},
                          {"seed", seed},
                          {"inputs", in},
                          {"outputs", out},
                          {"elapsed_s", elapsed_s}});
    io::write_json_file(path_, doc_);
  }

 private:
  path path_;
  json doc_;
};

// ---------------------------------------------------------------------------
// Config file parsing. Strict: an unknown key is a config error, because the
// alternative is a typo like "bugdet" silently running with the default.

template <typename T>
void take(const json& j, const path& file, const char* key, T& slot,
          std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(slot);
  } catch (const json::exception&) {
    throw ParseError(file.string(), std::string("malformed value for '") + key + "'");
  }
}

double median_abs(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineConfig

void PipelineConfig::validate() const {
  try {
    geometry().validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("bad geometry: ") + e.what());
  }
  if (k < 1) throw ConfigError("k must be at least 1");
  if (samples < 10 * k)
    throw ConfigError("samples must be at least 10*k (" +
                      std::to_string(10 * k) + ") so every cluster can form");
  if (!(bw_min_deg > 0.0) || !(bw_min_deg < bw_max_deg))
    throw ConfigError("beamwidth range must satisfy 0 < min < max");
  if (!(sll_min_db < sll_max_db) || !(sll_max_db < 0.0))
    throw ConfigError("side-lobe range must satisfy min < max < 0");
  if (!(eirp_min_dbw < eirp_max_dbw))
    throw ConfigError("EIRP range must satisfy min < max");
  if (!(pointing_max_deg > 0.0) || !(pointing_max_deg <= 60.0))
    throw ConfigError("pointing_max_deg must be in (0, 60]");
  if (kmeans_restarts < 1 || kmeans_max_iters < 1 || kmeans_tol < 0.0)
    throw ConfigError("k-means settings must be positive (tol may be 0)");
  if (!(cost_k1 >= 0.0) || !(cost_k2 >= 0.0) || !(cost_k3 >= 0.0))
    throw ConfigError("cost weights must be non-negative");
  if (eirp_mode != "absolute" && eirp_mode != "signed")
    throw ConfigError("eirp_mode must be 'absolute' or 'signed'");
  if (budget < 50)
    throw ConfigError("budget must be at least 50 (the optimizer refuses less)");
  for (int h : hidden_layers)
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
  if (activation != "relu" && activation != "tanh")
    throw ConfigError("activation must be 'relu' or 'tanh'");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1 || max_epochs < 1 || patience < 1)
    throw ConfigError("batch_size, max_epochs and patience must be positive");
  if (!(val_fraction > 0.0) || !(val_fraction < 0.9))
    throw ConfigError("val_fraction must be in (0, 0.9)");
  if (eval_samples < 1) throw ConfigError("eval_samples must be positive");
  if (bench_beams < 0) throw ConfigError("bench_beams must be non-negative");
}

ArrayGeometry PipelineConfig::geometry() const {
  ArrayGeometry g;
  g.carrier_frequency_hz = carrier_frequency_hz;
  g.wavelength_m = kSpeedOfLight / carrier_frequency_hz;
  g.chain_rows = chain_rows;
  g.chain_cols = chain_cols;
  g.elements_per_subarray = elements_per_subarray;
  g.element_pitch_m = element_pitch_wavelengths * g.wavelength_m;
  g.subarray_pitch_m = elements_per_subarray * g.element_pitch_m;
  g.efficiency = efficiency;
  g.element_exponent = element_exponent;
  return g;
}

CostWeights PipelineConfig::cost_weights() const {
  return CostWeights{cost_k1, cost_k2, cost_k3};
}

EirpMode PipelineConfig::eirp_mode_enum() const {
  return eirp_mode == "signed" ? EirpMode::signed_diff : EirpMode::absolute;
}

Activation PipelineConfig::activation_enum() const {
  return activation == "tanh" ? Activation::tanh : Activation::relu;
}

OptimizeOptions PipelineConfig::optimizer_options() const {
  OptimizeOptions o;
  o.budget = budget;
  o.eirp_mode = eirp_mode_enum();
  return o;
}

Hyperparams PipelineConfig::hyperparams() const {
  Hyperparams hp;
  hp.learning_rate = learning_rate;
  hp.batch_size = batch_size;
  hp.max_epochs = max_epochs;
  hp.patience = patience;
  return hp;
}

MeasurementConfig PipelineConfig::eval_measurement() const {
  MeasurementConfig m;
  m.cut_half_span_deg = 3.0;
  m.cut_step_deg = 0.01;
  m.quadrature.n_theta = 256;
  m.quadrature.n_phi = 1024;
  return m;
}

PipelineConfig load_pipeline_config(const path& file) {
  const json j = io::read_json(file);
  if (!j.is_object()) throw ParseError(file.string(), "config must be an object");

  PipelineConfig c;
  std::set<std::string> seen;
  take(j, file, "carrier_frequency_hz", c.carrier_frequency_hz, seen);
  take(j, file, "chain_rows", c.chain_rows, seen);
  take(j, file, "chain_cols", c.chain_cols, seen);
  take(j, file, "elements_per_subarray", c.elements_per_subarray, seen);
  take(j, file, "element_pitch_wavelengths", c.element_pitch_wavelengths, seen);
  take(j, file, "efficiency", c.efficiency, seen);
  take(j, file, "element_exponent", c.element_exponent, seen);
  take(j, file, "samples", c.samples, seen);
  take(j, file, "bw_min_deg", c.bw_min_deg, seen);
  take(j, file, "bw_max_deg", c.bw_max_deg, seen);
  take(j, file, "sll_min_db", c.sll_min_db, seen);
  take(j, file, "sll_max_db", c.sll_max_db, seen);
  take(j, file, "eirp_min_dbw", c.eirp_min_dbw, seen);
  take(j, file, "eirp_max_dbw", c.eirp_max_dbw, seen);
  take(j, file, "pointing_max_deg", c.pointing_max_deg, seen);
  take(j, file, "k", c.k, seen);
  take(j, file, "kmeans_restarts", c.kmeans_restarts, seen);
  take(j, file, "kmeans_max_iters", c.kmeans_max_iters, seen);
  take(j, file, "kmeans_tol", c.kmeans_tol, seen);
  take(j, file, "cost_k1", c.cost_k1, seen);
  take(j, file, "cost_k2", c.cost_k2, seen);
  take(j, file, "cost_k3", c.cost_k3, seen);
  take(j, file, "eirp_mode", c.eirp_mode, seen);
  take(j, file, "budget", c.budget, seen);
  take(j, file, "hidden_layers", c.hidden_layers, seen);
  take(j, file, "activation", c.activation, seen);
  take(j, file, "learning_rate", c.learning_rate, seen);
  take(j, file, "batch_size", c.batch_size, seen);
  take(j, file, "max_epochs", c.max_epochs, seen);
  take(j, file, "patience", c.patience, seen);
  take(j, file, "val_fraction", c.val_fraction, seen);
  take(j, file, "eval_samples", c.eval_samples, seen);
  take(j, file, "bench_beams", c.bench_beams, seen);
  take(j, file, "master_seed", c.master_seed, seen);
  take(j, file, "out_dir", c.out_dir, seen);

  for (const auto& item : j.items())
    if (!seen.count(item.key()))
      throw ConfigError("unknown config key '" + item.key() + "' in " +
                        file.string());
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Requirement sampling. Feature by feature in canonical column order, row by
// row, so draw order (and therefore the dataset) is pinned by the seed.

MatrixXd sample_requirements(const PipelineConfig& cfg, int count,
                             std::uint64_t seed) {
  if (count < 0) throw DomainError("sample count must be non-negative");
  Rng rng(seed);
  MatrixXd f(count, BeamRequirement::kFeatureCount);
  for (Index i = 0; i < count; ++i) {
    f(i, 0) = rng.next_double(cfg.bw_min_deg, cfg.bw_max_deg);
    f(i, 1) = rng.next_double(cfg.bw_min_deg, cfg.bw_max_deg);
    f(i, 2) = rng.next_double(cfg.sll_min_db, cfg.sll_max_db);
    f(i, 3) = rng.next_double(cfg.sll_min_db, cfg.sll_max_db);
    f(i, 4) = rng.next_double(cfg.eirp_min_dbw, cfg.eirp_max_dbw);
    f(i, 5) = rng.next_double(-cfg.pointing_max_deg, cfg.pointing_max_deg);
    f(i, 6) = rng.next_double(-cfg.pointing_max_deg, cfg.pointing_max_deg);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Stages

void stage_dataset(const PipelineConfig& cfg, const path& out_dir) {
  cfg.validate();
  io::fs::create_directories(out_dir);
  Manifest man = Manifest::open(out_dir, cfg.master_seed);
  const std::uint64_t seed = stage_seed(cfg.master_seed, "dataset");
  const auto t0 = Clock::now();

  const MatrixXd features = sample_requirements(cfg, cfg.samples, seed);
  io::save_dataset_csv(out_dir / "dataset.csv", features);

  man.record("dataset", seed, {}, {out_dir / "dataset.csv"}, seconds_since(t0));
}

void stage_cluster(const PipelineConfig& cfg, const path& out_dir) {
  cfg.validate();
  Manifest man = Manifest::open(out_dir, cfg.master_seed);
  const path dataset_path = out_dir / "dataset.csv";
  const std::string in_hash = man.verify_input(dataset_path);
  const std::uint64_t seed = stage_seed(cfg.master_seed, "cluster");
  const auto t0 = Clock::now();

  const io::Dataset ds = io::load_dataset_csv(dataset_path);
  KmeansOptions opts{cfg.kmeans_restarts, cfg.kmeans_max_iters, cfg.kmeans_tol};
  ClusterModel model = kmeans_fit(ds.features, cfg.k, seed, opts);
  const VectorXi labels = assign_rows(model, ds.features);

  io::save_dataset_csv(out_dir / "dataset_labeled.csv", ds.features, &labels);
  io::save_cluster_model(out_dir / "cluster_model.json", model);

  man.record("cluster", seed, {{"dataset.csv", in_hash}},
             {out_dir / "dataset_labeled.csv", out_dir / "cluster_model.json"},
             seconds_since(t0));
}

void stage_representatives(const PipelineConfig& cfg, const path& out_dir) {
  cfg.validate();
  Manifest man = Manifest::open(out_dir, cfg.master_seed);
  const path model_path = out_dir / "cluster_model.json";
  const std::string in_hash = man.verify_input(model_path);
  const std::uint64_t seed = stage_seed(cfg.master_seed, "representatives");
  const auto t0 = Clock::now();

  ClusterModel model = io::load_cluster_model(model_path);
  if (model.k != cfg.k)
    throw ConfigError("cluster model has k=" + std::to_string(model.k) +
                      " but config says k=" + std::to_string(cfg.k));
  build_representatives(cfg.geometry(), model, cfg.cost_weights(),
                        cfg.optimizer_options());
  io::save_cluster_model(model_path, model);

  std::vector<path> outputs{model_path};
  for (int c = 0; c < model.k; ++c) {
    char name[48];
    std::snprintf(name, sizeof name, "cluster_model_rep_%02d.json", c);
    outputs.push_back(out_dir / name);
  }
  man.record("representatives", seed, {{"cluster_model.json", in_hash}},
             outputs, seconds_since(t0));
}

namespace {

struct SplitBatches {
  TrainingBatch train;
  TrainingBatch val;
};

/// Stratified split: each class contributes ~val_fraction of its rows to
/// validation (at least one when it has two or more), so rare clusters are
/// still represented in the early-stopping signal.
SplitBatches split_dataset(const MatrixXd& inputs, const VectorXi& labels,
                           int k, double val_fraction, std::uint64_t seed) {
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(k));
  for (Index i = 0; i < labels.size(); ++i)
    by_class[static_cast<std::size_t>(labels(i))].push_back(static_cast<int>(i));

  Rng rng(seed);
  std::vector<int> train_idx, val_idx;
  for (auto& members : by_class) {
    rng.shuffle(members);
    int n_val = 0;
    if (members.size() >= 2) {
      n_val = static_cast<int>(
          std::llround(val_fraction * static_cast<double>(members.size())));
      n_val = std::clamp(n_val, 1, static_cast<int>(members.size()) - 1);
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < static_cast<std::size_t>(n_val) ? val_idx : train_idx)
          .push_back(members[i]);
  }
  if (train_idx.empty() || val_idx.empty())
    throw ConfigError("dataset too small to split into train and validation");

  auto gather = [&](const std::vector<int>& idx) {
    TrainingBatch b;
    b.inputs.resize(static_cast<Index>(idx.size()), inputs.cols());
    b.labels = MatrixXd::Zero(static_cast<Index>(idx.size()), k);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      b.inputs.row(static_cast<Index>(r)) = inputs.row(idx[r]);
      b.labels(static_cast<Index>(r), labels(idx[r])) = 1.0;
    }
    return b;
  };
  return SplitBatches{gather(train_idx), gather(val_idx)};
}

}  // namespace

void stage_train(const PipelineConfig& cfg, const path& out_dir) {
  cfg.validate();
  Manifest man = Manifest::open(out_dir, cfg.master_seed);
  const path data_path = out_dir / "dataset_labeled.csv";
  const path model_path = out_dir / "cluster_model.json";
  const std::string data_hash = man.verify_input(data_path);
  const std::string model_hash = man.verify_input(model_path);
  const std::uint64_t seed = stage_seed(cfg.master_seed, "train");
  const auto t0 = Clock::now();

  const io::Dataset ds = io::load_dataset_csv(data_path);
  if (!ds.labels)
    throw ConfigError(data_path.string() + " has no label column");
  const ClusterModel clusters = io::load_cluster_model(model_path);
  if (clusters.k != cfg.k)
    throw ConfigError("cluster model k does not match config k");
  for (Index i = 0; i < ds.labels->size(); ++i)
    if ((*ds.labels)(i) < 0 || (*ds.labels)(i) >= clusters.k)
      throw ConfigError("label out of range in " + data_path.string());

  const MatrixXd normed = clusters.normalizer.normalize_rows(ds.features);
  const SplitBatches split =
      split_dataset(normed, *ds.labels, clusters.k, cfg.val_fraction,
                    splitmix64(seed ^ 3ull));

  std::vector<int> sizes{static_cast<int>(BeamRequirement::kFeatureCount)};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(clusters.k);
  const MlpModel init =
      MlpModel::init(sizes, cfg.activation_enum(), splitmix64(seed ^ 1ull),
                     clusters.normalizer);

  TrainingReport report;
  const MlpModel model = train(init, split.train, split.val, cfg.hyperparams(),
                               splitmix64(seed ^ 2ull), &report);
  io::save_mlp(out_dir / "mlp_model.json", model);
  io::save_training_report(out_dir, report);

  std::vector<path> outputs{out_dir / "mlp_model.json", out_dir / "curves.csv",
                            out_dir / "confusion.csv"};
  for (int c = 0; c < clusters.k; ++c)
    outputs.push_back(out_dir / ("roc_class_" + std::to_string(c) + ".csv"));
  man.record("train", seed,
             {{"dataset_labeled.csv", data_hash},
              {"cluster_model.json", model_hash}},
             outputs, seconds_since(t0));
}

void stage_eval(const PipelineConfig& cfg, const path& out_dir) {
  cfg.validate();
  Manifest man = Manifest::open(out_dir, cfg.master_seed);
  const path cluster_path = out_dir / "cluster_model.json";
  const path mlp_path = out_dir / "mlp_model.json";
  std::vector<std::pair<std::string, std::string>> inputs;
  inputs.emplace_back("cluster_model.json", man.verify_input(cluster_path));
  inputs.emplace_back("mlp_model.json", man.verify_input(mlp_path));
  // Representative files are loaded through the cluster model; check them too.
  {
    const json cj = io::read_json(cluster_path);
    if (cj.contains("representatives"))
      for (const auto& rel : cj["representatives"]) {
        const std::string name = rel.get<std::string>();
        inputs.emplace_back(name, man.verify_input(out_dir / name));
      }
  }
  const std::uint64_t seed = stage_seed(cfg.master_seed, "eval");
  const auto t0 = Clock::now();

  const ClusterModel clusters = io::load_cluster_model(cluster_path);
  if (clusters.representatives.empty())
    throw ConfigError("cluster model has no representatives; run that stage");
  const MlpModel model = io::load_mlp(mlp_path);
  const ArrayGeometry g = cfg.geometry();
  const MeasurementConfig meas = cfg.eval_measurement();

  const MatrixXd feats = sample_requirements(cfg, cfg.eval_samples, seed);

  std::string csv;
  for (int c = 0; c < BeamRequirement::kFeatureCount; ++c) {
    csv += BeamRequirement::kFeatureNames[static_cast<std::size_t>(c)];
    csv += ',';
  }
  csv +=
      "selected_cluster,ach_bw_az_deg,ach_bw_el_deg,ach_sll_az_db,"
      "ach_sll_el_db,ach_eirp_dbw,err_bw_az_deg,err_bw_el_deg,err_eirp_db\n";

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> err_bw_az, err_bw_el, err_sll_az, err_sll_el, err_eirp;
  int failures = 0;
  for (Index i = 0; i < feats.rows(); ++i) {
    const BeamRequirement req =
        BeamRequirement::from_features(feats.row(i).transpose());
    const Selection sel = select_matrix(model, clusters, g, req);
    PatternMetrics m;
    bool measured = true;
    try {
      m = measure_metrics(g, sel.weights, req.point_el_deg, req.point_az_deg,
                          meas);
    } catch (const MeasurementError&) {
      measured = false;
      ++failures;
    }
    const double bw_az = measured ? m.beamwidth_az_deg : nan;
    const double bw_el = measured ? m.beamwidth_el_deg : nan;
    const double sll_az = measured ? m.sll_az_db : nan;
    const double sll_el = measured ? m.sll_el_db : nan;
    const double eirp = measured ? m.eirp_dbw : nan;
    err_bw_az.push_back(bw_az - req.bw_az_deg);
    err_bw_el.push_back(bw_el - req.bw_el_deg);
    err_sll_az.push_back(sll_az - req.sll_az_db);
    err_sll_el.push_back(sll_el - req.sll_el_db);
    err_eirp.push_back(eirp - req.eirp_dbw);

    for (Index c = 0; c < feats.cols(); ++c)
      csv += io::format_double(feats(i, c)) + ',';
    csv += std::to_string(sel.cluster) + ',';
    csv += io::format_double(bw_az) + ',' + io::format_double(bw_el) + ',';
    csv += io::format_double(sll_az) + ',' + io::format_double(sll_el) + ',';
    csv += io::format_double(eirp) + ',';
    csv += io::format_double(err_bw_az.back()) + ',';
    csv += io::format_double(err_bw_el.back()) + ',';
    csv += io::format_double(err_eirp.back()) + '\n';
  }
  io::write_text_file(out_dir / "eval.csv", csv);

  const json summary{
      {"samples", static_cast<int>(feats.rows())},
      {"measurement_failures", failures},
      {"median_abs_bw_az_err_deg", median_abs(err_bw_az)},
      {"median_abs_bw_el_err_deg", median_abs(err_bw_el)},
      {"median_abs_sll_az_err_db", median_abs(err_sll_az)},
      {"median_abs_sll_el_err_db", median_abs(err_sll_el)},
      {"median_abs_eirp_err_db", median_abs(err_eirp)},
  };
  io::write_json_file(out_dir / "eval_summary.json", summary);

  man.record("eval", seed, inputs,
             {out_dir / "eval.csv", out_dir / "eval_summary.json"},
             seconds_since(t0));
}

void run_full_pipeline(const PipelineConfig& cfg, const path& out_dir) {
  stage_dataset(cfg, out_dir);
  stage_cluster(cfg, out_dir);
  stage_representatives(cfg, out_dir);
  stage_train(cfg, out_dir);
  stage_eval(cfg, out_dir);
}

// ---------------------------------------------------------------------------
// Timing comparison: full optimizer run vs classifier lookup, same beams.

BenchmarkResult benchmark_timing(const PipelineConfig& cfg, const path& out_dir,
                                 int n_beams) {
  cfg.validate();
  if (n_beams < 0) throw DomainError("bench beam count must be non-negative");
  const path cluster_path = out_dir / "cluster_model.json";
  const path mlp_path = out_dir / "mlp_model.json";
  if (!io::fs::exists(cluster_path) || !io::fs::exists(mlp_path))
    throw ConfigError("benchmark needs trained artifacts in " +
                      out_dir.string());

  BenchmarkResult r;
  const auto t_load = Clock::now();
  const ClusterModel clusters = io::load_cluster_model(cluster_path);
  const MlpModel model = io::load_mlp(mlp_path);
  r.model_load_s = seconds_since(t_load);
  if (clusters.representatives.empty())
    throw ConfigError("cluster model has no representatives");

  const ArrayGeometry g = cfg.geometry();
  const CostWeights weights = cfg.cost_weights();
  const OptimizeOptions opts = cfg.optimizer_options();
  const MatrixXd feats = sample_requirements(
      cfg, n_beams, stage_seed(cfg.master_seed, "bench"));

  for (Index i = 0; i < feats.rows(); ++i) {
    const BeamRequirement req =
        BeamRequirement::from_features(feats.row(i).transpose());

    const auto t_oracle = Clock::now();
    (void)optimize_matrix(g, req, weights, opts);
    r.oracle_seconds.push_back(seconds_since(t_oracle));

    const auto t_infer = Clock::now();
    (void)select_matrix(model, clusters, g, req);
    r.inference_seconds.push_back(seconds_since(t_infer));
  }
  for (double s : r.oracle_seconds) r.total_oracle_s += s;
  for (double s : r.inference_seconds) r.total_inference_s += s;
  r.speedup = (n_beams > 0 && r.total_inference_s > 0.0)
                  ? r.total_oracle_s / r.total_inference_s
                  : 0.0;
  return r;
}

void save_benchmark(const path& file, const BenchmarkResult& r) {
  const json j{{"oracle_seconds", r.oracle_seconds},
               {"inference_seconds", r.inference_seconds},
               {"total_oracle_s", r.total_oracle_s},
               {"total_inference_s", r.total_inference_s},
               {"model_load_s", r.model_load_s},
               {"speedup", r.speedup}};
  io::write_json_file(file, j);
}

}  // namespace beamsel
