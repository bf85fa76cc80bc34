#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamsel/io.hpp"
#include "beamsel/mlp.hpp"
#include "beamsel/optimizer.hpp"

namespace beamsel {

/// Everything a full run needs, mirrored 1:1 by the flat JSON config file.
/// Unknown keys in the file are rejected so typos fail loudly.
struct PipelineConfig {
  // geometry
  double carrier_frequency_hz = 19.0e9;
  int chain_rows = 36;
  int chain_cols = 36;
  int elements_per_subarray = 4;
  double element_pitch_wavelengths = 0.875;
  double efficiency = 0.9;
  double element_exponent = 1.0;

  // requirement sampling
  int samples = 5000;
  double bw_min_deg = 0.45;
  double bw_max_deg = 1.5;
  double sll_min_db = -30.0;
  double sll_max_db = -20.0;
  double eirp_min_dbw = 50.0;
  double eirp_max_dbw = 70.0;
  double pointing_max_deg = 8.7;

  // clustering
  int k = 20;
  int kmeans_restarts = 10;
  int kmeans_max_iters = 300;
  double kmeans_tol = 1e-6;

  // reference optimizer
  double cost_k1 = 1.0;
  double cost_k2 = 1.0;
  double cost_k3 = 1.0;
  std::string eirp_mode = "absolute";  // or "signed"
  int budget = 160;

  // classifier
  std::vector<int> hidden_layers{64, 64};
  std::string activation = "relu";  // or "tanh"
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_epochs = 200;
  int patience = 20;
  double val_fraction = 0.2;

  // evaluation / benchmark
  int eval_samples = 200;
  int bench_beams = 10;

  std::uint64_t master_seed = 12345;
  std::string out_dir = "out";

  void validate() const;
  ArrayGeometry geometry() const;
  CostWeights cost_weights() const;
  EirpMode eirp_mode_enum() const;
  Activation activation_enum() const;
  OptimizeOptions optimizer_options() const;
  Hyperparams hyperparams() const;

  /// Metric settings for held-out evaluation: same cuts as the optimizer,
  /// denser quadrature since only ~200 patterns are measured.
  MeasurementConfig eval_measurement() const;
};

PipelineConfig load_pipeline_config(const io::fs::path& path);

struct BenchmarkResult {
  std::vector<double> oracle_seconds;     // per beam
  std::vector<double> inference_seconds;  // per beam
  double total_oracle_s = 0.0;
  double total_inference_s = 0.0;
  double model_load_s = 0.0;
  double speedup = 0.0;
};

MatrixXd sample_requirements(const PipelineConfig& cfg, int count,
                             std::uint64_t seed);

/// Stages write into out_dir and append themselves to manifest.json there.
/// Each stage re-hashes the files it consumes and refuses to run if a file
/// no longer matches what the producing stage recorded.
void stage_dataset(const PipelineConfig& cfg, const io::fs::path& out_dir);
void stage_cluster(const PipelineConfig& cfg, const io::fs::path& out_dir);
void stage_representatives(const PipelineConfig& cfg,
                           const io::fs::path& out_dir);
void stage_train(const PipelineConfig& cfg, const io::fs::path& out_dir);
void stage_eval(const PipelineConfig& cfg, const io::fs::path& out_dir);
void run_full_pipeline(const PipelineConfig& cfg, const io::fs::path& out_dir);

BenchmarkResult benchmark_timing(const PipelineConfig& cfg,
                                 const io::fs::path& out_dir, int n_beams);
void save_benchmark(const io::fs::path& path, const BenchmarkResult& r);

}  // namespace beamsel
