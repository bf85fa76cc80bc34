#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "beamsel/kmeans.hpp"
#include "beamsel/mlp.hpp"
#include "beamsel/pattern.hpp"
#include "beamsel/requirement.hpp"
#include "beamsel/synthesis.hpp"
#include "beamsel/types.hpp"
#include "beamsel/weights.hpp"

namespace beamsel::io {

namespace fs = std::filesystem;

/// Doubles in CSV files go through "%.17g" so a rerun with identical
/// inputs reproduces the bytes, not just the values.
std::string format_double(double v);

void save_weights(const fs::path& path, const WeightMatrix& w);
WeightMatrix load_weights(const fs::path& path);

void save_requirement(const fs::path& path, const BeamRequirement& r);
BeamRequirement load_requirement(const fs::path& path);

void save_synthesis_params(const fs::path& path, const SynthesisParams& p);
SynthesisParams load_synthesis_params(const fs::path& path);

void save_cut_csv(const fs::path& path, const PatternCut& cut);
/// Rebuilds start/step from the angle column; the cut kind and fixed angle
/// are not stored in the CSV and come back as defaults.
PatternCut load_cut_csv(const fs::path& path);

void save_metrics(const fs::path& path, const PatternMetrics& m);
void save_cost(const fs::path& path, const CostBreakdown& c);

struct Dataset {
  MatrixXd features;  // rows x 7, canonical column order
  std::optional<VectorXi> labels;
};

void save_dataset_csv(const fs::path& path, const MatrixXd& features,
                      const VectorXi* labels = nullptr);
Dataset load_dataset_csv(const fs::path& path);

/// Representatives are written as <stem>_rep_<i>.json next to the model
/// file and referenced by relative path inside it.
void save_cluster_model(const fs::path& path, const ClusterModel& model);
ClusterModel load_cluster_model(const fs::path& path);

void save_mlp(const fs::path& path, const MlpModel& m);
MlpModel load_mlp(const fs::path& path);

/// curves.csv, confusion.csv and roc_class_<i>.csv under `dir`.
void save_training_report(const fs::path& dir, const TrainingReport& rep);

std::uint64_t hash_file(const fs::path& path);
std::string hash_hex(std::uint64_t h);

/// Shared plumbing for modules with their own document shapes (pipeline
/// manifest, config files): open/parse errors come back as IoError or
/// ParseError like everywhere else in this namespace.
nlohmann::json read_json(const fs::path& path);
void write_json_file(const fs::path& path, const nlohmann::json& j);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace beamsel::io
