#include "beamsel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "beamsel/errors.hpp"
#include "beamsel/rng.hpp"

namespace beamsel::io {

using nlohmann::json;

namespace {

json parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

template <typename T>
T field(const json& j, const fs::path& path, const char* key) {
  if (!j.contains(key))
    throw ParseError(path.string(), std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(path.string(), std::string("malformed field '") + key + "'");
  }
}

json json_rowmajor(const ArrayXXd& a) {
  json out = json::array();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

json json_vector(const VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

VectorXd vector_from_json(const json& j, const fs::path& path, const char* key) {
  const auto arr = field<std::vector<double>>(j, path, key);
  VectorXd v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = arr[i];
  return v;
}

double parse_double_field(const std::string& text, const fs::path& path,
                          long line) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || end != begin + text.size())
    throw ParseError(path.string(), line, "malformed number '" + text + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

json normalizer_to_json(const FeatureNormalizer& n) {
  return json{{"means", json_vector(n.means)},
              {"std_devs", json_vector(n.std_devs)},
              {"had_degenerate", n.had_degenerate}};
}

FeatureNormalizer normalizer_from_json(const json& j, const fs::path& path) {
  FeatureNormalizer n;
  n.means = vector_from_json(j, path, "means");
  n.std_devs = vector_from_json(j, path, "std_devs");
  n.had_degenerate = field<bool>(j, path, "had_degenerate");
  if (n.means.size() != n.std_devs.size())
    throw ParseError(path.string(), "normalizer means/std_devs length mismatch");
  return n;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_weights(const fs::path& path, const WeightMatrix& w) {
  w.validate();
  json mask = json::array();
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j) mask.push_back(w.active(i, j) ? 1 : 0);
  write_json(path, json{{"rows", w.rows()},
                        {"cols", w.cols()},
                        {"amp", json_rowmajor(w.amplitudes)},
                        {"phase_rad", json_rowmajor(w.phases_rad)},
                        {"mask", mask},
                        {"per_element_power_w", w.per_element_power_w}});
}

WeightMatrix load_weights(const fs::path& path) {
  const json j = parse_file(path);
  const auto rows = field<Index>(j, path, "rows");
  const auto cols = field<Index>(j, path, "cols");
  if (rows < 1 || cols < 1)
    throw ParseError(path.string(), "non-positive matrix dimensions");
  const auto amp = field<std::vector<double>>(j, path, "amp");
  const auto phase = field<std::vector<double>>(j, path, "phase_rad");
  const auto mask = field<std::vector<int>>(j, path, "mask");
  const auto n = static_cast<std::size_t>(rows * cols);
  if (amp.size() != n || phase.size() != n || mask.size() != n)
    throw ParseError(path.string(), "array lengths do not match rows*cols");

  WeightMatrix w;
  w.amplitudes.resize(rows, cols);
  w.phases_rad.resize(rows, cols);
  w.active.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index jj = 0; jj < cols; ++jj) {
      const auto f = static_cast<std::size_t>(i * cols + jj);
      w.amplitudes(i, jj) = amp[f];
      w.phases_rad(i, jj) = phase[f];
      if (mask[f] != 0 && mask[f] != 1)
        throw ParseError(path.string(), "mask entries must be 0 or 1");
      w.active(i, jj) = mask[f] == 1;
    }
  }
  w.per_element_power_w = field<double>(j, path, "per_element_power_w");
  try {
    w.validate();
  } catch (const DomainError& e) {
    throw ParseError(path.string(), e.what());
  }
  return w;
}

void save_requirement(const fs::path& path, const BeamRequirement& r) {
  write_json(path, json{{"bw_az_deg", r.bw_az_deg},
                        {"bw_el_deg", r.bw_el_deg},
                        {"sll_az_db", r.sll_az_db},
                        {"sll_el_db", r.sll_el_db},
                        {"eirp_dbw", r.eirp_dbw},
                        {"point_el_deg", r.point_el_deg},
                        {"point_az_deg", r.point_az_deg}});
}

BeamRequirement load_requirement(const fs::path& path) {
  const json j = parse_file(path);
  BeamRequirement r;
  r.bw_az_deg = field<double>(j, path, "bw_az_deg");
  r.bw_el_deg = field<double>(j, path, "bw_el_deg");
  r.sll_az_db = field<double>(j, path, "sll_az_db");
  r.sll_el_db = field<double>(j, path, "sll_el_db");
  r.eirp_dbw = field<double>(j, path, "eirp_dbw");
  r.point_el_deg = field<double>(j, path, "point_el_deg");
  r.point_az_deg = field<double>(j, path, "point_az_deg");
  try {
    r.validate();
  } catch (const DomainError& e) {
    throw ParseError(path.string(), e.what());
  }
  return r;
}

void save_synthesis_params(const fs::path& path, const SynthesisParams& p) {
  json nulls = json::array();
  for (const NullDirection& nd : p.nulls)
    nulls.push_back(json{{"theta_rad", nd.theta_rad}, {"phi_rad", nd.phi_rad}});
  write_json(path, json{{"steer_theta_rad", p.steer_theta_rad},
                        {"steer_phi_rad", p.steer_phi_rad},
                        {"taper_sll_az_db", p.taper_sll_az_db},
                        {"taper_sll_el_db", p.taper_sll_el_db},
                        {"active_rows", p.active_rows},
                        {"active_cols", p.active_cols},
                        {"power_scale", p.power_scale},
                        {"nulls", nulls}});
}

SynthesisParams load_synthesis_params(const fs::path& path) {
  const json j = parse_file(path);
  SynthesisParams p;
  p.steer_theta_rad = field<double>(j, path, "steer_theta_rad");
  p.steer_phi_rad = field<double>(j, path, "steer_phi_rad");
  p.taper_sll_az_db = field<double>(j, path, "taper_sll_az_db");
  p.taper_sll_el_db = field<double>(j, path, "taper_sll_el_db");
  p.active_rows = field<int>(j, path, "active_rows");
  p.active_cols = field<int>(j, path, "active_cols");
  p.power_scale = field<double>(j, path, "power_scale");
  if (j.contains("nulls")) {
    if (!j.at("nulls").is_array())
      throw ParseError(path.string(), "malformed field 'nulls'");
    for (const json& nd : j.at("nulls")) {
      p.nulls.push_back(NullDirection{field<double>(nd, path, "theta_rad"),
                                      field<double>(nd, path, "phi_rad")});
    }
  }
  return p;
}

void save_cut_csv(const fs::path& path, const PatternCut& cut) {
  std::string text = "angle_deg,mag_db\n";
  for (Index i = 0; i < cut.size(); ++i) {
    text += format_double(cut.angle_deg(i));
    text += ',';
    text += format_double(cut.mag_db(i));
    text += '\n';
  }
  write_text(path, text);
}

PatternCut load_cut_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"angle_deg",
                                                              "mag_db"})
    throw ParseError(path.string(), 1, "expected header 'angle_deg,mag_db'");

  std::vector<double> angles, mags;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ParseError(path.string(), lineno, "expected 2 fields");
    angles.push_back(parse_double_field(fields[0], path, lineno));
    mags.push_back(parse_double_field(fields[1], path, lineno));
  }
  if (angles.size() < 2)
    throw ParseError(path.string(), "cut needs at least 2 samples");

  PatternCut cut;
  cut.start_deg = angles.front();
  cut.step_deg = angles[1] - angles[0];
  if (!(cut.step_deg > 0.0))
    throw ParseError(path.string(), "angles must be strictly increasing");
  cut.mag_db.resize(static_cast<Index>(mags.size()));
  for (std::size_t i = 0; i < mags.size(); ++i) {
    const double expected = cut.start_deg + cut.step_deg * static_cast<double>(i);
    if (std::abs(angles[i] - expected) > 1e-9)
      throw ParseError(path.string(), static_cast<long>(i) + 2,
                       "angle column is not uniformly spaced");
    cut.mag_db(static_cast<Index>(i)) = mags[i];
  }
  return cut;
}

void save_metrics(const fs::path& path, const PatternMetrics& m) {
  write_json(path, json{{"beamwidth_az_deg", m.beamwidth_az_deg},
                        {"beamwidth_el_deg", m.beamwidth_el_deg},
                        {"sll_az_db", m.sll_az_db},
                        {"sll_el_db", m.sll_el_db},
                        {"eirp_dbw", m.eirp_dbw},
                        {"directivity_dbi", m.directivity_dbi},
                        {"peak_el_deg", m.peak_el_deg},
                        {"peak_az_deg", m.peak_az_deg}});
}

void save_cost(const fs::path& path, const CostBreakdown& c) {
  write_json(path, json{{"z1", c.z1}, {"z2", c.z2}, {"z3", c.z3},
                        {"total", c.total}});
}

void save_dataset_csv(const fs::path& path, const MatrixXd& features,
                      const VectorXi* labels) {
  if (features.cols() != BeamRequirement::kFeatureCount)
    throw DomainError("dataset: expected 7 feature columns");
  if (labels != nullptr && labels->size() != features.rows())
    throw DomainError("dataset: label count does not match rows");
  std::string text;
  for (int f = 0; f < BeamRequirement::kFeatureCount; ++f) {
    if (f) text += ',';
    text += BeamRequirement::kFeatureNames[f];
  }
  if (labels != nullptr) text += ",label";
  text += '\n';
  for (Index i = 0; i < features.rows(); ++i) {
    for (Index j = 0; j < features.cols(); ++j) {
      if (j) text += ',';
      text += format_double(features(i, j));
    }
    if (labels != nullptr) {
      text += ',';
      text += std::to_string((*labels)(i));
    }
    text += '\n';
  }
  write_text(path, text);
}

Dataset load_dataset_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path.string(), 1, "empty dataset file");
  const auto header = split_csv_line(line);
  const int nf = BeamRequirement::kFeatureCount;
  bool labeled = false;
  if (static_cast<int>(header.size()) == nf + 1 && header.back() == "label")
    labeled = true;
  else if (static_cast<int>(header.size()) != nf)
    throw ParseError(path.string(), 1, "unexpected column count in header");
  for (int f = 0; f < nf; ++f)
    if (header[static_cast<std::size_t>(f)] != BeamRequirement::kFeatureNames[f])
      throw ParseError(path.string(), 1,
                       std::string("expected column '") +
                           BeamRequirement::kFeatureNames[f] + "'");

  std::vector<std::array<double, 7>> rows;
  std::vector<int> labels;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != nf + (labeled ? 1 : 0))
      throw ParseError(path.string(), lineno, "wrong field count");
    std::array<double, 7> row{};
    for (int f = 0; f < nf; ++f)
      row[static_cast<std::size_t>(f)] =
          parse_double_field(fields[static_cast<std::size_t>(f)], path, lineno);
    rows.push_back(row);
    if (labeled) {
      const double lv = parse_double_field(fields.back(), path, lineno);
      if (lv != std::floor(lv) || lv < 0)
        throw ParseError(path.string(), lineno, "label must be a non-negative integer");
      labels.push_back(static_cast<int>(lv));
    }
  }
  if (rows.empty()) throw ParseError(path.string(), "dataset has no rows");

  Dataset d;
  d.features.resize(static_cast<Index>(rows.size()), nf);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int f = 0; f < nf; ++f)
      d.features(static_cast<Index>(i), f) = rows[i][static_cast<std::size_t>(f)];
  if (labeled) {
    VectorXi l(static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
      l(static_cast<Index>(i)) = labels[i];
    d.labels = l;
  }
  return d;
}

void save_cluster_model(const fs::path& path, const ClusterModel& model) {
  json centroids = json::array();
  for (Index i = 0; i < model.centroids.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < model.centroids.cols(); ++j)
      row.push_back(model.centroids(i, j));
    centroids.push_back(row);
  }
  json reps = json::array();
  if (!model.representatives.empty()) {
    if (static_cast<int>(model.representatives.size()) != model.k)
      throw DomainError("cluster model: representative count must equal K");
    const std::string stem = path.stem().string();
    for (int c = 0; c < model.k; ++c) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_rep_%02d.json", stem.c_str(), c);
      save_weights(path.parent_path() / name,
                   model.representatives[static_cast<std::size_t>(c)]);
      reps.push_back(name);
    }
  }
  write_json(path, json{{"k", model.k},
                        {"centroids", centroids},
                        {"normalizer", normalizer_to_json(model.normalizer)},
                        {"inertia", model.inertia},
                        {"representatives", reps}});
}

ClusterModel load_cluster_model(const fs::path& path) {
  const json j = parse_file(path);
  ClusterModel m;
  m.k = field<int>(j, path, "k");
  if (m.k < 1) throw ParseError(path.string(), "k must be positive");
  const json& cj = j.contains("centroids") ? j.at("centroids") : json();
  if (!cj.is_array() || static_cast<int>(cj.size()) != m.k)
    throw ParseError(path.string(), "centroids must be an array of k rows");
  const Index nf = BeamRequirement::kFeatureCount;
  m.centroids.resize(m.k, nf);
  for (int i = 0; i < m.k; ++i) {
    if (!cj[i].is_array() || static_cast<Index>(cj[i].size()) != nf)
      throw ParseError(path.string(), "centroid rows must have 7 entries");
    for (Index f = 0; f < nf; ++f) {
      if (!cj[i][f].is_number())
        throw ParseError(path.string(), "centroid entries must be numbers");
      m.centroids(i, f) = cj[i][f].get<double>();
    }
  }
  if (!j.contains("normalizer"))
    throw ParseError(path.string(), "missing field 'normalizer'");
  m.normalizer = normalizer_from_json(j.at("normalizer"), path);
  m.inertia = field<double>(j, path, "inertia");
  const auto reps = field<std::vector<std::string>>(j, path, "representatives");
  if (!reps.empty()) {
    if (static_cast<int>(reps.size()) != m.k)
      throw ParseError(path.string(), "representative count must equal k");
    for (const std::string& rel : reps)
      m.representatives.push_back(load_weights(path.parent_path() / rel));
  }
  return m;
}

void save_mlp(const fs::path& path, const MlpModel& m) {
  m.validate();
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    json w = json::array();
    for (Index r = 0; r < m.weights[l].rows(); ++r)
      for (Index c = 0; c < m.weights[l].cols(); ++c)
        w.push_back(m.weights[l](r, c));
    weights.push_back(w);
    biases.push_back(json_vector(m.biases[l]));
  }
  write_json(path,
             json{{"layer_sizes", m.layer_sizes},
                  {"activation",
                   m.hidden_activation == Activation::relu ? "relu" : "tanh"},
                  {"weights", weights},
                  {"biases", biases},
                  {"normalizer", normalizer_to_json(m.normalizer)},
                  {"k", m.class_count()},
                  {"init_seed", m.init_seed}});
}

MlpModel load_mlp(const fs::path& path) {
  const json j = parse_file(path);
  MlpModel m;
  m.layer_sizes = field<std::vector<int>>(j, path, "layer_sizes");
  const auto act = field<std::string>(j, path, "activation");
  if (act == "relu")
    m.hidden_activation = Activation::relu;
  else if (act == "tanh")
    m.hidden_activation = Activation::tanh;
  else
    throw ParseError(path.string(), "unknown activation '" + act + "'");
  if (m.layer_sizes.size() < 2)
    throw ParseError(path.string(), "layer_sizes needs at least 2 entries");

  const json& wj = j.contains("weights") ? j.at("weights") : json();
  const json& bj = j.contains("biases") ? j.at("biases") : json();
  if (!wj.is_array() || !bj.is_array() ||
      wj.size() != m.layer_sizes.size() - 1 || bj.size() != wj.size())
    throw ParseError(path.string(), "weights/biases layer count mismatch");
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const Index rows = m.layer_sizes[l + 1];
    const Index cols = m.layer_sizes[l];
    const auto flat = wj[l].get<std::vector<double>>();
    if (static_cast<Index>(flat.size()) != rows * cols)
      throw ParseError(path.string(), "weight array length mismatch");
    MatrixXd w(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c)
        w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    m.weights.push_back(std::move(w));
    const auto bflat = bj[l].get<std::vector<double>>();
    if (static_cast<Index>(bflat.size()) != rows)
      throw ParseError(path.string(), "bias array length mismatch");
    VectorXd b(rows);
    for (Index r = 0; r < rows; ++r) b(r) = bflat[static_cast<std::size_t>(r)];
    m.biases.push_back(std::move(b));
  }
  if (!j.contains("normalizer"))
    throw ParseError(path.string(), "missing field 'normalizer'");
  m.normalizer = normalizer_from_json(j.at("normalizer"), path);
  if (j.contains("init_seed"))
    m.init_seed = field<std::uint64_t>(j, path, "init_seed");
  const int k = field<int>(j, path, "k");
  if (k != m.class_count())
    throw ParseError(path.string(), "k does not match the output layer");
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ParseError(path.string(), e.what());
  }
  return m;
}

void save_training_report(const fs::path& dir, const TrainingReport& rep) {
  fs::create_directories(dir);
  std::string curves = "epoch,train_loss,val_loss,train_acc,val_acc\n";
  for (std::size_t e = 0; e < rep.train_loss.size(); ++e) {
    curves += std::to_string(e) + ',' + format_double(rep.train_loss[e]) + ',' +
              format_double(rep.val_loss[e]) + ',' +
              format_double(rep.train_accuracy[e]) + ',' +
              format_double(rep.val_accuracy[e]) + '\n';
  }
  write_text(dir / "curves.csv", curves);

  std::string confusion;
  for (Index i = 0; i < rep.confusion.rows(); ++i) {
    for (Index j = 0; j < rep.confusion.cols(); ++j) {
      if (j) confusion += ',';
      confusion += std::to_string(
          static_cast<long long>(std::llround(rep.confusion(i, j))));
    }
    confusion += '\n';
  }
  write_text(dir / "confusion.csv", confusion);

  for (std::size_t c = 0; c < rep.roc.size(); ++c) {
    std::string roc = "threshold,tpr,fpr\n";
    const RocCurve& curve = rep.roc[c];
    for (Index t = 0; t < curve.thresholds.size(); ++t) {
      roc += format_double(curve.thresholds(t)) + ',' +
             format_double(curve.tpr(t)) + ',' + format_double(curve.fpr(t)) +
             '\n';
    }
    write_text(dir / ("roc_class_" + std::to_string(c) + ".csv"), roc);
  }
}

std::uint64_t hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  return fnv1a64(bytes);
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json(const fs::path& path) { return parse_file(path); }

void write_json_file(const fs::path& path, const json& j) {
  write_json(path, j);
}

void write_text_file(const fs::path& path, const std::string& text) {
  write_text(path, text);
}

}  // namespace beamsel::io
