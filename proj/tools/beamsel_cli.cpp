// Command-line front end. Every subcommand is a thin wrapper over the
// library; all interesting behaviour lives there where the tests can see it.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "beamsel/errors.hpp"
#include "beamsel/io.hpp"
#include "beamsel/pipeline.hpp"

namespace {

using beamsel::io::fs::path;

struct GlobalArgs {
  std::string config_file;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

beamsel::PipelineConfig resolve_config(const GlobalArgs& ga) {
  beamsel::PipelineConfig cfg;
  if (!ga.config_file.empty())
    cfg = beamsel::load_pipeline_config(ga.config_file);
  if (ga.seed_set) cfg.master_seed = ga.seed;
  if (!ga.out_dir.empty()) cfg.out_dir = ga.out_dir;
  cfg.validate();
  return cfg;
}

void print_metrics(const beamsel::PatternMetrics& m) {
  std::printf(
      "beamwidth az/el = %.4f / %.4f deg, SLL az/el = %.2f / %.2f dB,\n"
      "EIRP = %.2f dBW (directivity %.2f dBi)\n",
      m.beamwidth_az_deg, m.beamwidth_el_deg, m.sll_az_db, m.sll_el_db,
      m.eirp_dbw, m.directivity_dbi);
}

int run(CLI::App& app, const GlobalArgs& ga) {
  using namespace beamsel;

  if (app.got_subcommand("gen")) {
    const auto cfg = resolve_config(ga);
    stage_dataset(cfg, cfg.out_dir);
    std::printf("wrote %s/dataset.csv (%d rows)\n", cfg.out_dir.c_str(),
                cfg.samples);
  } else if (app.got_subcommand("cluster")) {
    const auto cfg = resolve_config(ga);
    stage_cluster(cfg, cfg.out_dir);
    std::printf("wrote %s/cluster_model.json (k=%d)\n", cfg.out_dir.c_str(),
                cfg.k);
  } else if (app.got_subcommand("reps")) {
    const auto cfg = resolve_config(ga);
    std::printf("optimizing %d representative matrices...\n", cfg.k);
    std::fflush(stdout);
    stage_representatives(cfg, cfg.out_dir);
    std::printf("wrote %s/cluster_model_rep_*.json\n", cfg.out_dir.c_str());
  } else if (app.got_subcommand("train")) {
    const auto cfg = resolve_config(ga);
    stage_train(cfg, cfg.out_dir);
    std::printf("wrote %s/mlp_model.json and training curves\n",
                cfg.out_dir.c_str());
  } else if (app.got_subcommand("eval")) {
    const auto cfg = resolve_config(ga);
    stage_eval(cfg, cfg.out_dir);
    const auto s = io::read_json(path(cfg.out_dir) / "eval_summary.json");
    std::printf(
        "evaluated %d beams: median |bw err| az/el = %.4f / %.4f deg, "
        "median |EIRP err| = %.3f dB\n",
        s["samples"].get<int>(), s["median_abs_bw_az_err_deg"].get<double>(),
        s["median_abs_bw_el_err_deg"].get<double>(),
        s["median_abs_eirp_err_db"].get<double>());
  } else if (app.got_subcommand("pipeline")) {
    const auto cfg = resolve_config(ga);
    struct Step {
      const char* name;
      void (*fn)(const PipelineConfig&, const io::fs::path&);
    };
    const Step steps[] = {{"dataset", stage_dataset},
                          {"cluster", stage_cluster},
                          {"representatives", stage_representatives},
                          {"train", stage_train},
                          {"eval", stage_eval}};
    for (const Step& s : steps) {
      std::printf("[pipeline] %s...\n", s.name);
      std::fflush(stdout);
      s.fn(cfg, cfg.out_dir);
    }
    std::printf("[pipeline] done, artifacts in %s\n", cfg.out_dir.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace beamsel;

  CLI::App app{"adaptive beam-weight selection for a subarrayed direct-radiating array"};
  app.require_subcommand(1);

  GlobalArgs ga;
  app.add_option("--config", ga.config_file, "pipeline config JSON")
      ->check(CLI::ExistingFile);
  app.add_option("--out-dir", ga.out_dir, "artifact directory override");
  auto* seed_opt =
      app.add_option("--seed", ga.seed, "master seed override");

  app.add_subcommand("gen", "sample a requirement dataset");
  app.add_subcommand("cluster", "k-means over the dataset");
  app.add_subcommand("reps", "optimize one matrix per cluster");
  app.add_subcommand("train", "train the cluster classifier");
  app.add_subcommand("eval", "measure classifier picks on held-out beams");
  app.add_subcommand("pipeline", "run all stages in order");

  auto* oracle = app.add_subcommand(
      "oracle", "run the full optimizer on one requirement");
  std::string oracle_req;
  oracle->add_option("--req", oracle_req, "requirement JSON")
      ->required()
      ->check(CLI::ExistingFile);

  auto* infer =
      app.add_subcommand("infer", "pick a matrix for one requirement");
  std::string infer_req;
  infer->add_option("--req", infer_req, "requirement JSON")
      ->required()
      ->check(CLI::ExistingFile);

  auto* synth =
      app.add_subcommand("synth", "build a weight matrix from a recipe");
  std::string synth_params, synth_out;
  synth->add_option("--params", synth_params, "synthesis recipe JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output weight JSON path");

  auto* exportp = app.add_subcommand(
      "export-pattern", "cut CSVs and metrics for a weight matrix");
  std::string export_weights;
  double export_el = 0.0, export_az = 0.0;
  double export_half = 8.7, export_step = 0.01;
  exportp->add_option("--weights", export_weights, "weight matrix JSON")
      ->required()
      ->check(CLI::ExistingFile);
  exportp->add_option("--center-el", export_el, "cut center elevation, deg");
  exportp->add_option("--center-az", export_az, "cut center azimuth, deg");
  exportp->add_option("--half-span", export_half, "cut half span, deg");
  exportp->add_option("--step", export_step, "cut step, deg");

  auto* bench = app.add_subcommand(
      "bench", "time the optimizer against classifier inference");
  int bench_beams = -1;
  bench->add_option("--beams", bench_beams, "beams to time (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  ga.seed_set = seed_opt->count() > 0;

  try {
    if (app.got_subcommand("oracle")) {
      const auto cfg = resolve_config(ga);
      const BeamRequirement req = io::load_requirement(oracle_req);
      const path out(cfg.out_dir);
      const OptimizeResult res = optimize_matrix(
          cfg.geometry(), req, cfg.cost_weights(), cfg.optimizer_options());
      io::save_weights(out / "oracle_weights.json", res.weights);
      io::save_synthesis_params(out / "oracle_params.json", res.params);
      io::save_metrics(out / "oracle_metrics.json", res.metrics);
      io::save_cost(out / "oracle_cost.json", res.cost);
      std::printf("cost %.6f after %d evaluations (%.2f s)\n", res.cost.total,
                  res.evaluations, res.elapsed_s);
      print_metrics(res.metrics);
      std::printf("artifacts in %s/oracle_*.json\n", cfg.out_dir.c_str());
      return 0;
    }
    if (app.got_subcommand("infer")) {
      const auto cfg = resolve_config(ga);
      const BeamRequirement req = io::load_requirement(infer_req);
      const path out(cfg.out_dir);
      const ClusterModel clusters =
          io::load_cluster_model(out / "cluster_model.json");
      const MlpModel model = io::load_mlp(out / "mlp_model.json");
      const Selection sel = select_matrix(model, clusters, cfg.geometry(), req);
      io::save_weights(out / "infer_weights.json", sel.weights);
      std::printf("selected cluster %d (p=%.4f), wrote %s/infer_weights.json\n",
                  sel.cluster, sel.probabilities(sel.cluster),
                  cfg.out_dir.c_str());
      return 0;
    }
    if (app.got_subcommand("synth")) {
      const auto cfg = resolve_config(ga);
      const SynthesisParams params = io::load_synthesis_params(synth_params);
      const WeightMatrix w = synthesize(cfg.geometry(), params);
      const path out_path = synth_out.empty()
                                ? path(cfg.out_dir) / "weights.json"
                                : path(synth_out);
      io::save_weights(out_path, w);
      std::printf("wrote %s (%dx%d active window)\n", out_path.string().c_str(),
                  params.active_rows, params.active_cols);
      return 0;
    }
    if (app.got_subcommand("export-pattern")) {
      const auto cfg = resolve_config(ga);
      const WeightMatrix w = io::load_weights(export_weights);
      const ArrayGeometry g = cfg.geometry();
      const path out(cfg.out_dir);
      MeasurementConfig meas;
      meas.cut_half_span_deg = export_half;
      meas.cut_step_deg = export_step;
      const PatternCut az = compute_cut(g, w, CutKind::azimuth, export_el,
                                        export_az, export_half, export_step);
      const PatternCut el = compute_cut(g, w, CutKind::elevation, export_az,
                                        export_el, export_half, export_step);
      io::save_cut_csv(out / "pattern_az.csv", az);
      io::save_cut_csv(out / "pattern_el.csv", el);
      const PatternMetrics m = measure_metrics(g, w, export_el, export_az, meas);
      io::save_metrics(out / "pattern_metrics.json", m);
      print_metrics(m);
      std::printf("cuts in %s/pattern_{az,el}.csv\n", cfg.out_dir.c_str());
      return 0;
    }
    if (app.got_subcommand("bench")) {
      const auto cfg = resolve_config(ga);
      const int beams = bench_beams >= 0 ? bench_beams : cfg.bench_beams;
      const BenchmarkResult r = benchmark_timing(cfg, cfg.out_dir, beams);
      save_benchmark(path(cfg.out_dir) / "bench.json", r);
      std::printf(
          "%d beams: optimizer %.2f s total, inference %.6f s total, "
          "model load %.3f s\nspeedup %.0fx\n",
          beams, r.total_oracle_s, r.total_inference_s, r.model_load_s,
          r.speedup);
      return 0;
    }
    return run(app, ga);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
