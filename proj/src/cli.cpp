#include "fbgtpe/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fbgtpe/eval_harness.hpp"
#include "fbgtpe/io/geometry_io.hpp"
#include "fbgtpe/io/keyvalue.hpp"
#include "fbgtpe/io/manifest.hpp"
#include "fbgtpe/io/model_io.hpp"
#include "fbgtpe/io/scenario_io.hpp"
#include "fbgtpe/io/streams.hpp"
#include "fbgtpe/regression.hpp"
#include "fbgtpe/shape_recon.hpp"
#include "fbgtpe/simulator.hpp"
#include "fbgtpe/version.hpp"

namespace fbgtpe::cli {

namespace {

namespace fs = std::filesystem;

// Paths that do not exist as given are retried under FBGTPE_CONFIG_DIR.
std::string resolve_config(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("FBGTPE_CONFIG_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

std::string join(const fs::path& dir, const std::string& name) {
  return (dir / name).string();
}

io::RunManifest start_manifest(const std::string& subcommand,
                               const std::vector<std::string>& args) {
  io::RunManifest m;
  m.tool_version = kVersion;
  m.subcommand = subcommand;
  m.arguments = args;
  return m;
}

void add_input(io::RunManifest& m, const std::string& path) {
  m.input_checksums.emplace_back(path, io::file_checksum_hex(path));
}

std::string fingerprint_hex(const sensor::SensorGeometry& geom) {
  return io::checksum_hex(io::serialize_geometry(geom));
}

void report_rows(std::string& csv, nlohmann::ordered_json& json_methods,
                 const eval::ErrorReport& r) {
  const auto& s = r.small_deflection;
  const auto& l = r.large_deflection;
  csv += r.method + ',' + io::format_double(r.mean_mm) + ',' + io::format_double(r.std_mm) +
         ',' + io::format_double(r.max_mm) + ',' + std::to_string(r.count) + ',' +
         io::format_double(s.mean_mm) + ',' + std::to_string(s.count) + ',' +
         io::format_double(l.mean_mm) + ',' + std::to_string(l.count) + '\n';
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["mean_mm"] = r.mean_mm;
  j["std_mm"] = r.std_mm;
  j["max_mm"] = r.max_mm;
  j["count"] = r.count;
  j["small_deflection"] = {{"mean_mm", s.mean_mm}, {"std_mm", s.std_mm},
                           {"max_mm", s.max_mm}, {"count", s.count}};
  j["large_deflection"] = {{"mean_mm", l.mean_mm}, {"std_mm", l.std_mm},
                           {"max_mm", l.max_mm}, {"count", l.count}};
  json_methods.push_back(j);
}

std::string format_table(const std::vector<eval::MethodOutcome>& outcomes) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-16s %10s %10s %10s %8s %12s %12s\n", "method",
                "mean_mm", "std_mm", "max_mm", "n", "mean<=10mm", "mean>10mm");
  out += buf;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      std::snprintf(buf, sizeof(buf), "%-16s FAILED: %s\n",
                    eval::method_name(o.method).c_str(), o.error.c_str());
      out += buf;
      continue;
    }
    const auto& r = o.report;
    std::snprintf(buf, sizeof(buf), "%-16s %10.4f %10.4f %10.4f %8zu %12.4f %12.4f\n",
                  r.method.c_str(), r.mean_mm, r.std_mm, r.max_mm, r.count,
                  r.small_deflection.mean_mm, r.large_deflection.mean_mm);
    out += buf;
  }
  return out;
}

struct CommonOutputs {
  fs::path dir;
  io::RunManifest manifest;
};

int cmd_simulate(const std::string& scenario_path, const std::string& geometry_path,
                 const std::string& out_dir, bool seed_set, std::uint64_t seed_override,
                 bool nearest, bool serial, const std::vector<std::string>& args) {
  auto scenario = io::load_scenario(resolve_config(scenario_path));
  if (seed_set) scenario.seed = seed_override;
  const auto geom = io::load_geometry(resolve_config(geometry_path));

  const auto result =
      sim::simulate(scenario, geom, serial ? Exec::serial : Exec::parallel);
  const auto dataset = sim::make_dataset(
      result, nearest ? frames::InterpMode::nearest : frames::InterpMode::linear);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  io::write_wavelength_csv(join(dir, "wavelengths.csv"), result.wavelengths);
  io::write_tracker_csv(join(dir, "tracker.csv"), result.tracker);
  std::vector<frames::TrackedPoint> truth = result.truth;
  io::write_tracker_csv(join(dir, "ground_truth.csv"), truth);
  io::write_aligned_csv(join(dir, "aligned_pairs.csv"), dataset.pairs);
  io::save_geometry(geom, join(dir, "geometry_true.cfg"));
  io::save_geometry(result.estimator_geometry, join(dir, "geometry_estimator.cfg"));
  io::save_transform(result.T_os0, join(dir, "T_os0.cfg"));
  io::save_transform(result.T_or0, join(dir, "T_or0.cfg"));
  io::save_transform(result.T_or_c, join(dir, "T_or_c.cfg"));

  auto manifest = start_manifest("simulate", args);
  add_input(manifest, resolve_config(scenario_path));
  add_input(manifest, resolve_config(geometry_path));
  manifest.geometry_fingerprint_hex = fingerprint_hex(geom);
  manifest.seeds = {scenario.seed};
  manifest.outputs = {"wavelengths.csv", "tracker.csv",  "ground_truth.csv",
                      "aligned_pairs.csv", "geometry_true.cfg", "geometry_estimator.cfg",
                      "T_os0.cfg", "T_or0.cfg", "T_or_c.cfg"};
  io::write_manifest(manifest, join(dir, "run_manifest.json"));
  std::cout << "simulate: " << result.wavelengths.size() << " wavelength frames, "
            << result.tracker.size() << " tracker samples, " << dataset.pairs.size()
            << " aligned pairs (" << dataset.dropped << " dropped)\n";
  return 0;
}

int cmd_reconstruct(const std::string& geometry_path, const std::string& wavelengths_path,
                    const std::string& out_dir, int segments, bool serial,
                    const std::vector<std::string>& args) {
  const auto geom = io::load_geometry(resolve_config(geometry_path));
  const auto frames_in = io::read_wavelength_csv(wavelengths_path);

  recon::EstimatorOptions opts;
  opts.n_segments = segments;
  std::vector<recon::ReconstructedShape> shapes;
  shapes.reserve(frames_in.size());
  std::vector<frames::TrackedPoint> tips;
  tips.reserve(frames_in.size());
  for (const auto& f : frames_in) {
    shapes.push_back(recon::reconstruct_centerline(f, geom, opts));
    tips.push_back({f.timestamp_s, shapes.back().points_mm.back()});
  }
  (void)serial;

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  io::write_shapes_csv(join(dir, "shapes.csv"), shapes);
  io::write_tracker_csv(join(dir, "tips.csv"), tips);

  auto manifest = start_manifest("reconstruct", args);
  add_input(manifest, resolve_config(geometry_path));
  add_input(manifest, wavelengths_path);
  manifest.geometry_fingerprint_hex = fingerprint_hex(geom);
  manifest.outputs = {"shapes.csv", "tips.csv"};
  io::write_manifest(manifest, join(dir, "run_manifest.json"));
  std::cout << "reconstruct: " << frames_in.size() << " frames at " << segments
            << " segments\n";
  return 0;
}

int cmd_train(const std::string& geometry_path, const std::string& pairs_path,
              const std::string& out_path, const std::string& fibers, bool bias,
              bool delta, const std::vector<std::string>& args) {
  const auto geom = io::load_geometry(resolve_config(geometry_path));
  const auto pairs = io::read_aligned_csv(pairs_path);
  const auto model =
      reg::ablate(pairs, geom, fibers, bias, io::geometry_fingerprint(geom), delta);
  io::save_model(model, out_path);

  auto manifest = start_manifest("train", args);
  add_input(manifest, resolve_config(geometry_path));
  add_input(manifest, pairs_path);
  manifest.geometry_fingerprint_hex = fingerprint_hex(geom);
  manifest.outputs = {fs::path(out_path).filename().string()};
  io::write_manifest(manifest, (fs::path(out_path).parent_path() /
                                (fs::path(out_path).stem().string() + "_manifest.json"))
                                   .string());
  std::cout << "train: " << pairs.size() << " pairs, fibers " << fibers
            << ", training residual " << model.training_residual_mm << " mm"
            << (model.condition_warning ? " (condition warning)" : "") << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& geometry_path,
                const std::string& wavelengths_path, const std::string& out_path,
                const std::vector<std::string>& args) {
  const auto model = io::load_model(model_path);
  const auto geom = io::load_geometry(resolve_config(geometry_path));
  if (model.geometry_fingerprint != io::geometry_fingerprint(geom))
    throw std::invalid_argument(
        "geometry fingerprint mismatch: the model was trained on a different sensor "
        "configuration than " + geometry_path);
  const auto frames_in = io::read_wavelength_csv(wavelengths_path);
  std::vector<frames::TrackedPoint> tips;
  tips.reserve(frames_in.size());
  for (const auto& f : frames_in) tips.push_back({f.timestamp_s, reg::predict(model, f)});
  io::write_tracker_csv(out_path, tips);

  auto manifest = start_manifest("predict", args);
  add_input(manifest, model_path);
  add_input(manifest, resolve_config(geometry_path));
  add_input(manifest, wavelengths_path);
  manifest.geometry_fingerprint_hex = fingerprint_hex(geom);
  manifest.outputs = {fs::path(out_path).filename().string()};
  io::write_manifest(manifest, (fs::path(out_path).parent_path() /
                                (fs::path(out_path).stem().string() + "_manifest.json"))
                                   .string());
  std::cout << "predict: " << tips.size() << " tips written\n";
  return 0;
}

int cmd_evaluate(const std::string& geometry_path, const std::string& pairs_path,
                 const std::string& truth_path, const std::string& method_name,
                 const std::string& fibers, int repeats, double train_fraction,
                 std::uint64_t seed, int segments, bool bias, const std::string& out_dir,
                 bool serial, const std::vector<std::string>& args) {
  const auto geom = io::load_geometry(resolve_config(geometry_path));
  const auto pairs = io::read_aligned_csv(pairs_path);
  const auto truth_pts = io::read_tracker_csv(truth_path);
  std::vector<Eigen::Vector3d> truth;
  truth.reserve(truth_pts.size());
  for (const auto& p : truth_pts) truth.push_back(p.position_mm);

  eval::Method method;
  if (method_name == "conventional") {
    method = eval::Method::conventional;
  } else if (method_name == "regression") {
    if (fibers == "a") method = eval::Method::regression_1f;
    else if (fibers == "ab") method = eval::Method::regression_2f;
    else if (fibers == "abc") method = eval::Method::regression_3f;
    else throw std::invalid_argument("--fibers must be one of a, ab, abc");
  } else {
    throw std::invalid_argument("--method must be conventional or regression");
  }

  eval::Protocol protocol;
  protocol.train_fraction = train_fraction;
  protocol.repeats = repeats;
  protocol.seed = seed;
  protocol.n_segments = segments;
  protocol.bias = bias;
  const auto result = eval::repeated_eval(pairs, truth, geom, method, protocol,
                                          serial ? Exec::serial : Exec::parallel);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  std::string csv = "repeat,mean_mm,std_mm,max_mm,count\n";
  for (std::size_t r = 0; r < result.reports.size(); ++r) {
    const auto& rep = result.reports[r];
    csv += std::to_string(r) + ',' + io::format_double(rep.mean_mm) + ',' +
           io::format_double(rep.std_mm) + ',' + io::format_double(rep.max_mm) + ',' +
           std::to_string(rep.count) + '\n';
  }
  io::write_file_atomic(join(dir, "evaluation.csv"), csv);

  char line[160];
  std::snprintf(line, sizeof(line),
                "%s: %d repeats, mean of means %.4f mm, std of means %.4f mm\n",
                eval::method_name(method).c_str(), repeats, result.mean_of_means_mm,
                result.std_of_means_mm);
  io::write_file_atomic(join(dir, "evaluation.txt"), line);
  std::cout << line;

  auto manifest = start_manifest("evaluate", args);
  add_input(manifest, resolve_config(geometry_path));
  add_input(manifest, pairs_path);
  add_input(manifest, truth_path);
  manifest.geometry_fingerprint_hex = fingerprint_hex(geom);
  manifest.seeds = {seed};
  manifest.outputs = {"evaluation.csv", "evaluation.txt"};
  io::write_manifest(manifest, join(dir, "run_manifest.json"));
  return 0;
}

int cmd_compare(const std::string& geometry_path, const std::string& pairs_path,
                const std::string& truth_path, double train_fraction, std::uint64_t seed,
                int segments, bool bias, bool vs_tracker, const std::string& out_dir,
                bool serial, const std::vector<std::string>& args) {
  const auto geom = io::load_geometry(resolve_config(geometry_path));
  const auto pairs = io::read_aligned_csv(pairs_path);
  const auto truth_pts = io::read_tracker_csv(truth_path);
  std::vector<Eigen::Vector3d> truth;
  truth.reserve(truth_pts.size());
  for (const auto& p : truth_pts) truth.push_back(p.position_mm);

  eval::Protocol protocol;
  protocol.train_fraction = train_fraction;
  protocol.seed = seed;
  protocol.n_segments = segments;
  protocol.bias = bias;
  protocol.eval_vs_tracker = vs_tracker;
  const std::vector<eval::Method> methods{
      eval::Method::conventional, eval::Method::regression_1f,
      eval::Method::regression_2f, eval::Method::regression_3f};
  const auto outcomes = eval::compare(pairs, truth, geom, methods, protocol,
                                      serial ? Exec::serial : Exec::parallel);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::string csv =
      "method,mean_mm,std_mm,max_mm,count,small_mean_mm,small_count,large_mean_mm,"
      "large_count\n";
  nlohmann::ordered_json json_methods = nlohmann::ordered_json::array();
  std::string samples = "method,sample_index,timestamp,deflection_mm,error_mm\n";
  const auto split = eval::split_indices(pairs.size(), train_fraction, seed);
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    report_rows(csv, json_methods, o.report);
    for (std::size_t t = 0; t < o.report.errors_mm.size(); ++t) {
      samples += o.report.method + ',' + std::to_string(split.test[t]) + ',' +
                 io::format_double(pairs[split.test[t]].timestamp_s) + ',' +
                 io::format_double(o.report.deflections_mm[t]) + ',' +
                 io::format_double(o.report.errors_mm[t]) + '\n';
    }
  }
  const std::string table = format_table(outcomes);
  io::write_file_atomic(join(dir, "comparison.txt"), table);
  io::write_file_atomic(join(dir, "comparison.csv"), csv);
  nlohmann::ordered_json root;
  root["train_fraction"] = train_fraction;
  root["seed"] = seed;
  root["n_segments"] = segments;
  root["bias"] = bias;
  root["eval_vs_tracker"] = vs_tracker;
  root["methods"] = json_methods;
  io::write_file_atomic(join(dir, "comparison.json"), root.dump(2) + "\n");
  io::write_file_atomic(join(dir, "per_sample_errors.csv"), samples);
  std::cout << table;

  auto manifest = start_manifest("compare", args);
  add_input(manifest, resolve_config(geometry_path));
  add_input(manifest, pairs_path);
  add_input(manifest, truth_path);
  manifest.geometry_fingerprint_hex = fingerprint_hex(geom);
  manifest.seeds = {seed};
  manifest.outputs = {"comparison.txt", "comparison.csv", "comparison.json",
                      "per_sample_errors.csv"};
  io::write_manifest(manifest, join(dir, "run_manifest.json"));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"FBG tip-position estimation toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  bool serial = false;
  app.add_flag("--serial", serial, "run batch kernels on the serial reference path");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic streams");
  std::string scenario_path, geometry_path, out_dir = "out";
  std::uint64_t seed_override = 0;
  sim_cmd->add_option("--scenario", scenario_path, "scenario config")->required();
  sim_cmd->add_option("--geometry", geometry_path, "true sensor geometry config")->required();
  sim_cmd->add_option("--out-dir", out_dir, "output directory");
  auto* seed_opt = sim_cmd->add_option("--seed", seed_override, "override the scenario seed");
  bool sim_nearest = false;
  sim_cmd->add_flag("--nearest", sim_nearest,
                    "nearest-neighbor alignment instead of linear interpolation");

  // reconstruct
  auto* rec_cmd = app.add_subcommand("reconstruct", "conventional shape reconstruction");
  std::string rec_geometry, rec_wavelengths, rec_out = "out";
  int rec_segments = 1000;
  rec_cmd->add_option("--geometry", rec_geometry, "sensor geometry config")->required();
  rec_cmd->add_option("--wavelengths", rec_wavelengths, "wavelength CSV")->required();
  rec_cmd->add_option("--segments", rec_segments, "integration segments")
      ->check(CLI::PositiveNumber);
  rec_cmd->add_option("--out-dir", rec_out, "output directory");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the regression model");
  std::string tr_geometry, tr_pairs, tr_out = "model.cfg", tr_fibers = "abc";
  bool tr_bias = true;
  train_cmd->add_option("--geometry", tr_geometry, "sensor geometry config")->required();
  train_cmd->add_option("--pairs", tr_pairs, "aligned pairs CSV")->required();
  train_cmd->add_option("--out", tr_out, "model output file");
  train_cmd->add_option("--fibers", tr_fibers, "fiber subset: a, ab or abc")
      ->check(CLI::IsMember({"a", "b", "c", "ab", "ac", "bc", "abc"}));
  train_cmd->add_flag("--bias,!--no-bias", tr_bias, "append a bias column (default on)");
  bool tr_delta = false;
  train_cmd->add_flag("--delta", tr_delta,
                      "subtract the straight-pose wavelengths from the inputs (extension)");

  // predict
  auto* pred_cmd = app.add_subcommand("predict", "predict tips with a trained model");
  std::string pd_model, pd_geometry, pd_wavelengths, pd_out = "tips.csv";
  pred_cmd->add_option("--model", pd_model, "model file")->required();
  pred_cmd->add_option("--geometry", pd_geometry, "sensor geometry config")->required();
  pred_cmd->add_option("--wavelengths", pd_wavelengths, "wavelength CSV")->required();
  pred_cmd->add_option("--out", pd_out, "tip CSV output");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "repeated split evaluation of one method");
  std::string ev_geometry, ev_pairs, ev_truth, ev_method = "regression", ev_fibers = "abc";
  std::string ev_out = "out";
  int ev_repeats = 10, ev_segments = 1000;
  double ev_fraction = 0.7;
  std::uint64_t ev_seed = 0;
  bool ev_bias = true;
  eval_cmd->add_option("--geometry", ev_geometry, "estimator geometry config")->required();
  eval_cmd->add_option("--pairs", ev_pairs, "aligned pairs CSV")->required();
  eval_cmd->add_option("--truth", ev_truth, "exact tip CSV (timestamp,x,y,z)")->required();
  eval_cmd->add_option("--method", ev_method, "conventional or regression");
  eval_cmd->add_option("--fibers", ev_fibers, "fiber subset for regression")
      ->check(CLI::IsMember({"a", "ab", "abc"}));
  eval_cmd->add_option("--repeats", ev_repeats, "number of random splits")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--train-fraction", ev_fraction, "training fraction");
  eval_cmd->add_option("--seed", ev_seed, "base split seed");
  eval_cmd->add_option("--segments", ev_segments, "integration segments")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--bias,!--no-bias", ev_bias, "append a bias column (default on)");
  eval_cmd->add_option("--out-dir", ev_out, "output directory");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "side-by-side method comparison");
  std::string cp_geometry, cp_pairs, cp_truth, cp_out = "out";
  int cp_segments = 1000;
  double cp_fraction = 0.7;
  std::uint64_t cp_seed = 0;
  bool cp_bias = true, cp_vs_tracker = false;
  cmp_cmd->add_option("--geometry", cp_geometry, "estimator geometry config")->required();
  cmp_cmd->add_option("--pairs", cp_pairs, "aligned pairs CSV")->required();
  cmp_cmd->add_option("--truth", cp_truth, "exact tip CSV (timestamp,x,y,z)")->required();
  cmp_cmd->add_option("--train-fraction", cp_fraction, "training fraction");
  cmp_cmd->add_option("--seed", cp_seed, "split seed");
  cmp_cmd->add_option("--segments", cp_segments, "integration segments")
      ->check(CLI::PositiveNumber);
  cmp_cmd->add_flag("--bias,!--no-bias", cp_bias, "append a bias column (default on)");
  cmp_cmd->add_flag("--vs-tracker", cp_vs_tracker,
                    "score against the noisy tracker tips instead of the exact truth");
  cmp_cmd->add_option("--out-dir", cp_out, "output directory");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("fbgtpe");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed())
      return cmd_simulate(scenario_path, geometry_path, out_dir, seed_opt->count() > 0,
                          seed_override, sim_nearest, serial, args);
    if (rec_cmd->parsed())
      return cmd_reconstruct(rec_geometry, rec_wavelengths, rec_out, rec_segments, serial,
                             args);
    if (train_cmd->parsed())
      return cmd_train(tr_geometry, tr_pairs, tr_out, tr_fibers, tr_bias, tr_delta, args);
    if (pred_cmd->parsed())
      return cmd_predict(pd_model, pd_geometry, pd_wavelengths, pd_out, args);
    if (eval_cmd->parsed())
      return cmd_evaluate(ev_geometry, ev_pairs, ev_truth, ev_method, ev_fibers, ev_repeats,
                          ev_fraction, ev_seed, ev_segments, ev_bias, ev_out, serial, args);
    if (cmp_cmd->parsed())
      return cmd_compare(cp_geometry, cp_pairs, cp_truth, cp_fraction, cp_seed, cp_segments,
                         cp_bias, cp_vs_tracker, cp_out, serial, args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  std::cerr << app.help();
  return 1;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace fbgtpe::cli
