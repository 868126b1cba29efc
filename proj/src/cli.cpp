// Copyright 2026 The mimu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mimu/cli.hpp"

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mimu/calibration.hpp"
#include "mimu/config.hpp"
#include "mimu/error.hpp"
#include "mimu/harness.hpp"
#include "mimu/imu_csv.hpp"
#include "mimu/preintegration.hpp"
#include "mimu/simulation.hpp"

namespace mimu {

namespace {

namespace fs = std::filesystem;

enum class LogLevel { kQuiet, kInfo, kDebug };

LogLevel log_level() {
  const char* env = std::getenv("MIMU_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "quiet" || v == "0" || v == "error") return LogLevel::kQuiet;
  if (v == "debug" || v == "2") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err), level_(log_level()) {}
  void info(const std::string& msg) const {
    if (level_ >= LogLevel::kInfo) err_ << "[mimu] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ >= LogLevel::kDebug) err_ << "[mimu:debug] " << msg << '\n';
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> freq;
  std::optional<double> duration;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Common& c, bool with_sim_flags) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "Config override key=value (dotted keys)");
  if (with_sim_flags) {
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--freq", c.freq, "Sample rate [Hz]");
    app->add_option("--duration", c.duration, "Sequence duration [s]");
  }
}

json load_config(const Common& c) {
  json doc = c.config.empty() ? json::object() : load_json_file(c.config);
  for (const std::string& o : c.overrides) apply_override(doc, o);
  return doc;
}

/// Accepts either one NoiseSpec or {"a": ..., "b": ...}.
std::pair<NoiseSpec, NoiseSpec> load_noise_pair(const std::string& path) {
  if (path.empty()) return {NoiseSpec{}, NoiseSpec{}};
  const json doc = load_json_file(path);
  if (doc.contains("a") || doc.contains("b")) {
    return {decode<NoiseSpec>(doc.value("a", json::object()), "noise.a"),
            decode<NoiseSpec>(doc.value("b", json::object()), "noise.b")};
  }
  const NoiseSpec n = decode<NoiseSpec>(doc, "noise");
  return {n, n};
}

std::string deltas_line(std::size_t index, std::int64_t t0_ns,
                        const PreintDelta& d) {
  json sigma = json::array();
  for (int i = 0; i < 9; ++i) sigma.push_back(d.Sigma(i, i));
  const json line = {{"index", index},
                     {"t0_ns", t0_ns},
                     {"dt", d.dt},
                     {"count", d.count},
                     {"dR", mat_to_json(d.dR)},
                     {"dv", vec_to_json(d.dv)},
                     {"dp", vec_to_json(d.dp)},
                     {"sigma_diag", sigma}};
  return line.dump();
}

int cmd_simulate(const Common& c, const std::string& out_dir, const Logger& log) {
  json doc = load_config(c);
  SimConfig cfg = decode<SimConfig>(doc, "simulation config");
  if (c.seed) cfg.seed = *c.seed;
  if (c.freq) cfg.freq = *c.freq;
  if (c.duration) cfg.duration = *c.duration;
  cfg.validate();
  const std::vector<ImuSeries> series = simulate_array(cfg);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const fs::path p = fs::path(out_dir) / (cfg.imus[i].name + ".csv");
    write_imu_csv(p, series[i]);
    log.debug("wrote " + p.string());
  }
  write_file_atomic(fs::path(out_dir) / "sim.json", json(cfg).dump(2) + "\n");
  log.info("simulated " + std::to_string(series.size()) + " IMUs, " +
           std::to_string(cfg.sample_count()) + " samples each");
  return 0;
}

int cmd_calibrate(const Common& c, const std::string& imu_a,
                  const std::string& imu_b, const std::string& noise,
                  std::optional<double> window, const std::string& out,
                  const Logger& log) {
  const CalibrationOptions opt = decode<CalibrationOptions>(load_config(c), "options");
  std::vector<ImuSeries> s = ingest_csv({imu_a, imu_b}, c.freq);
  if (window) {
    if (!(*window > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "--window-secs must be > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround(*window * s[0].freq));
    if (n < s[0].size()) {
      s[0] = s[0].slice(0, n);
      s[1] = s[1].slice(0, n);
    }
  }
  const auto [na, nb] = load_noise_pair(noise);
  const CalibrationResult r = calibrate({s[0], s[1], na, nb}, opt);
  write_file_atomic(out, json(r).dump(2) + "\n");
  log.info("calibrated " + std::to_string(s[0].size()) + " samples in " +
           std::to_string(r.elapsed_rot_ms + r.elapsed_trans_ms) + " ms");
  return 0;
}

int cmd_fuse(const Common& c, const std::vector<std::string>& imus,
             const std::string& calib, const std::string& noise,
             const std::string& out, const Logger& log) {
  VimuConfig cfg;
  if (!calib.empty()) {
    if (imus.size() != 2) {
      throw Error(ErrorKind::kInvalidArgument, "--calib needs exactly two --imu files");
    }
    const auto [na, nb] = load_noise_pair(noise);
    const Extrinsic ext = decode<CalibrationResult>(load_json_file(calib), "calib").extrinsic;
    cfg = midpoint_frame(ext, na, nb);
  } else {
    cfg = decode<VimuConfig>(load_config(c), "vimu config");
  }
  if (cfg.size() != imus.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                std::to_string(imus.size()) + " IMU files for a " +
                    std::to_string(cfg.size()) + "-member config");
  }
  std::vector<fs::path> paths(imus.begin(), imus.end());
  const std::vector<ImuSeries> series = ingest_csv(paths, c.freq);
  const FusionMatrices fm = build_fusion(cfg);
  const VirtualSeries vs = fuse_series(cfg, fm, series);
  const json sidecar = {{"config", cfg},
                        {"noise", virtual_covariances(cfg, fm)},
                        {"freq", vs.freq}};
  write_imu_csv(out, vs.to_imu_series());
  write_file_atomic(out + ".json", sidecar.dump(2) + "\n");
  log.info("fused " + std::to_string(cfg.size()) + " IMUs into " +
           std::to_string(vs.size()) + " virtual samples");
  return 0;
}

int cmd_preintegrate(const Common& c, const std::string& vimu,
                     const std::string& sidecar, double interval,
                     const std::string& out, const Logger& log) {
  json doc = load_json_file(sidecar);
  for (const std::string& o : c.overrides) apply_override(doc, o);
  const VimuConfig cfg =
      decode<VimuConfig>(doc.contains("config") ? doc.at("config") : doc, "vimu config");
  const PreintModel model = PreintModel::from_config(cfg);
  const ImuSeries s = read_imu_csv(vimu);
  VirtualSeries vs;
  vs.freq = s.freq;
  vs.start_ns = s.start_ns;
  for (std::size_t k = 0; k < s.size(); ++k) {
    VirtualSample v;
    v.omega = s.gyro[k];
    v.accel = s.accel[k];
    vs.samples.push_back(v);
  }
  const std::vector<PreintDelta> deltas =
      preintegrate_windows(vs, VimuState{}, interval, model);
  std::ostringstream lines;
  std::size_t consumed = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    lines << deltas_line(i, s.time_ns(consumed), deltas[i]) << '\n';
    consumed += deltas[i].count;
  }
  write_file_atomic(out, lines.str());
  log.info("wrote " + std::to_string(deltas.size()) + " keyframe deltas");
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& variants, bool full_scale,
                 const std::string& out_dir, const Logger& log) {
  json doc = full_scale ? json(ExperimentPlan::full_scale()) : json::object();
  if (!c.config.empty()) doc.merge_patch(load_json_file(c.config));
  for (const std::string& o : c.overrides) apply_override(doc, o);
  ExperimentPlan plan = decode<ExperimentPlan>(doc, "plan");
  if (c.seed) plan.seed = *c.seed;
  if (c.freq) plan.sim.freq = *c.freq;
  if (c.duration) plan.sim.duration = *c.duration;
  if (!variants.empty()) {
    plan.variants.clear();
    std::stringstream ss(variants);
    for (std::string v; std::getline(ss, v, ',');) plan.variants.push_back(parse_variant(v));
  }
  plan.stream_dir = out_dir;
  log.info("running " + std::to_string(plan.samples) + " x " +
           std::to_string(plan.sequences) + " trials");
  const RmseReport report = run_experiment(plan);
  emit_report(report, out_dir);
  for (const VariantReport& v : report.variants) {
    log.info(std::string(variant_name(v.variant)) + ": position " +
             std::to_string(v.position.mean) + " m, rotation " +
             std::to_string(v.rotation.mean) + " rad, velocity " +
             std::to_string(v.velocity.mean) + " m/s");
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-IMU calibration, virtual IMU fusion and preintegration"};
  app.name("mimu");
  app.require_subcommand(1);

  Common common;
  std::string out_path;
  std::string imu_a, imu_b, noise, calib, vimu, variants;
  std::vector<std::string> imus;
  std::optional<double> window;
  double interval = 0.5;
  bool full_scale = false;

  auto* sim = app.add_subcommand("simulate", "Simulate the IMU array to CSV files");
  add_common(sim, common, true);
  sim->add_option("--out", out_path, "Output directory")->required();

  auto* cal = app.add_subcommand("calibrate", "Calibrate B relative to A");
  add_common(cal, common, false);
  cal->add_option("--imu-a", imu_a, "IMU A CSV")->required()->check(CLI::ExistingFile);
  cal->add_option("--imu-b", imu_b, "IMU B CSV")->required()->check(CLI::ExistingFile);
  cal->add_option("--noise", noise, "NoiseSpec JSON")->check(CLI::ExistingFile);
  cal->add_option("--window-secs", window, "Use only the first seconds of data");
  cal->add_option("--freq", common.freq, "Expected sample rate [Hz]");
  cal->add_option("--out", out_path, "Output JSON")->required();

  auto* fuse = app.add_subcommand("fuse", "Fuse IMUs into a virtual IMU");
  add_common(fuse, common, false);
  fuse->add_option("--imu", imus, "IMU CSV files in config order")
      ->required()
      ->check(CLI::ExistingFile);
  fuse->add_option("--calib", calib, "Calibration JSON (two IMUs, midpoint frame)")
      ->check(CLI::ExistingFile);
  fuse->add_option("--noise", noise, "NoiseSpec JSON")->check(CLI::ExistingFile);
  fuse->add_option("--freq", common.freq, "Expected sample rate [Hz]");
  fuse->add_option("--out", out_path, "Output virtual IMU CSV")->required();

  auto* pre = app.add_subcommand("preintegrate", "Preintegrate a virtual IMU CSV");
  pre->add_option("--vimu", vimu, "Virtual IMU CSV")->required()->check(CLI::ExistingFile);
  pre->add_option("--config", common.config, "Sidecar JSON written by fuse")
      ->required()
      ->check(CLI::ExistingFile);
  pre->add_option("--set", common.overrides, "Config override key=value");
  pre->add_option("--interval", interval, "Keyframe interval [s]");
  pre->add_option("--out", out_path, "Output JSON lines")->required();

  auto* eval = app.add_subcommand("evaluate", "Run the Monte-Carlo variant comparison");
  add_common(eval, common, true);
  eval->add_option("--variants", variants, "Comma-separated variant names");
  eval->add_flag("--full-scale", full_scale, "100 samples x 5000 sequences");
  eval->add_option("--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const Logger log(err);
  try {
    if (*sim) return cmd_simulate(common, out_path, log);
    if (*cal) return cmd_calibrate(common, imu_a, imu_b, noise, window, out_path, log);
    if (*fuse) return cmd_fuse(common, imus, calib, noise, out_path, log);
    if (*pre) return cmd_preintegrate(common, vimu, common.config, interval, out_path, log);
    if (*eval) return cmd_evaluate(common, variants, full_scale, out_path, log);
  } catch (const Error& e) {
    const json payload = {{"error", error_kind_name(e.kind())}, {"message", e.what()}};
    err << payload.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    const json payload = {{"error", "InternalError"}, {"message", e.what()}};
    err << payload.dump() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mimu
