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


#include "mimu/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "mimu/calibration.hpp"
#include "mimu/config.hpp"
#include "mimu/error.hpp"
#include "mimu/imu_csv.hpp"
#include "mimu/rng.hpp"

namespace mimu {

namespace {

// Seed streams, kept apart by the first counter after the sample index.
constexpr std::uint64_t kPerturbStream = 1;
constexpr std::uint64_t kPhaseStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

constexpr std::size_t kCornerA = 0;
constexpr std::size_t kCornerB = 8;

std::vector<std::size_t> variant_members(Variant v) {
  switch (v) {
    case Variant::kOneTrue:
      return {kCornerA};
    case Variant::kTwoPerturbed:
    case Variant::kTwoCalibrated:
      return {kCornerA, kCornerB};
    case Variant::kFourPerturbed:
      return {0, 2, 6, 8};
    case Variant::kNinePerturbed:
      return {0, 1, 2, 3, 4, 5, 6, 7, 8};
  }
  return {};
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

TrajectoryParams randomized_phases(TrajectoryParams t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (Sinusoid& s : t.position) s.phase = u(rng);
  for (Sinusoid& s : t.euler) s.phase = u(rng);
  return t;
}

std::vector<Extrinsic> perturbed_mounts(const ExperimentPlan& plan, int sample) {
  std::vector<Extrinsic> out;
  for (std::size_t i = 0; i < plan.sim.imus.size(); ++i) {
    out.push_back(perturb_extrinsics(
        plan.sim.imus[i].mount, plan.sigma_rot, plan.sigma_trans,
        derive_seed(plan.seed, {std::uint64_t(sample), kPerturbStream, i})));
  }
  return out;
}

struct VariantSetup {
  VimuConfig cfg;
  Extrinsic v_mount;  // true V relative to the body
};

VariantSetup setup_variant(Variant v, const SimConfig& sim,
                           const std::vector<Extrinsic>& perturbed,
                           const std::vector<ImuSeries>& data) {
  const std::vector<std::size_t> idx = variant_members(v);
  VariantSetup s;
  if (v == Variant::kOneTrue) {
    s.cfg.members.push_back({Mat3::Identity(), Vec3::Zero(), sim.imus[kCornerA].noise});
    s.v_mount = sim.imus[kCornerA].mount;
    return s;
  }
  if (v == Variant::kTwoCalibrated) {
    const ImuMount& a = sim.imus[kCornerA];
    const ImuMount& b = sim.imus[kCornerB];
    const CalibrationResult r =
        calibrate({data[kCornerA], data[kCornerB], a.noise, b.noise});
    s.cfg = midpoint_frame(r.extrinsic, a.noise, b.noise);
    s.v_mount = Extrinsic(a.mount.q_BA, 0.5 * (a.mount.p_AB + b.mount.p_AB));
    return s;
  }
  std::vector<Extrinsic> mounts;
  std::vector<NoiseSpec> noise;
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i : idx) {
    mounts.push_back(perturbed[i]);
    noise.push_back(sim.imus[i].noise);
    centroid += sim.imus[i].mount.p_AB;
  }
  centroid /= static_cast<double>(idx.size());
  s.cfg = frame_from_mounts(mounts, noise, centroid);
  s.v_mount = Extrinsic(Quat::Identity(), centroid);
  return s;
}

Rmse evaluate_variant(const ExperimentPlan& plan, const SimConfig& sim,
                      const VariantSetup& setup, const std::vector<ImuSeries>& data,
                      Variant v) {
  std::vector<ImuSeries> inputs;
  for (std::size_t i : variant_members(v)) inputs.push_back(data[i]);
  const PreintModel model = PreintModel::from_config(setup.cfg);
  const VirtualSeries vs = fuse_series(setup.cfg, model.fm, inputs);

  const double dt = 1.0 / sim.freq;
  auto truth_at = [&](double t) {
    return mounted_sample(sample_trajectory(sim.trajectory, t), setup.v_mount);
  };
  const TrajectorySample t0 = truth_at(dt);
  VimuState state;
  state.R_WV = t0.R_WB;
  state.p_W = t0.p_W;
  state.v_W = t0.v_W;

  const std::vector<PreintDelta> windows =
      preintegrate_windows(vs, state, plan.keyframe_interval, model);
  if (windows.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "sequence shorter than one keyframe interval");
  }
  std::vector<VimuState> predicted;
  std::vector<TrajectorySample> truth;
  std::size_t consumed = 0;
  for (const PreintDelta& d : windows) {
    state = predict_state(state, d, sim.gravity);
    consumed += d.count;
    predicted.push_back(state);
    truth.push_back(truth_at(dt * static_cast<double>(1 + consumed)));
  }
  return rmse_metrics(predicted, truth);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kOneTrue:
      return "1-IMU-true";
    case Variant::kTwoPerturbed:
      return "2-IMU-perturbed";
    case Variant::kFourPerturbed:
      return "4-IMU-perturbed";
    case Variant::kNinePerturbed:
      return "9-IMU-perturbed";
    case Variant::kTwoCalibrated:
      return "2-IMU-calibrated";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : all_variants()) {
    if (name == variant_name(v)) return v;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown variant '" + name + "'");
}

std::vector<Variant> all_variants() {
  return {Variant::kOneTrue, Variant::kTwoPerturbed, Variant::kFourPerturbed,
          Variant::kNinePerturbed, Variant::kTwoCalibrated};
}

SimConfig ExperimentPlan::default_sim() {
  SimConfig sim;
  sim.duration = 5.0;
  return sim;
}

ExperimentPlan ExperimentPlan::full_scale() {
  ExperimentPlan p;
  p.samples = 100;
  p.sequences = 5000;
  return p;
}

void ExperimentPlan::validate() const {
  if (variants.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "plan has no variants");
  }
  if (samples < 1 || sequences < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "plan needs at least one sample and one sequence");
  }
  if (!(sigma_rot >= 0.0) || !(sigma_trans >= 0.0) || !(keyframe_interval > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "plan sigmas or keyframe interval invalid");
  }
  sim.validate();
  if (sim.imus.size() < 9) {
    throw Error(ErrorKind::kInvalidArgument, "plan needs the nine-IMU grid");
  }
}

Rmse rmse_metrics(const std::vector<VimuState>& predicted,
                  const std::vector<TrajectorySample>& truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "rmse_metrics: " + std::to_string(predicted.size()) +
                    " predictions vs " + std::to_string(truth.size()) + " truths");
  }
  if (predicted.empty()) return {};
  double p = 0.0, r = 0.0, v = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    p += (predicted[k].p_W - truth[k].p_W).squaredNorm();
    v += (predicted[k].v_W - truth[k].v_W).squaredNorm();
    const double a = geodesic_distance(truth[k].R_WB, predicted[k].R_WV);
    r += a * a;
  }
  const double n = static_cast<double>(predicted.size());
  return {std::sqrt(p / n), std::sqrt(r / n), std::sqrt(v / n)};
}

MeanStd mean_std(std::vector<double> values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = sorted_sum(values) / n;
  if (values.size() > 1) {
    for (double& x : values) x = (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(sorted_sum(values) / (n - 1.0));
  }
  return out;
}

const VariantReport& RmseReport::at(Variant v) const {
  for (const VariantReport& r : variants) {
    if (r.variant == v) return r;
  }
  throw Error(ErrorKind::kInvalidArgument,
              std::string("variant not in report: ") + variant_name(v));
}

std::vector<Rmse> run_trial(const ExperimentPlan& plan, int sample, int sequence,
                            std::vector<TrialFailure>* failures) {
  const auto s = static_cast<std::uint64_t>(sample);
  const auto q = static_cast<std::uint64_t>(sequence);
  SimConfig sim = plan.sim;
  // Two extra samples cover the endpoints dropped by the fusion.
  sim.duration = plan.sim.duration + 2.0 / plan.sim.freq;
  if (plan.randomize_phases) {
    sim.trajectory = randomized_phases(plan.sim.trajectory,
                                       derive_seed(plan.seed, {s, kPhaseStream, q}));
  }

  std::vector<ImuSeries> data;
  for (std::size_t i = 0; i < sim.imus.size(); ++i) {
    data.push_back(simulate_imu(sim, sim.imus[i].mount, sim.imus[i].noise,
                                derive_seed(plan.seed, {s, kNoiseStream, q, i})));
  }
  const std::vector<Extrinsic> perturbed = perturbed_mounts(plan, sample);

  std::vector<Rmse> out(plan.variants.size(),
                        Rmse{std::nan(""), std::nan(""), std::nan("")});
  for (std::size_t vi = 0; vi < plan.variants.size(); ++vi) {
    const Variant v = plan.variants[vi];
    try {
      out[vi] = evaluate_variant(plan, sim, setup_variant(v, sim, perturbed, data),
                                 data, v);
    } catch (const Error& e) {
      if (failures) {
        failures->push_back({sample, sequence, v, std::string(error_kind_name(e.kind())), e.what()});
      }
    }
  }
  return out;
}

RmseReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  RmseReport report;
  report.plan = plan;
  const std::size_t nv = plan.variants.size();
  report.variants.resize(nv);
  for (std::size_t vi = 0; vi < nv; ++vi) report.variants[vi].variant = plan.variants[vi];

  std::ofstream stream;
  if (!plan.stream_dir.empty()) {
    std::filesystem::create_directories(plan.stream_dir);
    stream.open(plan.stream_dir / "trials.csv", std::ios::trunc);
    if (!stream) {
      throw Error(ErrorKind::kIoError,
                  "cannot open " + (plan.stream_dir / "trials.csv").string());
    }
    stream << "sample,sequence,variant,position_m,rotation_rad,velocity_mps\n";
  }

  for (int sample = 0; sample < plan.samples; ++sample) {
    std::vector<std::vector<double>> pos(nv), rot(nv), vel(nv);
    for (int seq = 0; seq < plan.sequences; ++seq) {
      const std::vector<Rmse> r = run_trial(plan, sample, seq, &report.failures);
      for (std::size_t vi = 0; vi < nv; ++vi) {
        if (stream) {
          stream << sample << ',' << seq << ',' << variant_name(plan.variants[vi])
                 << ',' << fmt(r[vi].position) << ',' << fmt(r[vi].rotation) << ','
                 << fmt(r[vi].velocity) << '\n';
        }
        if (!std::isfinite(r[vi].position)) {
          ++report.variants[vi].trials_failed;
          continue;
        }
        ++report.variants[vi].trials_ok;
        pos[vi].push_back(r[vi].position);
        rot[vi].push_back(r[vi].rotation);
        vel[vi].push_back(r[vi].velocity);
      }
    }
    if (stream) stream.flush();
    for (std::size_t vi = 0; vi < nv; ++vi) {
      if (pos[vi].empty()) continue;
      report.variants[vi].sample_means.push_back(
          {mean_std(pos[vi]).mean, mean_std(rot[vi]).mean, mean_std(vel[vi]).mean});
    }
  }

  for (VariantReport& vr : report.variants) {
    std::vector<double> p, r, v;
    for (const Rmse& m : vr.sample_means) {
      p.push_back(m.position);
      r.push_back(m.rotation);
      v.push_back(m.velocity);
    }
    vr.position = mean_std(p);
    vr.rotation = mean_std(r);
    vr.velocity = mean_std(v);
  }
  return report;
}

double ordering_confidence(const std::vector<double>& lower,
                           const std::vector<double>& higher, int resamples,
                           std::uint64_t seed) {
  if (lower.size() != higher.size() || lower.empty()) {
    throw Error(ErrorKind::kLengthMismatch,
                "ordering_confidence needs two non-empty paired lists");
  }
  if (resamples < 1) {
    throw Error(ErrorKind::kInvalidArgument, "resamples must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, lower.size() - 1);
  int hits = 0;
  for (int b = 0; b < resamples; ++b) {
    double diff = 0.0;
    for (std::size_t k = 0; k < lower.size(); ++k) {
      const std::size_t i = pick(rng);
      diff += higher[i] - lower[i];
    }
    if (diff >= 0.0) ++hits;
  }
  return static_cast<double>(hits) / resamples;
}

void emit_report(const RmseReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json variants = json::array();
  std::ostringstream csv;
  csv << "variant,metric,mean,std\n";
  for (const VariantReport& vr : report.variants) {
    json samples = json::array();
    for (const Rmse& m : vr.sample_means) samples.push_back(m);
    const char* name = variant_name(vr.variant);
    variants.push_back({{"variant", name},
                        {"position_m", {{"mean", vr.position.mean}, {"std", vr.position.std}}},
                        {"rotation_rad", {{"mean", vr.rotation.mean}, {"std", vr.rotation.std}}},
                        {"velocity_mps", {{"mean", vr.velocity.mean}, {"std", vr.velocity.std}}},
                        {"trials_ok", vr.trials_ok},
                        {"trials_failed", vr.trials_failed},
                        {"sample_means", samples}});
    const std::pair<const char*, MeanStd> rows[] = {
        {"position_m", vr.position}, {"rotation_rad", vr.rotation},
        {"velocity_mps", vr.velocity}};
    for (const auto& [metric, ms] : rows) {
      csv << name << ',' << metric << ',' << fmt(ms.mean) << ',' << fmt(ms.std) << '\n';
    }
  }
  const json doc = {{"plan", report.plan},
                    {"variants", variants},
                    {"failures", report.failures.size()}};
  write_file_atomic(dir / "report.json", doc.dump(2) + "\n");
  write_file_atomic(dir / "plot_data.csv", csv.str());

  std::ostringstream log;
  for (const TrialFailure& f : report.failures) {
    log << "sample=" << f.sample << " sequence=" << f.sequence
        << " variant=" << variant_name(f.variant) << " kind=" << f.kind << " "
        << f.message << '\n';
  }
  write_file_atomic(dir / "failures.log", log.str());
}

}  // namespace mimu
