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


#pragma once

/**
 * @file harness.hpp
 * @brief Monte-Carlo comparison of virtual-IMU variants on the simulated
 * nine-IMU grid.
 *
 * For every extrinsic-error sample each IMU's mount is perturbed once; every
 * sequence of that sample then simulates fresh noise (and, optionally, fresh
 * trajectory phases), builds each variant's virtual IMU, preintegrates it
 * between keyframes and dead-reckons from the true initial state.  The RMSE
 * over keyframes is averaged over the sequences of a sample; the report gives
 * mean and standard deviation across samples.
 */

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mimu/preintegration.hpp"
#include "mimu/simulation.hpp"

namespace mimu {

enum class Variant {
  kOneTrue,         // IMU 0 alone, exact frame
  kTwoPerturbed,    // grid corners 0 and 8
  kFourPerturbed,   // corners 0, 2, 6, 8
  kNinePerturbed,   // whole grid
  kTwoCalibrated,   // 0 and 8, extrinsic calibrated from the sequence itself
};

const char* variant_name(Variant v);
/// Throws InvalidArgument on an unknown name.
Variant parse_variant(const std::string& name);
std::vector<Variant> all_variants();

struct ExperimentPlan {
  std::vector<Variant> variants = all_variants();
  int samples = 20;
  int sequences = 100;
  double sigma_rot = 0.01;     // rad
  double sigma_trans = 0.001;  // m
  double keyframe_interval = 0.5;  // s
  bool randomize_phases = true;
  std::uint64_t seed = 1;
  SimConfig sim = default_sim();
  /// When set, per-trial rows are appended to trials.csv as they finish.
  std::filesystem::path stream_dir;

  static SimConfig default_sim();
  /// 100 samples x 5000 sequences.
  static ExperimentPlan full_scale();
  void validate() const;
};

struct Rmse {
  double position = 0.0;  // m
  double rotation = 0.0;  // rad
  double velocity = 0.0;  // m/s
};

/// Throws LengthMismatch unless both lists have the same length.
Rmse rmse_metrics(const std::vector<VimuState>& predicted,
                  const std::vector<TrajectorySample>& truth);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

/// Order-independent: values are summed in sorted order.
MeanStd mean_std(std::vector<double> values);

struct VariantReport {
  Variant variant = Variant::kOneTrue;
  std::vector<Rmse> sample_means;  // one per extrinsic-error sample
  MeanStd position;
  MeanStd rotation;
  MeanStd velocity;
  int trials_ok = 0;
  int trials_failed = 0;
};

struct TrialFailure {
  int sample = 0;
  int sequence = 0;
  Variant variant = Variant::kOneTrue;
  std::string kind;
  std::string message;
};

struct RmseReport {
  ExperimentPlan plan;
  std::vector<VariantReport> variants;
  std::vector<TrialFailure> failures;

  /// Throws InvalidArgument if the variant was not run.
  const VariantReport& at(Variant v) const;
};

/// Evaluates every variant on one simulated sequence.  Exposed for tests.
std::vector<Rmse> run_trial(const ExperimentPlan& plan, int sample, int sequence,
                            std::vector<TrialFailure>* failures = nullptr);

RmseReport run_experiment(const ExperimentPlan& plan);

/**
 * Paired bootstrap over samples: fraction of resamples in which the mean of
 * `lower` is <= the mean of `higher`.
 */
double ordering_confidence(const std::vector<double>& lower,
                           const std::vector<double>& higher,
                           int resamples = 10000, std::uint64_t seed = 7);

/// Writes report.json, plot_data.csv and failures.log into `dir`.
void emit_report(const RmseReport& report, const std::filesystem::path& dir);

}  // namespace mimu
