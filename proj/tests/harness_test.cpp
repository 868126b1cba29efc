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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "mimu/config.hpp"
#include "mimu/error.hpp"
#include "mimu/imu_csv.hpp"

namespace mimu {
namespace {

ExperimentPlan tiny_plan() {
  ExperimentPlan p;
  p.samples = 2;
  p.sequences = 2;
  p.sim.duration = 1.0;
  return p;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mimu_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(RmseMetrics, IdenticalSequencesAreZero) {
  std::vector<VimuState> pred(3);
  std::vector<TrajectorySample> truth(3);
  for (int k = 0; k < 3; ++k) {
    truth[k].R_WB = exp_so3(Vec3(0.1 * k, 0, 0.2));
    truth[k].p_W = Vec3(k, 2, 3);
    truth[k].v_W = Vec3(0, k, 0);
    pred[k].R_WV = truth[k].R_WB;
    pred[k].p_W = truth[k].p_W;
    pred[k].v_W = truth[k].v_W;
  }
  const Rmse r = rmse_metrics(pred, truth);
  EXPECT_EQ(r.position, 0.0);
  EXPECT_EQ(r.rotation, 0.0);
  EXPECT_EQ(r.velocity, 0.0);
}

TEST(RmseMetrics, ConstantOffset) {
  std::vector<VimuState> pred(4);
  std::vector<TrajectorySample> truth(4);
  for (auto& p : pred) p.p_W = Vec3(0.01, 0, 0);
  const Rmse r = rmse_metrics(pred, truth);
  EXPECT_DOUBLE_EQ(r.position, 0.01);
  EXPECT_EQ(r.rotation, 0.0);
  EXPECT_EQ(r.velocity, 0.0);
}

TEST(RmseMetrics, MatchesDefinition) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  auto rv = [&] { return Vec3(n(rng), n(rng), n(rng)); };
  std::vector<VimuState> pred(20);
  std::vector<TrajectorySample> truth(20);
  double sp = 0, sr = 0, sv = 0;
  for (int k = 0; k < 20; ++k) {
    truth[k].R_WB = exp_so3(rv());
    truth[k].p_W = rv();
    truth[k].v_W = rv();
    const Vec3 dphi = 0.1 * rv();
    pred[k].R_WV = truth[k].R_WB * exp_so3(dphi);
    pred[k].p_W = truth[k].p_W + 0.1 * rv();
    pred[k].v_W = truth[k].v_W + 0.1 * rv();
    sp += (pred[k].p_W - truth[k].p_W).squaredNorm();
    sv += (pred[k].v_W - truth[k].v_W).squaredNorm();
    sr += dphi.squaredNorm();
  }
  const Rmse r = rmse_metrics(pred, truth);
  EXPECT_NEAR(r.position, std::sqrt(sp / 20), 1e-12);
  EXPECT_NEAR(r.velocity, std::sqrt(sv / 20), 1e-12);
  EXPECT_NEAR(r.rotation, std::sqrt(sr / 20), 1e-9);
}

TEST(RmseMetrics, LengthMismatch) {
  try {
    rmse_metrics(std::vector<VimuState>(2), std::vector<TrajectorySample>(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLengthMismatch);
  }
}

TEST(MeanStd, KnownValuesAndPermutationInvariance) {
  const MeanStd m = mean_std({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_NEAR(m.std, std::sqrt(32.0 / 7.0), 1e-12);

  std::vector<double> v;
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> d(0.0, 3.0);
  for (int i = 0; i < 500; ++i) v.push_back(d(rng));
  const MeanStd a = mean_std(v);
  std::shuffle(v.begin(), v.end(), rng);
  const MeanStd b = mean_std(v);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std, b.std);
}

TEST(Variants, NamesRoundTrip) {
  for (Variant v : all_variants()) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("3-IMU"), Error);
}

TEST(Plan, Validation) {
  ExperimentPlan p = tiny_plan();
  EXPECT_NO_THROW(p.validate());
  p.variants.clear();
  EXPECT_THROW(p.validate(), Error);
  p = tiny_plan();
  p.sequences = 0;
  EXPECT_THROW(p.validate(), Error);
  const ExperimentPlan full = ExperimentPlan::full_scale();
  EXPECT_EQ(full.samples, 100);
  EXPECT_EQ(full.sequences, 5000);
}

TEST(RunExperiment, SameSeedIsBitIdentical) {
  const RmseReport a = run_experiment(tiny_plan());
  const RmseReport b = run_experiment(tiny_plan());
  ASSERT_EQ(a.variants.size(), b.variants.size());
  for (std::size_t i = 0; i < a.variants.size(); ++i) {
    ASSERT_EQ(a.variants[i].sample_means.size(), 2u);
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_EQ(a.variants[i].sample_means[s].position,
                b.variants[i].sample_means[s].position);
      EXPECT_EQ(a.variants[i].sample_means[s].rotation,
                b.variants[i].sample_means[s].rotation);
    }
    EXPECT_EQ(a.variants[i].trials_ok, 4);
  }
  ExperimentPlan other = tiny_plan();
  other.seed = 2;
  EXPECT_NE(run_experiment(other).variants[1].position.mean,
            a.variants[1].position.mean);
}

TEST(RunExperiment, TrialsDoNotDependOnOrder) {
  const ExperimentPlan plan = tiny_plan();
  const std::vector<Rmse> late = run_trial(plan, 1, 1);
  run_trial(plan, 0, 0);
  const std::vector<Rmse> again = run_trial(plan, 1, 1);
  for (std::size_t i = 0; i < late.size(); ++i) {
    EXPECT_EQ(late[i].position, again[i].position);
  }
}

TEST(RunExperiment, FailuresAreCountedAndExcluded) {
  ExperimentPlan plan = tiny_plan();
  plan.sim.trajectory = TrajectoryParams::static_pose();
  plan.variants = {Variant::kOneTrue, Variant::kTwoCalibrated};
  const RmseReport r = run_experiment(plan);
  EXPECT_EQ(r.at(Variant::kOneTrue).trials_ok, 4);
  EXPECT_EQ(r.at(Variant::kTwoCalibrated).trials_failed, 4);
  EXPECT_TRUE(r.at(Variant::kTwoCalibrated).sample_means.empty());
  ASSERT_EQ(r.failures.size(), 4u);
  EXPECT_EQ(r.failures[0].kind, "DegenerateMotion");
  EXPECT_TRUE(std::isfinite(r.at(Variant::kOneTrue).position.mean));
}

TEST(RunExperiment, StreamsTrialsToDisk) {
  ExperimentPlan plan = tiny_plan();
  plan.stream_dir = scratch_dir("stream");
  run_experiment(plan);
  std::ifstream in(plan.stream_dir / "trials.csv");
  int lines = 0;
  for (std::string s; std::getline(in, s);) ++lines;
  EXPECT_EQ(lines, 1 + 2 * 2 * 5);
}

TEST(OrderingConfidence, Extremes) {
  const std::vector<double> lo{1, 2, 3, 4}, hi{2, 3, 4, 5};
  EXPECT_EQ(ordering_confidence(lo, hi), 1.0);
  EXPECT_EQ(ordering_confidence(hi, lo), 0.0);
  EXPECT_THROW(ordering_confidence(lo, {1.0}), Error);
}

TEST(OrderingConfidence, NoisyDifferenceIsIntermediate) {
  const std::vector<double> a{1.0, 3.0, 2.0, 5.0, 1.5};
  const std::vector<double> b{1.2, 2.5, 2.3, 4.9, 1.6};
  const double c = ordering_confidence(a, b);
  EXPECT_GT(c, 0.05);
  EXPECT_LT(c, 0.95);
}

TEST(EmitReport, RoundTripsAtFullPrecision) {
  const RmseReport r = run_experiment(tiny_plan());
  const auto dir = scratch_dir("emit");
  emit_report(r, dir);
  const json doc = load_json_file(dir / "report.json");
  ASSERT_EQ(doc.at("variants").size(), r.variants.size());
  for (std::size_t i = 0; i < r.variants.size(); ++i) {
    const json& v = doc.at("variants")[i];
    EXPECT_EQ(v.at("variant"), variant_name(r.variants[i].variant));
    EXPECT_EQ(v.at("position_m").at("mean").get<double>(), r.variants[i].position.mean);
    EXPECT_EQ(v.at("rotation_rad").at("std").get<double>(), r.variants[i].rotation.std);
    EXPECT_EQ(v.at("velocity_mps").at("mean").get<double>(), r.variants[i].velocity.mean);
  }
  const ExperimentPlan back = decode<ExperimentPlan>(doc.at("plan"), "plan");
  EXPECT_EQ(back.samples, 2);
  EXPECT_EQ(back.variants, r.plan.variants);

  const std::string csv = read_text_file(dir / "plot_data.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 5);
  EXPECT_EQ(csv.rfind("variant,metric,mean,std\n", 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "failures.log"));
}

}  // namespace
}  // namespace mimu
