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


#include "mimu/config.hpp"

#include <gtest/gtest.h>

#include "mimu/error.hpp"

namespace mimu {
namespace {

TEST(Config, SimConfigRoundTrip) {
  SimConfig cfg;
  cfg.freq = 400.0;
  cfg.seed = 17;
  cfg.trajectory.euler[1].phase = 0.123456789012345;
  cfg.imus[4].noise.sigma_a = 3.3e-3;
  const SimConfig back = decode<SimConfig>(parse_json(json(cfg).dump()), "sim");
  EXPECT_EQ(back.freq, 400.0);
  EXPECT_EQ(back.seed, 17u);
  EXPECT_EQ(back.trajectory.euler[1].phase, 0.123456789012345);
  ASSERT_EQ(back.imus.size(), 9u);
  EXPECT_EQ(back.imus[4].noise.sigma_a, 3.3e-3);
  EXPECT_EQ(back.imus[8].mount.p_AB, cfg.imus[8].mount.p_AB);
}

TEST(Config, PartialDocumentKeepsDefaults) {
  const SimConfig cfg = decode<SimConfig>(parse_json(R"({"duration": 3})"), "sim");
  const SimConfig def;
  EXPECT_EQ(cfg.duration, 3.0);
  EXPECT_EQ(cfg.freq, def.freq);
  EXPECT_EQ(cfg.imus.size(), 9u);
  EXPECT_EQ(cfg.trajectory.yaw_rate, def.trajectory.yaw_rate);
}

TEST(Config, CalibrationResultRoundTrip) {
  CalibrationResult r;
  r.extrinsic = Extrinsic(quat_from_rotation(exp_so3(Vec3(0.1, 0.2, -0.3))),
                          Vec3(0.1, -1.0 / 3.0, 2e-7));
  r.rot_iterations = 4;
  r.final_trans_cost = 1234.5;
  const CalibrationResult back =
      decode<CalibrationResult>(parse_json(json(r).dump()), "calib");
  EXPECT_EQ(back.extrinsic.p_AB, r.extrinsic.p_AB);
  EXPECT_EQ(back.extrinsic.q_BA.coeffs(), r.extrinsic.q_BA.coeffs());
  EXPECT_EQ(back.rot_iterations, 4);
  EXPECT_EQ(back.final_trans_cost, 1234.5);
}

TEST(Config, VimuConfigRoundTrip) {
  VimuConfig cfg = midpoint_frame(
      Extrinsic(quat_from_rotation(exp_so3(Vec3(0.4, 0, 0.1))), Vec3(0.1, 0.02, 0)));
  cfg.members[1].noise.sigma_g = 5e-4;
  const VimuConfig back = decode<VimuConfig>(parse_json(json(cfg).dump()), "vimu");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.members[1].R_IV, cfg.members[1].R_IV);
  EXPECT_EQ(back.members[0].p_VI, cfg.members[0].p_VI);
  EXPECT_EQ(back.members[1].noise.sigma_g, 5e-4);
}

TEST(Config, Overrides) {
  json doc = json::object();
  apply_override(doc, "trajectory.yaw_rate=0.25");
  apply_override(doc, "imus.0.name=left");
  apply_override(doc, "label=plain text");
  EXPECT_EQ(doc["trajectory"]["yaw_rate"], 0.25);
  EXPECT_EQ(doc["imus"][0]["name"], "left");
  EXPECT_EQ(doc["label"], "plain text");
  EXPECT_THROW(apply_override(doc, "no_equals"), Error);
}

TEST(Config, MalformedInputIsFormatError) {
  try {
    parse_json("{not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormatError);
  }
  EXPECT_THROW(decode<SimConfig>(parse_json(R"({"gravity": [1, 2]})"), "sim"), Error);
  EXPECT_THROW(decode<SimConfig>(parse_json(R"({"freq": "fast"})"), "sim"), Error);
  EXPECT_THROW(decode<ExperimentPlan>(parse_json(R"({"variants": ["x"]})"), "plan"),
               Error);
}

}  // namespace
}  // namespace mimu
