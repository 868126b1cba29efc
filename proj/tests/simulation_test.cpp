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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mimu/error.hpp"
#include "mimu/simulation.hpp"

namespace mimu {
namespace {

SimConfig static_config(double duration = 1.0) {
  SimConfig cfg;
  cfg.duration = duration;
  cfg.trajectory = TrajectoryParams::static_pose();
  return cfg;
}

Extrinsic random_mount(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec3 phi(n(rng), n(rng), n(rng));
  const Vec3 p = 0.1 * Vec3(n(rng), n(rng), n(rng));
  return {quat_from_rotation(exp_so3(phi)), p};
}

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

TEST(TrajectoryTest, ZeroAmplitudesAreStatic) {
  const SimConfig cfg = static_config(10.0);
  for (double t : {0.0, 1.3, 7.7, 10.0}) {
    const TrajectorySample s = sample_trajectory(cfg, t);
    EXPECT_EQ(s.a_W, Vec3::Zero());
    EXPECT_EQ(s.omega_B, Vec3::Zero());
    EXPECT_EQ(s.omega_dot_B, Vec3::Zero());
    EXPECT_EQ(s.R_WB, Mat3::Identity());
  }
}

TEST(TrajectoryTest, OutOfRangeThrows) {
  const SimConfig cfg = static_config(2.0);
  EXPECT_THROW(sample_trajectory(cfg, -1e-3), Error);
  EXPECT_THROW(sample_trajectory(cfg, 2.001), Error);
  try {
    sample_trajectory(cfg, 5.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfRange);
  }
}

TEST(TrajectoryTest, DerivativesMatchFiniteDifferences) {
  for (const TrajectoryParams& traj :
       {TrajectoryParams::default_motion(), TrajectoryParams::slow_spin()}) {
    const double h = 1e-5;
    for (double t = 0.5; t < 20.0; t += 1.7) {
      const TrajectorySample s = sample_trajectory(traj, t);
      const TrajectorySample sp = sample_trajectory(traj, t + h);
      const TrajectorySample sm = sample_trajectory(traj, t - h);

      const Vec3 v_fd = (sp.p_W - sm.p_W) / (2 * h);
      EXPECT_LT((v_fd - s.v_W).norm(), 1e-6);
      const Vec3 a_fd = (sp.v_W - sm.v_W) / (2 * h);
      EXPECT_LT((a_fd - s.a_W).norm(), 1e-6);

      const double hr = 1e-6;
      const Vec3 w_fd =
          log_so3(s.R_WB.transpose() * sample_trajectory(traj, t + hr).R_WB) / hr;
      EXPECT_LT((w_fd - s.omega_B).norm(), 1e-4);

      const Vec3 wd_fd = (sp.omega_B - sm.omega_B) / (2 * h);
      EXPECT_LT((wd_fd - s.omega_dot_B).norm(), 1e-5);
    }
  }
}

TEST(MeasurementTest, StaticGravityReaction) {
  const SimConfig cfg = static_config();
  const ImuMeasurement m =
      ideal_body_measurements(sample_trajectory(cfg, 0.5), cfg.gravity);
  EXPECT_LT((m.accel - Vec3(0, 0, 9.81)).norm(), 1e-15);
  EXPECT_EQ(m.gyro, Vec3::Zero());
}

TEST(MeasurementTest, FreeFallReadsZero) {
  TrajectorySample s;
  s.R_WB = exp_so3(Vec3(0.3, -0.1, 0.7));
  s.a_W = Vec3(0, 0, -9.81);
  const ImuMeasurement m = ideal_body_measurements(s, Vec3(0, 0, -9.81));
  EXPECT_LT(m.accel.norm(), 1e-15);
}

TEST(MeasurementTest, CircularMotionCentripetal) {
  // Unit circle at 1 rad/s with the body heading along the tangent.
  TrajectoryParams traj;
  const double f = 1.0 / (2.0 * std::numbers::pi);
  traj.position[0] = Sinusoid{1.0, f, std::numbers::pi / 2};
  traj.position[1] = Sinusoid{1.0, f, 0.0};
  traj.yaw_rate = 1.0;
  for (double t : {0.0, 0.4, 2.2, 5.0}) {
    const TrajectorySample s = sample_trajectory(traj, t);
    const ImuMeasurement m = ideal_body_measurements(s, Vec3::Zero());
    EXPECT_NEAR(m.accel.norm(), 1.0, 1e-12);
    // Toward the centre, which is body -x for this heading.
    EXPECT_LT((m.accel - Vec3(-1, 0, 0)).norm(), 1e-12);
    EXPECT_LT((m.gyro - Vec3(0, 0, 1)).norm(), 1e-12);
  }
}

TEST(TransferTest, IdentityExtrinsicIsNoOp) {
  const Vec3 w(0.1, 0.2, -0.3), wd(1, 2, 3), a(4, 5, 6);
  const ImuMeasurement m = transfer_measurement(w, wd, a, Extrinsic::identity());
  EXPECT_EQ(m.gyro, w);
  EXPECT_EQ(m.accel, a);
}

TEST(TransferTest, CentripetalLeverArm) {
  const ImuMeasurement m = transfer_measurement(
      Vec3(0, 0, 1), Vec3::Zero(), Vec3::Zero(),
      Extrinsic(Quat::Identity(), Vec3(1, 0, 0)));
  EXPECT_LT((m.accel - Vec3(-1, 0, 0)).norm(), 1e-15);
}

TEST(TransferTest, AgreesWithIndependentlySimulatedSensors) {
  std::mt19937_64 rng(3);
  const TrajectoryParams traj = TrajectoryParams::default_motion();
  const Vec3 g(0, 0, -9.81);
  for (int i = 0; i < 50; ++i) {
    const Extrinsic mount_a = random_mount(rng);
    const Extrinsic mount_b = random_mount(rng);
    const Extrinsic rel = relative_extrinsic(mount_a, mount_b);
    const TrajectorySample body = sample_trajectory(traj, 0.37 * i);
    const TrajectorySample sa = mounted_sample(body, mount_a);
    const TrajectorySample sb = mounted_sample(body, mount_b);
    const ImuMeasurement ma = ideal_body_measurements(sa, g);
    const ImuMeasurement mb = ideal_body_measurements(sb, g);
    const ImuMeasurement pred =
        transfer_measurement(ma.gyro, sa.omega_dot_B, ma.accel, rel);
    EXPECT_LT((pred.gyro - mb.gyro).norm(), 1e-10);
    EXPECT_LT((pred.accel - mb.accel).norm(), 1e-10);
  }
}

TEST(SimulateImuTest, NoiselessStaticSeries) {
  const SimConfig cfg = static_config(1.0);
  const ImuSeries s =
      simulate_imu(cfg, Extrinsic::identity(), NoiseSpec::zero(), 42);
  ASSERT_EQ(s.size(), 200u);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_LT((s.accel[k] - Vec3(0, 0, 9.81)).norm(), 1e-15);
    EXPECT_EQ(s.gyro[k], Vec3::Zero());
  }
}

TEST(SimulateImuTest, SampleCountAt200HzFor60s) {
  SimConfig cfg = static_config(60.0);
  cfg.freq = 200.0;
  EXPECT_EQ(simulate_imu(cfg, Extrinsic::identity(), NoiseSpec::zero(), 1).size(),
            12000u);
}

TEST(SimulateImuTest, WhiteNoiseStandardDeviation) {
  SimConfig cfg = static_config(500.0);  // 1e5 samples
  NoiseSpec noise = NoiseSpec::zero();
  noise.sigma_g = 1.7e-4;
  noise.sigma_a = 2.0e-3;
  const ImuSeries s = simulate_imu(cfg, Extrinsic::identity(), noise, 5);
  ASSERT_EQ(s.size(), 100000u);
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> g, a;
    for (std::size_t k = 0; k < s.size(); ++k) {
      g.push_back(s.gyro[k](axis));
      a.push_back(s.accel[k](axis));
    }
    EXPECT_NEAR(sample_std(g) / (noise.sigma_g * std::sqrt(cfg.freq)), 1.0, 0.05);
    EXPECT_NEAR(sample_std(a) / (noise.sigma_a * std::sqrt(cfg.freq)), 1.0, 0.05);
  }
}

TEST(SimulateImuTest, BiasRandomWalkVariance) {
  SimConfig cfg = static_config(0.5);  // k = 100 steps
  NoiseSpec noise = NoiseSpec::zero();
  noise.sigma_bg = 1e-3;
  noise.sigma_ba = 2e-2;
  const std::size_t k = 100;
  std::vector<double> bg, ba;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    const ImuSeries s = simulate_imu(cfg, Extrinsic::identity(), noise, trial);
    // Sample k carries the bias after k random-walk steps.
    bg.push_back(s.gyro[k - 1](0));
    ba.push_back(s.accel[k - 1](1));
  }
  const double steps = static_cast<double>(k - 1);
  const double var_g = std::pow(sample_std(bg), 2);
  const double var_a = std::pow(sample_std(ba), 2);
  EXPECT_NEAR(var_g / (steps * noise.sigma_bg * noise.sigma_bg / cfg.freq), 1.0, 0.1);
  EXPECT_NEAR(var_a / (steps * noise.sigma_ba * noise.sigma_ba / cfg.freq), 1.0, 0.1);
}

TEST(SimulateImuTest, SeedsAreReproducible) {
  SimConfig cfg;
  cfg.duration = 2.0;
  const NoiseSpec noise;
  const ImuSeries a = simulate_imu(cfg, cfg.imus[3].mount, noise, 99);
  const ImuSeries b = simulate_imu(cfg, cfg.imus[3].mount, noise, 99);
  const ImuSeries c = simulate_imu(cfg, cfg.imus[3].mount, noise, 100);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.gyro[k], b.gyro[k]);
    EXPECT_EQ(a.accel[k], b.accel[k]);
  }
  EXPECT_NE(a.gyro[10], c.gyro[10]);
}

TEST(SimulateImuTest, ArrayMeasurementsSatisfyRigidBodyRelation) {
  SimConfig cfg;
  cfg.duration = 3.0;
  for (auto& imu : cfg.imus) imu.noise = NoiseSpec::zero();
  cfg.imus[8].mount = Extrinsic(quat_from_rotation(exp_so3(Vec3(0.2, -0.4, 1.0))),
                                cfg.imus[8].mount.p_AB);
  const std::vector<ImuSeries> series = simulate_array(cfg);
  const Extrinsic rel = relative_extrinsic(cfg.imus[0].mount, cfg.imus[8].mount);
  for (std::size_t k = 0; k < series[0].size(); k += 37) {
    const double t = static_cast<double>(k) / cfg.freq;
    const TrajectorySample sa =
        mounted_sample(sample_trajectory(cfg, t), cfg.imus[0].mount);
    const ImuMeasurement pred = transfer_measurement(
        series[0].gyro[k], sa.omega_dot_B, series[0].accel[k], rel);
    EXPECT_LT((pred.gyro - series[8].gyro[k]).norm(), 1e-10);
    EXPECT_LT((pred.accel - series[8].accel[k]).norm(), 1e-10);
  }
}

TEST(GridArrayTest, NineImusFiveCentimetrePitch) {
  const auto imus = grid_array();
  ASSERT_EQ(imus.size(), 9u);
  EXPECT_LT((imus[4].mount.p_AB).norm(), 1e-15);
  EXPECT_NEAR((imus[0].mount.p_AB - imus[1].mount.p_AB).norm(), 0.05, 1e-15);
  EXPECT_NEAR((imus[0].mount.p_AB - imus[8].mount.p_AB).norm(),
              0.1 * std::sqrt(2.0), 1e-15);
  for (const auto& imu : imus) {
    EXPECT_EQ(imu.mount.R_BA(), Mat3::Identity());
  }
}

TEST(PerturbTest, ZeroSigmaLeavesExtrinsicUnchanged) {
  const Extrinsic ext(quat_from_rotation(exp_so3(Vec3(0.1, 0.2, 0.3))),
                      Vec3(0.12, 0, 0));
  const Extrinsic out = perturb_extrinsics(ext, 0.0, 0.0, 7);
  EXPECT_LT(geodesic_distance(out.q_BA, ext.q_BA), 1e-15);
  EXPECT_EQ(out.p_AB, ext.p_AB);
}

TEST(PerturbTest, PerAxisStatistics) {
  const Extrinsic base(quat_from_rotation(exp_so3(Vec3(0.4, -0.2, 0.1))),
                       Vec3(0.05, 0.05, 0));
  const double sigma_rot = 0.01, sigma_trans = 0.001;
  std::array<std::vector<double>, 3> rot, trans;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Extrinsic e = perturb_extrinsics(base, sigma_rot, sigma_trans, seed);
    const Vec3 d = log_so3(base.R_BA().transpose() * e.R_BA());
    const Vec3 dp = e.p_AB - base.p_AB;
    for (int i = 0; i < 3; ++i) {
      rot[i].push_back(d(i));
      trans[i].push_back(dp(i));
    }
  }
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(sample_std(rot[i]) / sigma_rot, 1.0, 0.05);
    EXPECT_NEAR(sample_std(trans[i]) / sigma_trans, 1.0, 0.05);
  }
}

TEST(PerturbTest, DeterministicPerSeed) {
  const Extrinsic base;
  const Extrinsic a = perturb_extrinsics(base, 0.01, 0.001, 123);
  const Extrinsic b = perturb_extrinsics(base, 0.01, 0.001, 123);
  EXPECT_EQ(a.q_BA.coeffs(), b.q_BA.coeffs());
  EXPECT_EQ(a.p_AB, b.p_AB);
}

TEST(PerturbTest, NegativeSigmaRejected) {
  EXPECT_THROW(perturb_extrinsics(Extrinsic{}, -0.1, 0.0, 1), Error);
}

}  // namespace
}  // namespace mimu
