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

#include "mimu/simulation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mimu/error.hpp"
#include "mimu/rng.hpp"

namespace mimu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 gaussian_vec(std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return sigma * Vec3(x, y, z);
}

}  // namespace

double Sinusoid::value(double t) const {
  return amplitude * std::sin(kTwoPi * frequency * t + phase);
}

double Sinusoid::rate(double t) const {
  const double w = kTwoPi * frequency;
  return amplitude * w * std::cos(w * t + phase);
}

double Sinusoid::accel(double t) const {
  const double w = kTwoPi * frequency;
  return -amplitude * w * w * std::sin(w * t + phase);
}

TrajectoryParams TrajectoryParams::default_motion() {
  TrajectoryParams p;
  p.position = {Sinusoid{0.5, 0.20, 0.0}, Sinusoid{0.4, 0.15, 1.0},
                Sinusoid{0.2, 0.25, 0.5}};
  p.euler = {Sinusoid{0.35, 0.70, 0.3}, Sinusoid{0.30, 0.55, 1.1},
             Sinusoid{0.40, 0.40, 0.0}};
  p.yaw_rate = 1.5;
  return p;
}

TrajectoryParams TrajectoryParams::slow_spin() {
  TrajectoryParams p;
  p.position = {Sinusoid{0.3, 0.05, 0.0}, Sinusoid{0.3, 0.04, 1.0},
                Sinusoid{0.1, 0.06, 0.5}};
  p.euler = {Sinusoid{0.6, 0.09, 0.3}, Sinusoid{0.5, 0.07, 1.3},
             Sinusoid{0.3, 0.05, 0.0}};
  p.yaw_rate = 1.2;
  return p;
}

std::vector<ImuMount> grid_array(double pitch, const NoiseSpec& noise) {
  std::vector<ImuMount> imus;
  imus.reserve(9);
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      ImuMount m;
      m.name = "imu" + std::to_string(row * 3 + col);
      m.mount = Extrinsic(Quat::Identity(),
                          Vec3((col - 1) * pitch, (1 - row) * pitch, 0.0));
      m.noise = noise;
      imus.push_back(m);
    }
  }
  return imus;
}

std::size_t SimConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration * freq));
}

void SimConfig::validate() const {
  if (!(freq > 0.0) || !std::isfinite(freq)) {
    throw Error(ErrorKind::kInvalidArgument, "SimConfig: freq must be > 0");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorKind::kInvalidArgument,
                "SimConfig: duration must be > 0");
  }
  if (!gravity.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "SimConfig: gravity not finite");
  }
  for (const auto& imu : imus) {
    if (!imu.noise.valid()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "SimConfig: invalid noise for " + imu.name);
    }
  }
}

TrajectorySample sample_trajectory(const TrajectoryParams& traj, double t) {
  TrajectorySample s;
  s.t = t;
  for (int i = 0; i < 3; ++i) {
    s.p_W(i) = traj.position[i].value(t);
    s.v_W(i) = traj.position[i].rate(t);
    s.a_W(i) = traj.position[i].accel(t);
  }

  const double roll = traj.euler[0].value(t);
  const double pitch = traj.euler[1].value(t);
  const double yaw = traj.euler[2].value(t) + traj.yaw_rate * t;
  const double droll = traj.euler[0].rate(t);
  const double dpitch = traj.euler[1].rate(t);
  const double dyaw = traj.euler[2].rate(t) + traj.yaw_rate;
  const double ddroll = traj.euler[0].accel(t);
  const double ddpitch = traj.euler[1].accel(t);
  const double ddyaw = traj.euler[2].accel(t);

  s.R_WB = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
            Eigen::AngleAxisd(roll, Vec3::UnitX()))
               .toRotationMatrix();

  const double sr = std::sin(roll), cr = std::cos(roll);
  const double sp = std::sin(pitch), cp = std::cos(pitch);

  // Body rates of a ZYX Euler sequence.
  s.omega_B = Vec3(droll - dyaw * sp,
                   dpitch * cr + dyaw * sr * cp,
                   -dpitch * sr + dyaw * cr * cp);

  s.omega_dot_B = Vec3(
      ddroll - ddyaw * sp - dyaw * dpitch * cp,
      ddpitch * cr - dpitch * droll * sr + ddyaw * sr * cp +
          dyaw * (droll * cr * cp - dpitch * sr * sp),
      -ddpitch * sr - dpitch * droll * cr + ddyaw * cr * cp +
          dyaw * (-droll * sr * cp - dpitch * cr * sp));
  return s;
}

TrajectorySample sample_trajectory(const SimConfig& cfg, double t) {
  if (!(t >= 0.0 && t <= cfg.duration)) {
    throw Error(ErrorKind::kOutOfRange,
                "sample_trajectory: t = " + std::to_string(t) +
                    " outside [0, " + std::to_string(cfg.duration) + "]");
  }
  return sample_trajectory(cfg.trajectory, t);
}

TrajectorySample mounted_sample(const TrajectorySample& body,
                                const Extrinsic& mount) {
  const Mat3 R_IB = mount.R_BA();
  const Vec3& p = mount.p_AB;
  const Vec3& w = body.omega_B;
  const Vec3& wd = body.omega_dot_B;

  TrajectorySample s;
  s.t = body.t;
  s.R_WB = body.R_WB * R_IB.transpose();
  s.p_W = body.p_W + body.R_WB * p;
  s.v_W = body.v_W + body.R_WB * w.cross(p);
  s.a_W = body.a_W + body.R_WB * (wd.cross(p) + w.cross(w.cross(p)));
  s.omega_B = R_IB * w;
  s.omega_dot_B = R_IB * wd;
  return s;
}

ImuMeasurement ideal_body_measurements(const TrajectorySample& sample,
                                       const Vec3& gravity) {
  return {sample.omega_B, sample.R_WB.transpose() * (sample.a_W - gravity)};
}

ImuMeasurement transfer_measurement(const Vec3& omega_A,
                                    const Vec3& omega_dot_A, const Vec3& a_A,
                                    const Extrinsic& ext) {
  const Mat3 R_BA = ext.R_BA();
  const Mat3 W = skew(omega_A);
  const Vec3 lever = W * (W * ext.p_AB) + skew(omega_dot_A) * ext.p_AB;
  return {R_BA * omega_A, R_BA * (a_A + lever)};
}

std::vector<TrajectorySample> truth_series(const SimConfig& cfg,
                                           const Extrinsic& mount) {
  cfg.validate();
  const std::size_t n = cfg.sample_count();
  std::vector<TrajectorySample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / cfg.freq;
    out.push_back(mounted_sample(sample_trajectory(cfg.trajectory, t), mount));
  }
  return out;
}

ImuSeries ideal_series(const SimConfig& cfg, const Extrinsic& mount) {
  cfg.validate();
  const std::size_t n = cfg.sample_count();
  ImuSeries series;
  series.freq = cfg.freq;
  series.start_ns = 0;
  series.gyro.reserve(n);
  series.accel.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / cfg.freq;
    const ImuMeasurement m = ideal_body_measurements(
        mounted_sample(sample_trajectory(cfg.trajectory, t), mount),
        cfg.gravity);
    series.gyro.push_back(m.gyro);
    series.accel.push_back(m.accel);
  }
  return series;
}

ImuSeries apply_noise(const ImuSeries& ideal, const NoiseSpec& noise,
                      std::uint64_t seed) {
  if (!noise.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "apply_noise: invalid noise");
  }
  const double sqrt_f = std::sqrt(ideal.freq);
  ImuSeries out = ideal;
  std::mt19937_64 rng(seed);
  Vec3 bg = noise.initial_bias_g;
  Vec3 ba = noise.initial_bias_a;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.gyro[k] += bg + gaussian_vec(rng, noise.sigma_g * sqrt_f);
    out.accel[k] += ba + gaussian_vec(rng, noise.sigma_a * sqrt_f);
    bg += gaussian_vec(rng, noise.sigma_bg / sqrt_f);
    ba += gaussian_vec(rng, noise.sigma_ba / sqrt_f);
  }
  return out;
}

ImuSeries simulate_imu(const SimConfig& cfg, const Extrinsic& mount,
                       const NoiseSpec& noise, std::uint64_t seed) {
  return apply_noise(ideal_series(cfg, mount), noise, seed);
}

std::vector<ImuSeries> simulate_array(const SimConfig& cfg) {
  std::vector<ImuSeries> out;
  out.reserve(cfg.imus.size());
  for (std::size_t i = 0; i < cfg.imus.size(); ++i) {
    out.push_back(simulate_imu(cfg, cfg.imus[i].mount, cfg.imus[i].noise,
                               derive_seed(cfg.seed, {i})));
  }
  return out;
}

Extrinsic perturb_extrinsics(const Extrinsic& ext, double sigma_rot,
                             double sigma_trans, std::uint64_t seed) {
  if (!(sigma_rot >= 0.0) || !(sigma_trans >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "perturb_extrinsics: sigma must be >= 0");
  }
  std::mt19937_64 rng(seed);
  const Vec3 d_rot = gaussian_vec(rng, sigma_rot);
  const Vec3 d_trans = gaussian_vec(rng, sigma_trans);
  const Mat3 R = ext.R_BA() * exp_so3(d_rot);
  return {quat_from_rotation(R), ext.p_AB + d_trans};
}

}  // namespace mimu
