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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mimu/types.hpp"

namespace mimu {

/// a * sin(2 pi f t + phase)
struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad

  double value(double t) const;
  double rate(double t) const;
  double accel(double t) const;
};

/**
 * Closed-form body trajectory.
 *
 * Position: independent sinusoid per world axis.
 * Orientation: ZYX Euler angles R = Rz(yaw) Ry(pitch) Rx(roll), each a
 * sinusoid; yaw additionally carries a constant spin rate.  Angular velocity
 * and acceleration follow from differentiating the Euler-rate kinematics, so
 * every derivative is exact.
 */
struct TrajectoryParams {
  std::array<Sinusoid, 3> position{};
  std::array<Sinusoid, 3> euler{};  // roll, pitch, yaw
  double yaw_rate = 0.0;            // rad/s

  static TrajectoryParams static_pose() { return {}; }
  /// Fast multi-axis motion used as the simulation default.
  static TrajectoryParams default_motion();
  /// Slow, large-amplitude motion with a constant spin.  Its angular
  /// acceleration is tiny compared with its excitation, which keeps the
  /// central-difference truncation error of the calibration negligible.
  static TrajectoryParams slow_spin();
};

struct ImuMount {
  std::string name;
  Extrinsic mount;  // sensor relative to body: q = ᴵq_body, p = body-frame position
  NoiseSpec noise;
};

/// 3x3 grid in the body x-y plane, centred on the body origin, identity axes.
std::vector<ImuMount> grid_array(double pitch = 0.05,
                                 const NoiseSpec& noise = NoiseSpec{});

struct SimConfig {
  Vec3 gravity{0.0, 0.0, -9.81};
  double freq = 200.0;      // Hz
  double duration = 60.0;   // s
  std::uint64_t seed = 1;
  TrajectoryParams trajectory = TrajectoryParams::default_motion();
  std::vector<ImuMount> imus = grid_array();

  std::size_t sample_count() const;
  /// Throws InvalidArgument on freq <= 0, duration <= 0 or invalid noise.
  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  Mat3 R_WB = Mat3::Identity();
  Vec3 p_W = Vec3::Zero();
  Vec3 v_W = Vec3::Zero();
  Vec3 a_W = Vec3::Zero();
  Vec3 omega_B = Vec3::Zero();      // body angular rate, body coordinates
  Vec3 omega_dot_B = Vec3::Zero();  // its time derivative, body coordinates
};

struct ImuMeasurement {
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// Throws OutOfRange unless 0 <= t <= duration.
TrajectorySample sample_trajectory(const SimConfig& cfg, double t);
/// Same trajectory without the range check (harness use).
TrajectorySample sample_trajectory(const TrajectoryParams& traj, double t);

/// Kinematic state of a sensor rigidly mounted on the body.
TrajectorySample mounted_sample(const TrajectorySample& body,
                                const Extrinsic& mount);

/// Noise-free gyro and specific force: a = R_IW (a_W - g).
ImuMeasurement ideal_body_measurements(const TrajectorySample& sample,
                                       const Vec3& gravity);

/**
 * Rigid-body transfer from sensor A to sensor B:
 *   w_B = R_BA w_A
 *   a_B = R_BA (a_A + [w_A]^2 p_AB + [w_dot_A] p_AB)
 */
ImuMeasurement transfer_measurement(const Vec3& omega_A,
                                    const Vec3& omega_dot_A, const Vec3& a_A,
                                    const Extrinsic& ext);

/// Noise-free measurements of a mounted IMU at every sample time.
ImuSeries ideal_series(const SimConfig& cfg, const Extrinsic& mount);

/// Adds white noise and bias random walk (see simulate_imu) to `ideal`.
ImuSeries apply_noise(const ImuSeries& ideal, const NoiseSpec& noise,
                      std::uint64_t seed);

/**
 * Noisy measurements of a mounted IMU.
 *
 * White noise per sample ~ N(0, sigma^2 * freq); bias random walk
 * b_{k+1} = b_k + n_k * sigma_b / sqrt(freq).  Deterministic in `seed`.
 */
ImuSeries simulate_imu(const SimConfig& cfg, const Extrinsic& mount,
                       const NoiseSpec& noise, std::uint64_t seed);

/// Ground-truth states of the mounted frame at every sample time.
std::vector<TrajectorySample> truth_series(const SimConfig& cfg,
                                           const Extrinsic& mount);

/// One series per cfg.imus entry, each seeded from cfg.seed and its index.
std::vector<ImuSeries> simulate_array(const SimConfig& cfg);

/**
 * Rotation right-multiplied by Exp(d), d ~ N(0, sigma_rot^2 I); translation
 * shifted by N(0, sigma_trans^2 I).
 */
Extrinsic perturb_extrinsics(const Extrinsic& ext, double sigma_rot,
                             double sigma_trans, std::uint64_t seed);

}  // namespace mimu
