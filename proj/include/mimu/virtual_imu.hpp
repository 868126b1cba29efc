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
 * @file virtual_imu.hpp
 * @brief Noise-weighted fusion of several rigidly mounted IMUs into one
 * virtual IMU (VIMU) located at frame V.
 *
 * Each member I is described by its orientation ᴵR_V and its position ⱽp_I.
 * Gyro fusion solves the whitened least-squares problem
 *   [ᴵR_V / σ_gI] ⱽω = [ω_I / σ_gI]
 * and accel fusion the analogous problem after removing the lever-arm terms
 *   ᴵR_V ([ⱽω]² + [ⱽω̇]) ⱽp_I.
 */

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "mimu/types.hpp"

namespace mimu {

struct VimuMember {
  Mat3 R_IV = Mat3::Identity();  // ᴵR_V
  Vec3 p_VI = Vec3::Zero();      // ⱽp_I
  NoiseSpec noise;
};

struct VimuConfig {
  std::vector<VimuMember> members;

  std::size_t size() const { return members.size(); }
  /// Throws InvalidArgument on an empty config, a non-rotation or bad noise.
  void validate() const;
};

/// True when a two-member config reproduces `ext` (B relative to A) within tol.
bool consistent_with(const VimuConfig& cfg, const Extrinsic& ext,
                     double tol = 1e-9);

/// V at the midpoint of A and B with A's orientation.
VimuConfig midpoint_frame(const Extrinsic& ext,
                          const NoiseSpec& noise_a = NoiseSpec{},
                          const NoiseSpec& noise_b = NoiseSpec{});

/**
 * V with the body orientation, placed at `origin` (body coordinates).
 * mounts[i] is sensor i relative to the body.
 */
VimuConfig frame_from_mounts(const std::vector<Extrinsic>& mounts,
                             const std::vector<NoiseSpec>& noise,
                             const Vec3& origin);

struct FusionMatrices {
  Eigen::MatrixXd N;       // 3n x 3, blocks ᴵR_V / σ_gI
  Eigen::MatrixXd N_pinv;  // 3 x 3n
  Eigen::MatrixXd M;       // 3n x 3, blocks ᴵR_V / σ_aI
  Eigen::MatrixXd T;       // 3 x 3n
  Eigen::VectorXd gyro_whitening;   // 1 / σ_gI per row
  Eigen::VectorXd accel_whitening;  // 1 / σ_aI per row
  double condition_gyro = 1.0;
  double condition_accel = 1.0;

  /// N⁺ and T acting on raw, unwhitened stacked measurements.
  Eigen::MatrixXd gyro_raw() const;
  Eigen::MatrixXd accel_raw() const;
};

/// Throws SingularFusion when NᵀN or MᵀM is not finite or has condition > 1e12.
FusionMatrices build_fusion(const VimuConfig& cfg);

Vec3 fuse_gyro(const FusionMatrices& fm, const std::vector<Vec3>& gyro);
Vec3 fuse_gyro(const FusionMatrices& fm, const Vec3& omega_a,
               const Vec3& omega_b);

/// Whitened lever-arm stack, 3n entries.
Eigen::VectorXd lever_arm_stack(const VimuConfig& cfg, const Vec3& omega_v,
                                const Vec3& omega_dot_v);

Vec3 fuse_accel(const FusionMatrices& fm, const VimuConfig& cfg,
                const std::vector<Vec3>& accel, const Vec3& omega_v,
                const Vec3& omega_dot_v);

struct VimuNoise {
  Mat3 Q_gV = Mat3::Zero();
  Mat3 Q_bgV = Mat3::Zero();
  Mat3 Q_aV = Mat3::Zero();
  Mat3 Q_baV = Mat3::Zero();
};

VimuNoise virtual_covariances(const VimuConfig& cfg);
VimuNoise virtual_covariances(const VimuConfig& cfg, const FusionMatrices& fm);

/**
 * Derivative of the unwhitened lever-arm stack with respect to ⱽω:
 * blocks ᴵR_V (−[ω][ⱽp_I] − [[ω]ⱽp_I]), 3n x 3.
 */
Eigen::MatrixXd psi_matrix(const VimuConfig& cfg, const Vec3& omega_hat);

struct VirtualSample {
  Vec3 omega = Vec3::Zero();      // ⱽω̃
  Vec3 accel = Vec3::Zero();      // ⱽã
  Vec3 omega_dot = Vec3::Zero();  // ⱽω̇̃
  /// T·S_a: lever-arm change when the gyro bias estimate is removed from ω.
  Vec3 correction = Vec3::Zero();
};

struct VirtualSeries {
  double freq = 200.0;
  std::int64_t start_ns = 0;
  std::vector<VirtualSample> samples;

  std::size_t size() const { return samples.size(); }
  double dt() const { return 1.0 / freq; }
  ImuSeries to_imu_series() const;
};

/**
 * Fuses synchronized member series sample by sample.  ⱽω̇ is the central
 * difference of the fused gyro, so the first and last samples are dropped and
 * the output starts one period after the inputs.
 *
 * Throws LengthMismatch / RateMismatch on unsynchronized inputs and
 * InvalidArgument on fewer than three samples.
 */
VirtualSeries fuse_series(const VimuConfig& cfg, const FusionMatrices& fm,
                          const std::vector<ImuSeries>& inputs,
                          const Vec3& gyro_bias_estimate = Vec3::Zero());

}  // namespace mimu
