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
 * @file preintegration.hpp
 * @brief On-manifold preintegration of virtual IMU samples and propagation of
 * its 9x9 noise covariance, ordered [δφ, δv, δp].
 *
 * Error conventions: δφ = Log(ΔR_trueᵀ ΔR_meas), δv = Δv_meas − Δv_true,
 * δp = Δp_meas − Δp_true.
 */

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

#include "mimu/virtual_imu.hpp"

namespace mimu {

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat96 = Eigen::Matrix<double, 9, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

struct VimuState {
  Mat3 R_WV = Mat3::Identity();
  Vec3 p_W = Vec3::Zero();
  Vec3 v_W = Vec3::Zero();
  Vec3 bias_g = Vec3::Zero();
  Vec3 bias_a = Vec3::Zero();
};

struct PreintDelta {
  Mat3 dR = Mat3::Identity();
  Vec3 dv = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  Mat9 Sigma = Mat9::Zero();
  double dt = 0.0;  // count / freq
  std::size_t count = 0;
};

struct StepMatrices {
  Mat9 A = Mat9::Identity();
  Mat96 B = Mat96::Zero();
};

/// Fusion context shared by every step of a window.
struct PreintModel {
  VimuConfig cfg;
  FusionMatrices fm;
  VimuNoise noise;

  static PreintModel from_config(const VimuConfig& cfg);
};

/// ω̂ = ω̃ − b_g,  â = ã − b_a + T·S_a
std::pair<Vec3, Vec3> bias_correct(const VirtualSample& sample,
                                   const VimuState& state);

/// Discrete noise covariance of one step: blockdiag(Q_gV, Q_aV) / dt.
Mat6 discrete_noise(const VimuNoise& noise, double dt);

/**
 * A and B of one step taken from `prev` with corrected measurements.  The
 * δφ-dependent parts of B are evaluated at δφ = 0.
 */
StepMatrices step_matrices(const PreintDelta& prev, const Vec3& omega_hat,
                           const Vec3& accel_hat, const PreintModel& model,
                           double dt);

PreintDelta propagate_step(const PreintDelta& prev, const VirtualSample& sample,
                           const VimuState& state, const PreintModel& model,
                           double dt);

/// Accumulates every sample of `samples`; Σ starts at zero.
PreintDelta preintegrate(std::span<const VirtualSample> samples,
                         const VimuState& state, double freq,
                         const PreintModel& model);

/**
 * Consecutive half-open windows of round(interval * freq) samples.  A
 * trailing partial window is dropped.  Throws InvalidArgument if the window
 * would hold no sample.
 */
std::vector<PreintDelta> preintegrate_windows(const VirtualSeries& series,
                                              const VimuState& state,
                                              double interval,
                                              const PreintModel& model);

/// Composes a start state with a delta under gravity g; biases are carried.
VimuState predict_state(const VimuState& start, const PreintDelta& delta,
                        const Vec3& gravity);

/// [δφ; δv; δp] of `measured` against `truth`.
Vec9 preint_error(const PreintDelta& measured, const PreintDelta& truth);

}  // namespace mimu
