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

#include <cstddef>
#include <vector>

#include "mimu/types.hpp"

namespace mimu {

/**
 * Two synchronized IMU series plus their noise densities.  Sample indices in
 * this module are 0-based; the covariance schedules use t = k + 1, the
 * number of samples since the start of the window.
 */
struct CalibrationInput {
  ImuSeries series_a;
  ImuSeries series_b;
  NoiseSpec noise_a;
  NoiseSpec noise_b;

  /// Equal rate and length, at least three samples, positive variances.
  void validate() const;
};

struct CalibrationOptions {
  int max_iterations = 100;
  double relative_cost_tolerance = 1e-12;
  double step_tolerance = 1e-10;
  double initial_damping = 1e-4;
  /// Smallest eigenvalue of the mean gyro second moment, (rad/s)^2.
  double min_excitation = 1e-4;
  /// Start the rotation solver from the closed-form Procrustes solution;
  /// otherwise from identity.
  bool procrustes_init = true;
  /// After translation, re-refine the rotation on gyro and accel residuals
  /// together and re-solve the translation once.
  bool refine_pass = false;
  /// Multiplies every weight; the solution must not depend on it.
  double weight_scale = 1.0;
};

struct StageDiagnostics {
  int iterations = 0;
  double final_cost = 0.0;
  double elapsed_ms = 0.0;
  bool converged = false;
};

struct RotationEstimate {
  Quat q_BA = Quat::Identity();
  StageDiagnostics diagnostics;
};

struct TranslationEstimate {
  Vec3 p_AB = Vec3::Zero();
  StageDiagnostics diagnostics;
};

struct CalibrationResult {
  Extrinsic extrinsic;
  int rot_iterations = 0;
  int trans_iterations = 0;
  double final_rot_cost = 0.0;
  double final_trans_cost = 0.0;
  double elapsed_rot_ms = 0.0;
  double elapsed_trans_ms = 0.0;
};

/// r = w_B - q (x) w_A (x) q^-1
Vec3 residual_omega(const Quat& q_BA, const Vec3& omega_a, const Vec3& omega_b);

/// Isotropic gyro-residual variance: (sgA^2 + sgB^2)/dt + (sbgA^2 + sbgB^2) dt t.
double sigma_omega(std::size_t t, const NoiseSpec& noise_a,
                   const NoiseSpec& noise_b, double dt);

/**
 * Isotropic accel-residual variance.  The virtual-gyro term is squared as
 * written in the source model, then the accelerometer noise and bias terms
 * are added.  With no gyro noise at all the first term is taken as zero.
 */
double sigma_accel(std::size_t t, const NoiseSpec& noise_a,
                   const NoiseSpec& noise_b, double dt);

/// Per-sample weights 1/sigma for both stages.
struct WeightSchedule {
  std::vector<double> omega;
  std::vector<double> accel;
};
WeightSchedule weight_schedule(const CalibrationInput& input, double scale = 1.0);

/**
 * Angular acceleration of A at sample k from a central difference of both
 * gyros, B rotated into A:
 *   (freq/4) (q^-1 w_B(k+1) - q^-1 w_B(k-1) + w_A(k+1) - w_A(k-1))
 * Throws BoundaryIndex for the first and last sample.
 */
Vec3 estimate_angular_accel(const Quat& q_BA, const ImuSeries& series_a,
                            const ImuSeries& series_b, std::size_t k);

/// r = a_B - q (a_A + [w_A]^2 p + [w_dot_A] p)
Vec3 residual_accel(const Extrinsic& x, const Vec3& omega_a,
                    const Vec3& omega_dot_a, const Vec3& accel_a,
                    const Vec3& accel_b);

/// Smallest eigenvalue of (1/T) sum w w^T over the gyro samples.
double gyro_excitation(const std::vector<Vec3>& gyro);

/**
 * Weighted orthogonal Procrustes: the rotation R minimizing
 * sum_t w_t |b_t - R a_t|^2, via SVD of sum_t w_t b_t a_t^T.
 */
Quat procrustes_rotation(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                         const std::vector<double>& weights);

/**
 * Relative orientation from the gyros alone: damped Gauss-Newton on the
 * weighted residual_omega cost with a right-multiplicative tangent update.
 * Throws DegenerateMotion when the gyro excitation check fails and
 * NotConverged after max_iterations.
 */
RotationEstimate estimate_rotation(const CalibrationInput& input,
                                   const CalibrationOptions& options = {});

/**
 * Relative translation with the rotation held fixed.  The accel residual is
 * affine in p, so the weighted problem is solved exactly through its normal
 * equations.  The first and last samples are skipped (no angular
 * acceleration).  Throws DegenerateMotion or SingularNormalEquations.
 */
TranslationEstimate estimate_translation(const CalibrationInput& input,
                                         const Quat& q_BA,
                                         const CalibrationOptions& options = {});

/// Rotation stage, then translation stage.  Noise and bias are never estimated.
CalibrationResult calibrate(const CalibrationInput& input,
                            const CalibrationOptions& options = {});

}  // namespace mimu
