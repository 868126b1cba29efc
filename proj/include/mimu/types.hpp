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

#include <cmath>
#include <cstdint>
#include <vector>

#include "mimu/so3.hpp"

namespace mimu {

/**
 * Continuous-time noise densities of one IMU.
 *
 * sigma_g  [rad/s/sqrt(Hz)]   gyro white noise
 * sigma_a  [m/s^2/sqrt(Hz)]   accel white noise
 * sigma_bg [rad/s^2/sqrt(Hz)] gyro bias random walk
 * sigma_ba [m/s^3/sqrt(Hz)]   accel bias random walk
 */
struct NoiseSpec {
  double sigma_g = 1.7e-4;
  double sigma_a = 2.0e-3;
  double sigma_bg = 1.0e-5;
  double sigma_ba = 3.0e-4;
  Vec3 initial_bias_g = Vec3::Zero();
  Vec3 initial_bias_a = Vec3::Zero();

  static NoiseSpec zero() {
    NoiseSpec n;
    n.sigma_g = n.sigma_a = n.sigma_bg = n.sigma_ba = 0.0;
    return n;
  }

  bool valid() const {
    return sigma_g >= 0.0 && sigma_a >= 0.0 && sigma_bg >= 0.0 &&
           sigma_ba >= 0.0 && std::isfinite(sigma_g) &&
           std::isfinite(sigma_a) && std::isfinite(sigma_bg) &&
           std::isfinite(sigma_ba) && initial_bias_g.allFinite() &&
           initial_bias_a.allFinite();
  }
};

/**
 * Rigid transform between two sensor frames A and B.
 *
 * q_BA rotates A-frame vectors into B (ᴮq_A); p_AB is the origin of B
 * expressed in A (ᴬp_B).  The same type describes how a sensor is mounted on
 * a body: with A = body and B = sensor, q is ᴵq_body and p is the sensor
 * position in body coordinates.
 */
struct Extrinsic {
  Quat q_BA = Quat::Identity();
  Vec3 p_AB = Vec3::Zero();

  Extrinsic() = default;
  Extrinsic(const Quat& q, const Vec3& p) : q_BA(canonical(q)), p_AB(p) {}

  static Extrinsic identity() { return {}; }

  Mat3 R_BA() const { return rotation_from_quat(q_BA); }
  Mat3 R_AB() const { return R_BA().transpose(); }
};

/// Relative extrinsic of sensor `b` w.r.t. sensor `a`, both mounted on one body.
inline Extrinsic relative_extrinsic(const Extrinsic& mount_a,
                                    const Extrinsic& mount_b) {
  const Mat3 R_a_body = mount_a.R_BA();
  const Mat3 R_b_body = mount_b.R_BA();
  const Mat3 R_ba = R_b_body * R_a_body.transpose();
  const Vec3 p_ab = R_a_body * (mount_b.p_AB - mount_a.p_AB);
  return {quat_from_rotation(R_ba), p_ab};
}

/**
 * Fixed-rate, synchronized gyro/accel samples of one IMU.  Sample k is taken
 * at start_ns + k / freq.
 */
struct ImuSeries {
  double freq = 200.0;
  std::int64_t start_ns = 0;
  std::vector<Vec3> gyro;
  std::vector<Vec3> accel;

  std::size_t size() const { return gyro.size(); }
  bool empty() const { return gyro.empty(); }
  double dt() const { return 1.0 / freq; }

  std::int64_t time_ns(std::size_t k) const {
    return start_ns + std::llround(static_cast<double>(k) * 1e9 / freq);
  }

  /// Samples [first, first + count).
  ImuSeries slice(std::size_t first, std::size_t count) const;

  /// Throws InvalidArgument on freq <= 0, length mismatch or non-finite data.
  void validate() const;
};

}  // namespace mimu
