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
 * @file so3.hpp
 * @brief Rotation algebra on SO(3): skew operator, Exp/Log, right Jacobian and
 * quaternion conversions.
 *
 * FRAME CONVENTION
 * ================
 * A rotation written R_AV (in text: ᴬR_V) maps coordinates expressed in
 * frame V into frame A:  x_A = R_AV * x_V.  Every module in this library
 * names rotations in that direction.
 *
 * QUATERNION CONVENTION
 * =====================
 * Hamilton quaternions, stored by Eigen as (w, x, y, z).  Functions that
 * return a quaternion return the canonical representative with w >= 0.
 */

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mimu {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
using Quat = Eigen::Quaterniond;

/// Below this rotation angle Exp/Log/J_r switch to their Taylor expansions.
inline constexpr double kSmallAngle = 1e-8;

/// skew(v) * u == v.cross(u)
template <typename Derived>
Mat3T<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  Mat3T<Scalar> m;
  m << Scalar(0), -v(2), v(1),
       v(2), Scalar(0), -v(0),
       -v(1), v(0), Scalar(0);
  return m;
}

/// Inverse of skew() for an antisymmetric input.
template <typename Derived>
Vec3T<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& m) {
  return Vec3T<typename Derived::Scalar>(m(2, 1), m(0, 2), m(1, 0));
}

/// Rodrigues formula; 2nd-order Taylor series near the origin.
template <typename Derived>
Mat3T<typename Derived::Scalar> exp_so3(const Eigen::MatrixBase<Derived>& phi) {
  using Scalar = typename Derived::Scalar;
  const Mat3T<Scalar> K = skew(phi);
  const Scalar theta = phi.norm();
  if (theta < Scalar(kSmallAngle)) {
    return Mat3T<Scalar>::Identity() + K + Scalar(0.5) * K * K;
  }
  const Scalar half_sin = std::sin(Scalar(0.5) * theta);
  const Scalar a = std::sin(theta) / theta;
  const Scalar b = Scalar(2) * half_sin * half_sin / (theta * theta);
  return Mat3T<Scalar>::Identity() + a * K + b * K * K;
}

/**
 * Rotation vector of R with norm in [0, pi].
 *
 * The angle comes from atan2 of the antisymmetric and symmetric parts, which
 * stays well conditioned at both ends of the range.  Close to pi the axis is
 * read off the dominant column of the symmetric part (n n^T) and its sign is
 * taken from the antisymmetric part.
 */
template <typename Derived>
Vec3T<typename Derived::Scalar> log_so3(const Eigen::MatrixBase<Derived>& R) {
  using Scalar = typename Derived::Scalar;
  const Vec3T<Scalar> axis_sin = Scalar(0.5) * vee(R - R.transpose());
  const Scalar s = axis_sin.norm();
  const Scalar c = Scalar(0.5) * (R.trace() - Scalar(1));
  const Scalar theta = std::atan2(s, c);

  if (theta < Scalar(kSmallAngle)) {
    // R - R^T = 2 sin(theta) [n] ~ 2 [phi] (1 - theta^2 / 6)
    return axis_sin * (Scalar(1) + theta * theta / Scalar(6));
  }
  if (theta > Scalar(std::numbers::pi) - Scalar(1e-3)) {
    const Mat3T<Scalar> sym = Scalar(0.5) * (R + R.transpose());
    const Mat3T<Scalar> nnT =
        (sym - c * Mat3T<Scalar>::Identity()) / (Scalar(1) - c);
    Eigen::Index k = 0;
    nnT.diagonal().maxCoeff(&k);
    Vec3T<Scalar> n = nnT.col(k) / std::sqrt(nnT(k, k));
    if (n.dot(axis_sin) < Scalar(0)) {
      n = -n;
    }
    return theta * n.normalized();
  }
  return axis_sin * (theta / s);
}

/**
 * Right Jacobian of SO(3):
 *   Exp(phi + d) ~= Exp(phi) * Exp(J_r(phi) * d)
 */
template <typename Derived>
Mat3T<typename Derived::Scalar> right_jacobian(
    const Eigen::MatrixBase<Derived>& phi) {
  using Scalar = typename Derived::Scalar;
  const Mat3T<Scalar> K = skew(phi);
  const Scalar theta = phi.norm();
  if (theta < Scalar(kSmallAngle)) {
    return Mat3T<Scalar>::Identity() - Scalar(0.5) * K +
           (K * K) / Scalar(6);
  }
  const Scalar half_sin = std::sin(Scalar(0.5) * theta);
  const Scalar t2 = theta * theta;
  const Scalar a = Scalar(2) * half_sin * half_sin / t2;
  const Scalar b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3T<Scalar>::Identity() - a * K + b * K * K;
}

/// Flip to the w >= 0 hemisphere and normalize.
template <typename Scalar>
Eigen::Quaternion<Scalar> canonical(const Eigen::Quaternion<Scalar>& q) {
  Eigen::Quaternion<Scalar> out = q.normalized();
  if (out.w() < Scalar(0)) {
    out.coeffs() = -out.coeffs();
  }
  return out;
}

template <typename Derived>
Eigen::Quaternion<typename Derived::Scalar> quat_from_rotation(
    const Eigen::MatrixBase<Derived>& R) {
  using Scalar = typename Derived::Scalar;
  const Mat3T<Scalar> m = R;
  return canonical(Eigen::Quaternion<Scalar>(m));
}

template <typename Scalar>
Mat3T<Scalar> rotation_from_quat(const Eigen::Quaternion<Scalar>& q) {
  return q.normalized().toRotationMatrix();
}

/// Angle of R_a^T * R_b, in [0, pi].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar geodesic_distance(
    const Eigen::MatrixBase<DerivedA>& Ra,
    const Eigen::MatrixBase<DerivedB>& Rb) {
  return log_so3(Ra.transpose() * Rb).norm();
}

template <typename Scalar>
Scalar geodesic_distance(const Eigen::Quaternion<Scalar>& qa,
                         const Eigen::Quaternion<Scalar>& qb) {
  return geodesic_distance(rotation_from_quat(qa), rotation_from_quat(qb));
}

/// R^T R = I and det(R) = +1, both within tol.
template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& R, double tol = 1e-9) {
  using Scalar = typename Derived::Scalar;
  if (!R.allFinite()) {
    return false;
  }
  const Scalar ortho =
      (R.transpose() * R - Mat3T<Scalar>::Identity()).cwiseAbs().maxCoeff();
  return ortho <= Scalar(tol) &&
         std::abs(R.determinant() - Scalar(1)) <= Scalar(tol);
}

/// Re-orthonormalize a nearly orthogonal matrix through its quaternion.
template <typename Derived>
Mat3T<typename Derived::Scalar> orthonormalize(
    const Eigen::MatrixBase<Derived>& R) {
  return rotation_from_quat(quat_from_rotation(R));
}

}  // namespace mimu
