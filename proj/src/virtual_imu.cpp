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


#include "mimu/virtual_imu.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "mimu/error.hpp"

namespace mimu {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::MatrixXd stack_rotations(const VimuConfig& cfg,
                                const Eigen::VectorXd& whitening) {
  Eigen::MatrixXd S(3 * cfg.size(), 3);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    S.block<3, 3>(3 * i, 0) = whitening(3 * i) * cfg.members[i].R_IV;
  }
  return S;
}

Eigen::VectorXd whitening(const VimuConfig& cfg, double NoiseSpec::*sigma) {
  Eigen::VectorXd w(3 * cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    w.segment<3>(3 * i).setConstant(1.0 / (cfg.members[i].noise.*sigma));
  }
  return w;
}

// (SᵀS)⁻¹Sᵀ with a conditioning check.
Eigen::MatrixXd checked_pinv(const Eigen::MatrixXd& S, const char* which,
                             double& condition) {
  const Mat3 normal = S.transpose() * S;
  if (!normal.allFinite()) {
    throw Error(ErrorKind::kSingularFusion,
                std::string(which) + " normal matrix is not finite (zero sigma?)");
  }
  const Vec3 eig =
      Eigen::SelfAdjointEigenSolver<Mat3>(normal, Eigen::EigenvaluesOnly)
          .eigenvalues();
  condition = eig.maxCoeff() / eig.minCoeff();
  if (!(eig.minCoeff() > 0.0) || !(condition <= kMaxCondition)) {
    throw Error(ErrorKind::kSingularFusion,
                std::string(which) + " normal matrix condition number " +
                    std::to_string(condition) + " exceeds 1e12");
  }
  Eigen::MatrixXd pinv = normal.ldlt().solve(S.transpose());
  if (!pinv.allFinite()) {
    throw Error(ErrorKind::kSingularFusion,
                std::string(which) + " pseudo-inverse is not finite");
  }
  return pinv;
}

Eigen::VectorXd stack(const std::vector<Vec3>& v) {
  Eigen::VectorXd out(3 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.segment<3>(3 * i) = v[i];
  return out;
}

}  // namespace

void VimuConfig::validate() const {
  if (members.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "VimuConfig has no members");
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    const VimuMember& m = members[i];
    if (!is_rotation(m.R_IV, 1e-9) || !m.p_VI.allFinite() || !m.noise.valid()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "VimuConfig member " + std::to_string(i) + " is invalid");
    }
  }
}

bool consistent_with(const VimuConfig& cfg, const Extrinsic& ext, double tol) {
  if (cfg.size() != 2) return false;
  const VimuMember& a = cfg.members[0];
  const VimuMember& b = cfg.members[1];
  const Mat3 R_BA = b.R_IV * a.R_IV.transpose();
  const Vec3 p_AB = a.R_IV * (b.p_VI - a.p_VI);
  return (R_BA - ext.R_BA()).cwiseAbs().maxCoeff() <= tol &&
         (p_AB - ext.p_AB).cwiseAbs().maxCoeff() <= tol;
}

VimuConfig midpoint_frame(const Extrinsic& ext, const NoiseSpec& noise_a,
                          const NoiseSpec& noise_b) {
  VimuConfig cfg;
  cfg.members.push_back({Mat3::Identity(), -0.5 * ext.p_AB, noise_a});
  cfg.members.push_back({ext.R_BA(), 0.5 * ext.p_AB, noise_b});
  return cfg;
}

VimuConfig frame_from_mounts(const std::vector<Extrinsic>& mounts,
                             const std::vector<NoiseSpec>& noise,
                             const Vec3& origin) {
  if (mounts.size() != noise.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "frame_from_mounts: one NoiseSpec per mount required");
  }
  VimuConfig cfg;
  for (std::size_t i = 0; i < mounts.size(); ++i) {
    cfg.members.push_back({mounts[i].R_BA(), mounts[i].p_AB - origin, noise[i]});
  }
  return cfg;
}

Eigen::MatrixXd FusionMatrices::gyro_raw() const {
  return N_pinv * gyro_whitening.asDiagonal();
}

Eigen::MatrixXd FusionMatrices::accel_raw() const {
  return T * accel_whitening.asDiagonal();
}

FusionMatrices build_fusion(const VimuConfig& cfg) {
  cfg.validate();
  FusionMatrices fm;
  fm.gyro_whitening = whitening(cfg, &NoiseSpec::sigma_g);
  fm.accel_whitening = whitening(cfg, &NoiseSpec::sigma_a);
  fm.N = stack_rotations(cfg, fm.gyro_whitening);
  fm.M = stack_rotations(cfg, fm.accel_whitening);
  fm.N_pinv = checked_pinv(fm.N, "gyro", fm.condition_gyro);
  fm.T = checked_pinv(fm.M, "accel", fm.condition_accel);
  return fm;
}

Vec3 fuse_gyro(const FusionMatrices& fm, const std::vector<Vec3>& gyro) {
  return fm.N_pinv * fm.gyro_whitening.cwiseProduct(stack(gyro));
}

Vec3 fuse_gyro(const FusionMatrices& fm, const Vec3& omega_a,
               const Vec3& omega_b) {
  return fuse_gyro(fm, std::vector<Vec3>{omega_a, omega_b});
}

Eigen::VectorXd lever_arm_stack(const VimuConfig& cfg, const Vec3& omega_v,
                                const Vec3& omega_dot_v) {
  const Mat3 W = skew(omega_v);
  const Mat3 K = W * W + skew(omega_dot_v);
  Eigen::VectorXd S(3 * cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const VimuMember& m = cfg.members[i];
    S.segment<3>(3 * i) = m.R_IV * (K * m.p_VI) / m.noise.sigma_a;
  }
  return S;
}

Vec3 fuse_accel(const FusionMatrices& fm, const VimuConfig& cfg,
                const std::vector<Vec3>& accel, const Vec3& omega_v,
                const Vec3& omega_dot_v) {
  return fm.T * (fm.accel_whitening.cwiseProduct(stack(accel)) -
                 lever_arm_stack(cfg, omega_v, omega_dot_v));
}

VimuNoise virtual_covariances(const VimuConfig& cfg, const FusionMatrices& fm) {
  const std::size_t n = cfg.size();
  Eigen::VectorXd bg(3 * n), ba(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const NoiseSpec& s = cfg.members[i].noise;
    bg.segment<3>(3 * i).setConstant(s.sigma_bg * s.sigma_bg / (s.sigma_g * s.sigma_g));
    ba.segment<3>(3 * i).setConstant(s.sigma_ba * s.sigma_ba / (s.sigma_a * s.sigma_a));
  }
  VimuNoise q;
  q.Q_gV = fm.N_pinv * fm.N_pinv.transpose();
  q.Q_bgV = fm.N_pinv * bg.asDiagonal() * fm.N_pinv.transpose();
  q.Q_aV = fm.T * fm.T.transpose();
  q.Q_baV = fm.T * ba.asDiagonal() * fm.T.transpose();
  return q;
}

VimuNoise virtual_covariances(const VimuConfig& cfg) {
  return virtual_covariances(cfg, build_fusion(cfg));
}

Eigen::MatrixXd psi_matrix(const VimuConfig& cfg, const Vec3& omega_hat) {
  const Mat3 W = skew(omega_hat);
  Eigen::MatrixXd psi(3 * cfg.size(), 3);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const VimuMember& m = cfg.members[i];
    psi.block<3, 3>(3 * i, 0) =
        m.R_IV * (-W * skew(m.p_VI) - skew(W * m.p_VI));
  }
  return psi;
}

ImuSeries VirtualSeries::to_imu_series() const {
  ImuSeries s;
  s.freq = freq;
  s.start_ns = start_ns;
  s.gyro.reserve(samples.size());
  s.accel.reserve(samples.size());
  for (const VirtualSample& v : samples) {
    s.gyro.push_back(v.omega);
    s.accel.push_back(v.accel);
  }
  return s;
}

VirtualSeries fuse_series(const VimuConfig& cfg, const FusionMatrices& fm,
                          const std::vector<ImuSeries>& inputs,
                          const Vec3& gyro_bias_estimate) {
  if (inputs.size() != cfg.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "fuse_series: " + std::to_string(inputs.size()) +
                    " series for " + std::to_string(cfg.size()) + " members");
  }
  const ImuSeries& first = inputs.front();
  for (const ImuSeries& s : inputs) {
    s.validate();
    if (s.size() != first.size()) {
      throw Error(ErrorKind::kLengthMismatch, "fuse_series: series lengths differ");
    }
    if (std::abs(s.freq - first.freq) > 1e-9 * first.freq) {
      throw Error(ErrorKind::kRateMismatch, "fuse_series: series rates differ");
    }
  }
  const std::size_t n = first.size();
  if (n < 3) {
    throw Error(ErrorKind::kInvalidArgument,
                "fuse_series needs at least three samples");
  }

  std::vector<Vec3> omega(n);
  std::vector<Vec3> buf(inputs.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < inputs.size(); ++i) buf[i] = inputs[i].gyro[k];
    omega[k] = fuse_gyro(fm, buf);
  }

  VirtualSeries out;
  out.freq = first.freq;
  out.start_ns = first.time_ns(1);
  out.samples.reserve(n - 2);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    VirtualSample v;
    v.omega = omega[k];
    v.omega_dot = (omega[k + 1] - omega[k - 1]) * (0.5 * first.freq);
    for (std::size_t i = 0; i < inputs.size(); ++i) buf[i] = inputs[i].accel[k];
    v.accel = fuse_accel(fm, cfg, buf, v.omega, v.omega_dot);
    v.correction =
        fm.T * (lever_arm_stack(cfg, v.omega, v.omega_dot) -
                lever_arm_stack(cfg, v.omega - gyro_bias_estimate, v.omega_dot));
    out.samples.push_back(v);
  }
  return out;
}

}  // namespace mimu
