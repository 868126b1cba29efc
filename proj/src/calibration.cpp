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


#include "mimu/calibration.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <string>

#include "mimu/error.hpp"

namespace mimu {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// q (x) [cos(|d|/2), sin(|d|/2) d/|d|], i.e. R <- R Exp(d).
Quat retract(const Quat& q, const Vec3& delta) {
  const double angle = delta.norm();
  Quat dq = Quat::Identity();
  if (angle > 0.0) {
    dq = Quat(Eigen::AngleAxisd(angle, delta / angle));
  }
  return canonical(Quat(q * dq));
}

double rotation_cost(const CalibrationInput& in, const std::vector<double>& w,
                     const Mat3& R) {
  double cost = 0.0;
  for (std::size_t k = 0; k < in.series_a.size(); ++k) {
    cost += w[k] * (in.series_b.gyro[k] - R * in.series_a.gyro[k]).squaredNorm();
  }
  return cost;
}

std::vector<Vec3> angular_accels(const CalibrationInput& in, const Quat& q) {
  std::vector<Vec3> out(in.series_a.size(), Vec3::Zero());
  for (std::size_t k = 1; k + 1 < in.series_a.size(); ++k) {
    out[k] = estimate_angular_accel(q, in.series_a, in.series_b, k);
  }
  return out;
}

Mat3 lever_matrix(const Vec3& omega, const Vec3& omega_dot) {
  const Mat3 W = skew(omega);
  return W * W + skew(omega_dot);
}

double translation_cost(const CalibrationInput& in, const std::vector<double>& w,
                        const std::vector<Vec3>& omega_dot, const Extrinsic& x) {
  double cost = 0.0;
  for (std::size_t k = 1; k + 1 < in.series_a.size(); ++k) {
    cost += w[k] * residual_accel(x, in.series_a.gyro[k], omega_dot[k],
                                  in.series_a.accel[k], in.series_b.accel[k])
                       .squaredNorm();
  }
  return cost;
}

/**
 * Damped Gauss-Newton over the rotation only.  With `accel` set the accel
 * residuals (translation and angular accelerations held fixed) join the
 * gyro residuals in the cost.
 */
struct AccelTerms {
  const std::vector<double>* weights;
  const std::vector<Vec3>* omega_dot;
  Vec3 p_AB;
};

RotationEstimate refine_rotation(const CalibrationInput& in,
                                 const std::vector<double>& w_omega,
                                 const AccelTerms* accel, Quat q,
                                 const CalibrationOptions& opt) {
  const std::size_t n = in.series_a.size();
  auto total_cost = [&](const Quat& qq) {
    const Mat3 R = rotation_from_quat(qq);
    double c = rotation_cost(in, w_omega, R);
    if (accel) {
      c += translation_cost(in, *accel->weights, *accel->omega_dot,
                            Extrinsic(qq, accel->p_AB));
    }
    return c;
  };

  RotationEstimate est;
  double cost = total_cost(q);
  double lambda = opt.initial_damping;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Mat3 R = rotation_from_quat(q);
    Mat3 H = Mat3::Zero();
    Vec3 g = Vec3::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec3& wa = in.series_a.gyro[k];
      const Vec3 r = in.series_b.gyro[k] - R * wa;
      const Mat3 J = R * skew(wa);
      H.noalias() += w_omega[k] * J.transpose() * J;
      g.noalias() += w_omega[k] * J.transpose() * r;
    }
    if (accel) {
      for (std::size_t k = 1; k + 1 < n; ++k) {
        const Vec3 predicted =
            in.series_a.accel[k] +
            lever_matrix(in.series_a.gyro[k], (*accel->omega_dot)[k]) * accel->p_AB;
        const Vec3 r = in.series_b.accel[k] - R * predicted;
        const Mat3 J = R * skew(predicted);
        const double wk = (*accel->weights)[k];
        H.noalias() += wk * J.transpose() * J;
        g.noalias() += wk * J.transpose() * r;
      }
    }
    est.diagnostics.iterations = it + 1;

    // Marquardt scaling keeps the step invariant to a uniform weight scale.
    Mat3 damped = H;
    damped.diagonal() += lambda * H.diagonal();
    const Vec3 delta = -damped.ldlt().solve(g);
    if (!delta.allFinite()) {
      throw Error(ErrorKind::kNotConverged, "rotation step is not finite");
    }
    if (delta.norm() < opt.step_tolerance) {
      est.diagnostics.converged = true;
      break;
    }
    const Quat candidate = retract(q, delta);
    const double new_cost = total_cost(candidate);
    if (new_cost <= cost) {
      const double rel = (cost - new_cost) / std::max(cost, 1e-300);
      q = candidate;
      cost = new_cost;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (rel < opt.relative_cost_tolerance) {
        est.diagnostics.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
    }
  }
  if (!est.diagnostics.converged) {
    throw Error(ErrorKind::kNotConverged,
                "rotation solver did not converge in " +
                    std::to_string(opt.max_iterations) + " iterations");
  }
  est.q_BA = q;
  est.diagnostics.final_cost = cost;
  return est;
}

}  // namespace

void CalibrationInput::validate() const {
  series_a.validate();
  series_b.validate();
  if (std::abs(series_a.freq - series_b.freq) > 1e-9 * series_a.freq) {
    throw Error(ErrorKind::kRateMismatch, "calibration series rates differ");
  }
  if (series_a.size() != series_b.size()) {
    throw Error(ErrorKind::kLengthMismatch, "calibration series lengths differ");
  }
  if (series_a.size() < 3) {
    throw Error(ErrorKind::kInvalidArgument,
                "calibration needs at least three samples");
  }
  if (!noise_a.valid() || !noise_b.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "invalid noise specification");
  }
  const double dt = series_a.dt();
  if (!(sigma_omega(1, noise_a, noise_b, dt) > 0.0) ||
      !(sigma_accel(1, noise_a, noise_b, dt) > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "noise densities must give positive residual variances");
  }
}

Vec3 residual_omega(const Quat& q_BA, const Vec3& omega_a, const Vec3& omega_b) {
  return omega_b - q_BA * omega_a;
}

double sigma_omega(std::size_t t, const NoiseSpec& a, const NoiseSpec& b,
                   double dt) {
  const double td = static_cast<double>(t);
  return (a.sigma_g * a.sigma_g + b.sigma_g * b.sigma_g) / dt +
         (a.sigma_bg * a.sigma_bg + b.sigma_bg * b.sigma_bg) * dt * td;
}

double sigma_accel(std::size_t t, const NoiseSpec& a, const NoiseSpec& b,
                   double dt) {
  const double td = static_cast<double>(t);
  const double ga2 = a.sigma_g * a.sigma_g;
  const double gb2 = b.sigma_g * b.sigma_g;
  const double sum = ga2 + gb2;
  double gyro_term = 0.0;
  if (sum > 0.0) {
    const double white = ga2 * gb2 / (sum * dt);
    const double walk = (gb2 * gb2 * a.sigma_bg * a.sigma_bg +
                         ga2 * ga2 * b.sigma_bg * b.sigma_bg) /
                        (sum * sum) * dt * td;
    gyro_term = (white + walk) * (white + walk);
  }
  return gyro_term +
         (a.sigma_a * a.sigma_a + b.sigma_a * b.sigma_a) / dt +
         (a.sigma_ba * a.sigma_ba + b.sigma_ba * b.sigma_ba) * dt * td;
}

WeightSchedule weight_schedule(const CalibrationInput& input, double scale) {
  const std::size_t n = input.series_a.size();
  const double dt = input.series_a.dt();
  WeightSchedule w;
  w.omega.resize(n);
  w.accel.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    w.omega[k] = scale / sigma_omega(k + 1, input.noise_a, input.noise_b, dt);
    w.accel[k] = scale / sigma_accel(k + 1, input.noise_a, input.noise_b, dt);
  }
  return w;
}

Vec3 estimate_angular_accel(const Quat& q_BA, const ImuSeries& a,
                            const ImuSeries& b, std::size_t k) {
  if (k == 0 || k + 1 >= a.size() || k + 1 >= b.size()) {
    throw Error(ErrorKind::kBoundaryIndex,
                "angular acceleration needs both neighbours of sample " +
                    std::to_string(k));
  }
  const Quat q_AB = q_BA.conjugate();
  return (a.freq / 4.0) * (q_AB * b.gyro[k + 1] - q_AB * b.gyro[k - 1] +
                           a.gyro[k + 1] - a.gyro[k - 1]);
}

Vec3 residual_accel(const Extrinsic& x, const Vec3& omega_a,
                    const Vec3& omega_dot_a, const Vec3& accel_a,
                    const Vec3& accel_b) {
  return accel_b -
         x.q_BA * (accel_a + lever_matrix(omega_a, omega_dot_a) * x.p_AB);
}

double gyro_excitation(const std::vector<Vec3>& gyro) {
  if (gyro.empty()) return 0.0;
  Mat3 m = Mat3::Zero();
  for (const Vec3& w : gyro) m.noalias() += w * w.transpose();
  m /= static_cast<double>(gyro.size());
  return Eigen::SelfAdjointEigenSolver<Mat3>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

Quat procrustes_rotation(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                         const std::vector<double>& weights) {
  Mat3 cross = Mat3::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    cross.noalias() += weights[k] * b[k] * a[k].transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1 : 1;
  return quat_from_rotation(Mat3(svd.matrixU() * d * svd.matrixV().transpose()));
}

RotationEstimate estimate_rotation(const CalibrationInput& input,
                                   const CalibrationOptions& options) {
  const auto t0 = Clock::now();
  input.validate();
  const double excitation = gyro_excitation(input.series_a.gyro);
  if (excitation < options.min_excitation) {
    throw Error(ErrorKind::kDegenerateMotion,
                "gyro excitation " + std::to_string(excitation) +
                    " (rad/s)^2 below " + std::to_string(options.min_excitation) +
                    ": rotation must span at least two axes");
  }
  const WeightSchedule w = weight_schedule(input, options.weight_scale);
  const Quat init = options.procrustes_init
                        ? procrustes_rotation(input.series_a.gyro,
                                              input.series_b.gyro, w.omega)
                        : Quat::Identity();
  RotationEstimate est = refine_rotation(input, w.omega, nullptr, init, options);
  est.diagnostics.elapsed_ms = ms_since(t0);
  return est;
}

TranslationEstimate estimate_translation(const CalibrationInput& input,
                                         const Quat& q_BA,
                                         const CalibrationOptions& options) {
  const auto t0 = Clock::now();
  input.validate();
  const std::size_t n = input.series_a.size();
  const WeightSchedule w = weight_schedule(input, options.weight_scale);
  const Mat3 R_AB = rotation_from_quat(q_BA).transpose();
  const std::vector<Vec3> omega_dot = angular_accels(input, q_BA);

  Mat3 H = Mat3::Zero();
  Vec3 rhs = Vec3::Zero();
  double weight_sum = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Mat3 K = lever_matrix(input.series_a.gyro[k], omega_dot[k]);
    const Vec3 y = R_AB * input.series_b.accel[k] - input.series_a.accel[k];
    H.noalias() += w.accel[k] * K.transpose() * K;
    rhs.noalias() += w.accel[k] * K.transpose() * y;
    weight_sum += w.accel[k];
  }

  const Vec3 eig =
      Eigen::SelfAdjointEigenSolver<Mat3>(H / weight_sum, Eigen::EigenvaluesOnly)
          .eigenvalues();
  if (!(eig.maxCoeff() > 0.0) || eig.minCoeff() <= 1e-12 * eig.maxCoeff()) {
    throw Error(ErrorKind::kDegenerateMotion,
                "lever-arm terms are rank deficient: translation unobservable");
  }
  const Eigen::LLT<Mat3> llt(H);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularNormalEquations,
                "translation normal equations are not positive definite");
  }

  TranslationEstimate est;
  est.p_AB = llt.solve(rhs);
  if (!est.p_AB.allFinite()) {
    throw Error(ErrorKind::kSingularNormalEquations,
                "translation solve produced non-finite values");
  }
  est.diagnostics.iterations = 1;
  est.diagnostics.converged = true;
  est.diagnostics.final_cost =
      translation_cost(input, w.accel, omega_dot, Extrinsic(q_BA, est.p_AB));
  est.diagnostics.elapsed_ms = ms_since(t0);
  return est;
}

CalibrationResult calibrate(const CalibrationInput& input,
                            const CalibrationOptions& options) {
  RotationEstimate rot = estimate_rotation(input, options);
  TranslationEstimate trans = estimate_translation(input, rot.q_BA, options);

  if (options.refine_pass) {
    const auto t0 = Clock::now();
    const WeightSchedule w = weight_schedule(input, options.weight_scale);
    const std::vector<Vec3> omega_dot = angular_accels(input, rot.q_BA);
    const AccelTerms terms{&w.accel, &omega_dot, trans.p_AB};
    RotationEstimate joint =
        refine_rotation(input, w.omega, &terms, rot.q_BA, options);
    joint.diagnostics.elapsed_ms = rot.diagnostics.elapsed_ms + ms_since(t0);
    joint.diagnostics.iterations += rot.diagnostics.iterations;
    joint.diagnostics.final_cost =
        rotation_cost(input, w.omega, rotation_from_quat(joint.q_BA));
    rot = joint;
    const double trans_ms = trans.diagnostics.elapsed_ms;
    trans = estimate_translation(input, rot.q_BA, options);
    trans.diagnostics.elapsed_ms += trans_ms;
    trans.diagnostics.iterations += 1;
  }

  CalibrationResult result;
  result.extrinsic = Extrinsic(rot.q_BA, trans.p_AB);
  result.rot_iterations = rot.diagnostics.iterations;
  result.trans_iterations = trans.diagnostics.iterations;
  result.final_rot_cost = rot.diagnostics.final_cost;
  result.final_trans_cost = trans.diagnostics.final_cost;
  result.elapsed_rot_ms = rot.diagnostics.elapsed_ms;
  result.elapsed_trans_ms = trans.diagnostics.elapsed_ms;
  return result;
}

}  // namespace mimu
