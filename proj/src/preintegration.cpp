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


#include "mimu/preintegration.hpp"

#include <cmath>
#include <string>

#include "mimu/error.hpp"

namespace mimu {

PreintModel PreintModel::from_config(const VimuConfig& cfg) {
  PreintModel m;
  m.cfg = cfg;
  m.fm = build_fusion(cfg);
  m.noise = virtual_covariances(cfg, m.fm);
  return m;
}

std::pair<Vec3, Vec3> bias_correct(const VirtualSample& sample,
                                   const VimuState& state) {
  return {sample.omega - state.bias_g,
          sample.accel - state.bias_a + sample.correction};
}

Mat6 discrete_noise(const VimuNoise& noise, double dt) {
  Mat6 q = Mat6::Zero();
  q.topLeftCorner<3, 3>() = noise.Q_gV / dt;
  q.bottomRightCorner<3, 3>() = noise.Q_aV / dt;
  return q;
}

StepMatrices step_matrices(const PreintDelta& prev, const Vec3& omega_hat,
                           const Vec3& accel_hat, const PreintModel& model,
                           double dt) {
  const Mat3& R = prev.dR;
  const Mat3 Ra = R * skew(accel_hat);
  const Vec3 phi = omega_hat * dt;
  const Mat3 TPsi = model.fm.accel_raw() * psi_matrix(model.cfg, omega_hat);

  StepMatrices s;
  s.A.block<3, 3>(0, 0) = exp_so3(phi).transpose();
  s.A.block<3, 3>(3, 0) = -Ra * dt;
  s.A.block<3, 3>(6, 0) = -0.5 * Ra * dt * dt;
  s.A.block<3, 3>(6, 3) = Mat3::Identity() * dt;

  s.B.block<3, 3>(0, 0) = right_jacobian(phi) * dt;
  s.B.block<3, 3>(3, 3) = R * dt;
  s.B.block<3, 3>(6, 0) = -0.5 * R * TPsi * dt * dt;
  s.B.block<3, 3>(6, 3) = 0.5 * R * dt * dt;
  return s;
}

PreintDelta propagate_step(const PreintDelta& prev, const VirtualSample& sample,
                           const VimuState& state, const PreintModel& model,
                           double dt) {
  const auto [w, a] = bias_correct(sample, state);
  const StepMatrices m = step_matrices(prev, w, a, model, dt);

  PreintDelta next;
  next.dp = prev.dp + prev.dv * dt + 0.5 * prev.dR * a * dt * dt;
  next.dv = prev.dv + prev.dR * a * dt;
  next.dR = prev.dR * exp_so3(w * dt);
  next.Sigma = m.A * prev.Sigma * m.A.transpose() +
               m.B * discrete_noise(model.noise, dt) * m.B.transpose();
  next.Sigma = 0.5 * (next.Sigma + next.Sigma.transpose()).eval();
  next.count = prev.count + 1;
  next.dt = prev.dt + dt;
  return next;
}

PreintDelta preintegrate(std::span<const VirtualSample> samples,
                         const VimuState& state, double freq,
                         const PreintModel& model) {
  if (!(freq > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "preintegrate: freq must be > 0");
  }
  const double dt = 1.0 / freq;
  PreintDelta d;
  for (const VirtualSample& s : samples) d = propagate_step(d, s, state, model, dt);
  d.dt = static_cast<double>(d.count) / freq;
  return d;
}

std::vector<PreintDelta> preintegrate_windows(const VirtualSeries& series,
                                              const VimuState& state,
                                              double interval,
                                              const PreintModel& model) {
  const long long per = std::llround(interval * series.freq);
  if (!(interval > 0.0) || per < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "keyframe interval " + std::to_string(interval) +
                    " s holds no sample");
  }
  const auto n = static_cast<std::size_t>(per);
  std::vector<PreintDelta> out;
  const std::span<const VirtualSample> all(series.samples);
  for (std::size_t i = 0; i + n <= all.size(); i += n) {
    out.push_back(preintegrate(all.subspan(i, n), state, series.freq, model));
  }
  return out;
}

VimuState predict_state(const VimuState& start, const PreintDelta& delta,
                        const Vec3& gravity) {
  const double t = delta.dt;
  VimuState out = start;
  out.R_WV = start.R_WV * delta.dR;
  out.v_W = start.v_W + gravity * t + start.R_WV * delta.dv;
  out.p_W = start.p_W + start.v_W * t + 0.5 * gravity * t * t +
            start.R_WV * delta.dp;
  return out;
}

Vec9 preint_error(const PreintDelta& measured, const PreintDelta& truth) {
  Vec9 e;
  e.segment<3>(0) = log_so3(truth.dR.transpose() * measured.dR);
  e.segment<3>(3) = measured.dv - truth.dv;
  e.segment<3>(6) = measured.dp - truth.dp;
  return e;
}

}  // namespace mimu
