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


#include "mimu/config.hpp"

#include <string>

#include "mimu/error.hpp"
#include "mimu/imu_csv.hpp"

namespace mimu {

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void read_vec(const json& j, const char* key, Vec3& field) {
  if (j.contains(key)) field = vec_from_json(j.at(key));
}

json diagnostics(double cost, int iterations, double elapsed_ms) {
  return {{"cost", cost}, {"iterations", iterations}, {"elapsed_ms", elapsed_ms}};
}

}  // namespace

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::kFormatError, "expected a 3-vector, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json mat_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec_to_json(m.row(r).transpose()));
  return rows;
}

Mat3 mat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::kFormatError, "expected a 3x3 matrix, got " + j.dump());
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec_from_json(j[r]).transpose();
  return m;
}

json quat_to_json(const Quat& q) {
  return json::array({q.w(), q.x(), q.y(), q.z()});
}

Quat quat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorKind::kFormatError,
                "expected a quaternion [w, x, y, z], got " + j.dump());
  }
  const Quat q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
               j[3].get<double>());
  if (!(q.norm() > 0.0)) {
    throw Error(ErrorKind::kFormatError, "zero quaternion");
  }
  return canonical(q);
}

void to_json(json& j, const NoiseSpec& n) {
  j = {{"sigma_g", n.sigma_g},
       {"sigma_a", n.sigma_a},
       {"sigma_bg", n.sigma_bg},
       {"sigma_ba", n.sigma_ba},
       {"initial_bias_g", vec_to_json(n.initial_bias_g)},
       {"initial_bias_a", vec_to_json(n.initial_bias_a)}};
}

void from_json(const json& j, NoiseSpec& n) {
  read(j, "sigma_g", n.sigma_g);
  read(j, "sigma_a", n.sigma_a);
  read(j, "sigma_bg", n.sigma_bg);
  read(j, "sigma_ba", n.sigma_ba);
  read_vec(j, "initial_bias_g", n.initial_bias_g);
  read_vec(j, "initial_bias_a", n.initial_bias_a);
}

void to_json(json& j, const Sinusoid& s) {
  j = {{"amplitude", s.amplitude}, {"frequency", s.frequency}, {"phase", s.phase}};
}

void from_json(const json& j, Sinusoid& s) {
  read(j, "amplitude", s.amplitude);
  read(j, "frequency", s.frequency);
  read(j, "phase", s.phase);
}

void to_json(json& j, const TrajectoryParams& t) {
  j = {{"position", t.position}, {"euler", t.euler}, {"yaw_rate", t.yaw_rate}};
}

void from_json(const json& j, TrajectoryParams& t) {
  read(j, "position", t.position);
  read(j, "euler", t.euler);
  read(j, "yaw_rate", t.yaw_rate);
}

void to_json(json& j, const Extrinsic& e) {
  j = {{"q_BA", quat_to_json(e.q_BA)}, {"p_AB_m", vec_to_json(e.p_AB)}};
}

void from_json(const json& j, Extrinsic& e) {
  if (j.contains("q_BA")) e.q_BA = quat_from_json(j.at("q_BA"));
  read_vec(j, "p_AB_m", e.p_AB);
}

void to_json(json& j, const ImuMount& m) {
  j = {{"name", m.name}, {"mount", m.mount}, {"noise", m.noise}};
}

void from_json(const json& j, ImuMount& m) {
  read(j, "name", m.name);
  read(j, "mount", m.mount);
  read(j, "noise", m.noise);
}

void to_json(json& j, const SimConfig& c) {
  j = {{"gravity", vec_to_json(c.gravity)},
       {"freq", c.freq},
       {"duration", c.duration},
       {"seed", c.seed},
       {"trajectory", c.trajectory},
       {"imus", c.imus}};
}

void from_json(const json& j, SimConfig& c) {
  read_vec(j, "gravity", c.gravity);
  read(j, "freq", c.freq);
  read(j, "duration", c.duration);
  read(j, "seed", c.seed);
  read(j, "trajectory", c.trajectory);
  read(j, "imus", c.imus);
}

void to_json(json& j, const VimuMember& m) {
  j = {{"R_IV", mat_to_json(m.R_IV)},
       {"p_VI_m", vec_to_json(m.p_VI)},
       {"noise", m.noise}};
}

void from_json(const json& j, VimuMember& m) {
  if (j.contains("R_IV")) m.R_IV = mat_from_json(j.at("R_IV"));
  read_vec(j, "p_VI_m", m.p_VI);
  read(j, "noise", m.noise);
}

void to_json(json& j, const VimuConfig& c) { j = {{"members", c.members}}; }

void from_json(const json& j, VimuConfig& c) { read(j, "members", c.members); }

void to_json(json& j, const VimuNoise& n) {
  j = {{"Q_gV", mat_to_json(n.Q_gV)},
       {"Q_bgV", mat_to_json(n.Q_bgV)},
       {"Q_aV", mat_to_json(n.Q_aV)},
       {"Q_baV", mat_to_json(n.Q_baV)}};
}

void from_json(const json& j, VimuNoise& n) {
  if (j.contains("Q_gV")) n.Q_gV = mat_from_json(j.at("Q_gV"));
  if (j.contains("Q_bgV")) n.Q_bgV = mat_from_json(j.at("Q_bgV"));
  if (j.contains("Q_aV")) n.Q_aV = mat_from_json(j.at("Q_aV"));
  if (j.contains("Q_baV")) n.Q_baV = mat_from_json(j.at("Q_baV"));
}

void to_json(json& j, const CalibrationOptions& o) {
  j = {{"max_iterations", o.max_iterations},
       {"relative_cost_tolerance", o.relative_cost_tolerance},
       {"step_tolerance", o.step_tolerance},
       {"initial_damping", o.initial_damping},
       {"min_excitation", o.min_excitation},
       {"procrustes_init", o.procrustes_init},
       {"refine_pass", o.refine_pass},
       {"weight_scale", o.weight_scale}};
}

void from_json(const json& j, CalibrationOptions& o) {
  read(j, "max_iterations", o.max_iterations);
  read(j, "relative_cost_tolerance", o.relative_cost_tolerance);
  read(j, "step_tolerance", o.step_tolerance);
  read(j, "initial_damping", o.initial_damping);
  read(j, "min_excitation", o.min_excitation);
  read(j, "procrustes_init", o.procrustes_init);
  read(j, "refine_pass", o.refine_pass);
  read(j, "weight_scale", o.weight_scale);
}

void to_json(json& j, const CalibrationResult& r) {
  j = {{"q_BA", quat_to_json(r.extrinsic.q_BA)},
       {"p_AB_m", vec_to_json(r.extrinsic.p_AB)},
       {"rotation", diagnostics(r.final_rot_cost, r.rot_iterations, r.elapsed_rot_ms)},
       {"translation",
        diagnostics(r.final_trans_cost, r.trans_iterations, r.elapsed_trans_ms)}};
}

void from_json(const json& j, CalibrationResult& r) {
  from_json(j, r.extrinsic);
  if (j.contains("rotation")) {
    const json& d = j.at("rotation");
    read(d, "cost", r.final_rot_cost);
    read(d, "iterations", r.rot_iterations);
    read(d, "elapsed_ms", r.elapsed_rot_ms);
  }
  if (j.contains("translation")) {
    const json& d = j.at("translation");
    read(d, "cost", r.final_trans_cost);
    read(d, "iterations", r.trans_iterations);
    read(d, "elapsed_ms", r.elapsed_trans_ms);
  }
}

void to_json(json& j, const ExperimentPlan& p) {
  json variants = json::array();
  for (Variant v : p.variants) variants.push_back(variant_name(v));
  j = {{"variants", variants},
       {"samples", p.samples},
       {"sequences", p.sequences},
       {"sigma_rot", p.sigma_rot},
       {"sigma_trans", p.sigma_trans},
       {"keyframe_interval", p.keyframe_interval},
       {"randomize_phases", p.randomize_phases},
       {"seed", p.seed},
       {"sim", p.sim}};
}

void from_json(const json& j, ExperimentPlan& p) {
  if (j.contains("variants")) {
    p.variants.clear();
    for (const json& v : j.at("variants")) {
      p.variants.push_back(parse_variant(v.get<std::string>()));
    }
  }
  read(j, "samples", p.samples);
  read(j, "sequences", p.sequences);
  read(j, "sigma_rot", p.sigma_rot);
  read(j, "sigma_trans", p.sigma_trans);
  read(j, "keyframe_interval", p.keyframe_interval);
  read(j, "randomize_phases", p.randomize_phases);
  read(j, "seed", p.seed);
  read(j, "sim", p.sim);
}

void to_json(json& j, const Rmse& r) {
  j = {{"position_m", r.position},
       {"rotation_rad", r.rotation},
       {"velocity_mps", r.velocity}};
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormatError,
                std::string(source) + ": " + e.what());
  }
}

json load_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "override must look like key=value: " + std::string(assignment));
  }
  std::string pointer = "/" + std::string(assignment.substr(0, eq));
  for (char& c : pointer) {
    if (c == '.') c = '/';
  }
  const std::string value(assignment.substr(eq + 1));
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;
  doc[json::json_pointer(pointer)] = parsed;
}

template <typename T>
T decode(const json& j, std::string_view what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormatError, std::string(what) + ": " + e.what());
  }
}

template NoiseSpec decode<NoiseSpec>(const json&, std::string_view);
template SimConfig decode<SimConfig>(const json&, std::string_view);
template VimuConfig decode<VimuConfig>(const json&, std::string_view);
template VimuNoise decode<VimuNoise>(const json&, std::string_view);
template CalibrationOptions decode<CalibrationOptions>(const json&, std::string_view);
template CalibrationResult decode<CalibrationResult>(const json&, std::string_view);
template ExperimentPlan decode<ExperimentPlan>(const json&, std::string_view);
template Extrinsic decode<Extrinsic>(const json&, std::string_view);

}  // namespace mimu
