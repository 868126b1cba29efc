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
 * @file config.hpp
 * @brief JSON (de)serialization of configs and results.
 *
 * Readers accept partial documents: missing keys keep their defaults.
 * Vectors are arrays [x, y, z], matrices row-major nested arrays and
 * quaternions [w, x, y, z].
 */

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mimu/calibration.hpp"
#include "mimu/harness.hpp"
#include "mimu/virtual_imu.hpp"

namespace mimu {

using json = nlohmann::json;

json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const json& j);
json mat_to_json(const Mat3& m);
Mat3 mat_from_json(const json& j);
json quat_to_json(const Quat& q);
Quat quat_from_json(const json& j);

void to_json(json& j, const NoiseSpec& n);
void from_json(const json& j, NoiseSpec& n);
void to_json(json& j, const Sinusoid& s);
void from_json(const json& j, Sinusoid& s);
void to_json(json& j, const TrajectoryParams& t);
void from_json(const json& j, TrajectoryParams& t);
void to_json(json& j, const Extrinsic& e);
void from_json(const json& j, Extrinsic& e);
void to_json(json& j, const ImuMount& m);
void from_json(const json& j, ImuMount& m);
void to_json(json& j, const SimConfig& c);
void from_json(const json& j, SimConfig& c);
void to_json(json& j, const VimuMember& m);
void from_json(const json& j, VimuMember& m);
void to_json(json& j, const VimuConfig& c);
void from_json(const json& j, VimuConfig& c);
void to_json(json& j, const VimuNoise& n);
void from_json(const json& j, VimuNoise& n);
void to_json(json& j, const CalibrationOptions& o);
void from_json(const json& j, CalibrationOptions& o);
void to_json(json& j, const CalibrationResult& r);
void from_json(const json& j, CalibrationResult& r);
void to_json(json& j, const ExperimentPlan& p);
void from_json(const json& j, ExperimentPlan& p);
void to_json(json& j, const Rmse& r);

/// FormatError on malformed text.
json parse_json(std::string_view text, std::string_view source = "<memory>");
/// IoError if unreadable, FormatError if malformed.
json load_json_file(const std::filesystem::path& path);

/**
 * Applies "a.b.c=value".  The value is parsed as JSON when possible and kept
 * as a string otherwise.  Throws InvalidArgument on a missing '='.
 */
void apply_override(json& doc, std::string_view assignment);

/// Converts a document to T, mapping type errors to FormatError.
template <typename T>
T decode(const json& j, std::string_view what);

}  // namespace mimu
