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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimu/types.hpp"

namespace mimu {

/// Header line of the IMU CSV format (units: ns, rad/s, m/s^2).
inline constexpr std::string_view kImuCsvHeader = "t_ns,wx,wy,wz,ax,ay,az";

/// Relative tolerance on sample-interval jitter and on rate agreement.
inline constexpr double kRateTolerance = 0.01;

/// Shortest round-trip decimal text for every value.
std::string format_imu_csv(const ImuSeries& series);

/**
 * Parses the CSV text.  Rows must be strictly increasing in t_ns and every
 * interval must lie within 1% of the mean interval; the rate is inferred
 * from the timestamps.  Throws FormatError otherwise.
 */
ImuSeries parse_imu_csv(std::string_view text, std::string_view source = "<memory>");

ImuSeries read_imu_csv(const std::filesystem::path& path);
void write_imu_csv(const std::filesystem::path& path, const ImuSeries& series);

/**
 * Reads and synchronizes several IMU files.
 *
 * All rates must agree within 1% (and match `expected_freq` when given),
 * otherwise RateMismatch.  The result covers the intersection of the time
 * spans, paired sample-by-sample without resampling; EmptyOverlap when the
 * spans do not intersect.
 */
std::vector<ImuSeries> ingest_csv(const std::vector<std::filesystem::path>& paths,
                                  std::optional<double> expected_freq = std::nullopt);

/// Same as ingest_csv for series already in memory.
std::vector<ImuSeries> synchronize(const std::vector<ImuSeries>& series,
                                   std::optional<double> expected_freq = std::nullopt);

/// Whole-file read; IoError when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace mimu
