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


#include <string>

#include "mimu/error.hpp"
#include "mimu/types.hpp"

namespace mimu {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kOutOfRange: return "OutOfRange";
    case ErrorKind::kDegenerateMotion: return "DegenerateMotion";
    case ErrorKind::kNotConverged: return "NotConverged";
    case ErrorKind::kBoundaryIndex: return "BoundaryIndex";
    case ErrorKind::kSingularNormalEquations: return "SingularNormalEquations";
    case ErrorKind::kSingularFusion: return "SingularFusion";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kFormatError: return "FormatError";
    case ErrorKind::kRateMismatch: return "RateMismatch";
    case ErrorKind::kEmptyOverlap: return "EmptyOverlap";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

ImuSeries ImuSeries::slice(std::size_t first, std::size_t count) const {
  if (first > size() || count > size() - first) {
    throw Error(ErrorKind::kOutOfRange, "ImuSeries::slice out of range");
  }
  ImuSeries out;
  out.freq = freq;
  out.start_ns = time_ns(first);
  out.gyro.assign(gyro.begin() + first, gyro.begin() + first + count);
  out.accel.assign(accel.begin() + first, accel.begin() + first + count);
  return out;
}

void ImuSeries::validate() const {
  if (!(freq > 0.0) || !std::isfinite(freq)) {
    throw Error(ErrorKind::kInvalidArgument, "ImuSeries: freq must be > 0");
  }
  if (gyro.size() != accel.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "ImuSeries: gyro/accel length mismatch");
  }
  for (std::size_t k = 0; k < gyro.size(); ++k) {
    if (!gyro[k].allFinite() || !accel[k].allFinite()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "ImuSeries: non-finite sample at index " + std::to_string(k));
    }
  }
}

}  // namespace mimu
