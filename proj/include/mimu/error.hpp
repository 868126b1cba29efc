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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mimu {

enum class ErrorKind {
  kInvalidArgument,
  kOutOfRange,
  kDegenerateMotion,
  kNotConverged,
  kBoundaryIndex,
  kSingularNormalEquations,
  kSingularFusion,
  kLengthMismatch,
  kFormatError,
  kRateMismatch,
  kEmptyOverlap,
  kIoError,
};

/// Stable identifier used in machine-readable error output, e.g. "DegenerateMotion".
std::string_view error_kind_name(ErrorKind kind);

/// Every domain failure in the library is reported with this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mimu
