// Copyright 2026 The auvsim Authors.
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

#include "auvsim/error.hpp"

namespace auvsim {

std::string_view ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSingularAttitude: return "SingularAttitude";
    case ErrorKind::kSingularInertia: return "SingularInertia";
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kCommandOutOfRange: return "CommandOutOfRange";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNotEngaged: return "NotEngaged";
    case ErrorKind::kMalformedCommand: return "MalformedCommand";
    case ErrorKind::kRangeViolation: return "RangeViolation";
    case ErrorKind::kStaleSequence: return "StaleSequence";
    case ErrorKind::kEmptyRecord: return "EmptyRecord";
    case ErrorKind::kCalibrationFailed: return "CalibrationFailed";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace auvsim
