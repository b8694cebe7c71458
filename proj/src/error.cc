//
// Copyright 2026 The RDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "rdp/error.h"

namespace rdp {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kNonSquare: return "NonSquare";
    case ErrorCode::kNonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorCode::kMaxvalTooLarge: return "MaxvalTooLarge";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kPlanMismatch: return "PlanMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kGalleryTooSmall: return "GalleryTooSmall";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kDegenerateRadius: return "DegenerateRadius";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kBadProbability: return "BadProbability";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kAllWeightsNegligible: return "AllWeightsNegligible";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kCalibrationMismatch: return "CalibrationMismatch";
    case ErrorCode::kCalibrationMissing: return "CalibrationMissing";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonConvergence:
      return 3;
    case ErrorCode::kNotFound:
    case ErrorCode::kMalformedHeader:
    case ErrorCode::kNonSquare:
    case ErrorCode::kNonPowerOfTwo:
    case ErrorCode::kMaxvalTooLarge:
    case ErrorCode::kIoFailure:
    case ErrorCode::kCalibrationMissing:
      return 4;
    default:
      return 2;
  }
}

}  // namespace rdp
