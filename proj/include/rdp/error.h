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

#ifndef RDP_ERROR_H_
#define RDP_ERROR_H_

#include <stdexcept>
#include <string>

namespace rdp {

enum class ErrorCode {
  kNotFound,
  kMalformedHeader,
  kNonSquare,
  kNonPowerOfTwo,
  kMaxvalTooLarge,
  kIoFailure,
  kPlanMismatch,
  kDimensionMismatch,
  kGalleryTooSmall,
  kRankDeficient,
  kEmptyClass,
  kDegenerateRadius,
  kZeroVector,
  kBadProbability,
  kZeroDenominator,
  kAllWeightsNegligible,
  kNonConvergence,
  kCalibrationMismatch,
  kCalibrationMissing,
  kEmptyInput,
  kInvalidArgument,
  kConfig,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Process exit status for an error: 2 usage/config, 3 numerical
// non-convergence, 4 I/O.
int ExitCodeFor(ErrorCode code);

}  // namespace rdp

#endif  // RDP_ERROR_H_
