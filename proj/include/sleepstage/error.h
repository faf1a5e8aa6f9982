// Copyright 2026 The Sleepstage Authors.
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

#ifndef SLEEPSTAGE_ERROR_H_
#define SLEEPSTAGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sleepstage {

enum class ErrorCode {
  kInvalidArgument,
  // ingest
  kMalformedHeader,
  kTruncated,
  kDegenerateCalibration,
  kMalformedTal,
  kNonAlignedOnset,
  kBadStageToken,
  kNonMonotoneIndex,
  kMalformedCsv,
  kEmptyStageSequence,
  kIndexOutOfRange,
  // features
  kTooShort,
  kBandAboveNyquist,
  kNonFiniteInput,
  // reduce / classify
  kBadK,
  kDimensionMismatch,
  kEmptyDataset,
  kSingleClass,
  kMalformedModel,
  // evaluate
  kDegenerateSplit,
  kLengthMismatch,
  kEmpty,
  kBadClass,
  // bench
  kDataLoadError,
  kEmptyReport,
};

std::string_view ErrorCodeName(ErrorCode code);

// True for codes caused by bad input data rather than bad usage.
bool IsDataError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal condition noticed while parsing; the parser recovered.
struct Diagnostic {
  ErrorCode code;
  std::string message;
};

}  // namespace sleepstage

#endif  // SLEEPSTAGE_ERROR_H_
