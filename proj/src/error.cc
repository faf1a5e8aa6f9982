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

#include "sleepstage/error.h"

namespace sleepstage {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kDegenerateCalibration: return "DegenerateCalibration";
    case ErrorCode::kMalformedTal: return "MalformedTAL";
    case ErrorCode::kNonAlignedOnset: return "NonAlignedOnset";
    case ErrorCode::kBadStageToken: return "BadStageToken";
    case ErrorCode::kNonMonotoneIndex: return "NonMonotoneIndex";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kEmptyStageSequence: return "EmptyStageSequence";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kBandAboveNyquist: return "BandAboveNyquist";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kMalformedModel: return "MalformedModel";
    case ErrorCode::kDegenerateSplit: return "DegenerateSplit";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmpty: return "Empty";
    case ErrorCode::kBadClass: return "BadClass";
    case ErrorCode::kDataLoadError: return "DataLoadError";
    case ErrorCode::kEmptyReport: return "EmptyReport";
  }
  return "Unknown";
}

bool IsDataError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kBadK:
    case ErrorCode::kBadClass:
      return false;
    default:
      return true;
  }
}

}  // namespace sleepstage
