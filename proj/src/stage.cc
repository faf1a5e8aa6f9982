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

#include "sleepstage/stage.h"

namespace sleepstage {

std::string_view StageToken(SleepStage s) {
  switch (s) {
    case SleepStage::kWake: return "W";
    case SleepStage::kS1: return "1";
    case SleepStage::kS2: return "2";
    case SleepStage::kS3: return "3";
    case SleepStage::kS4: return "4";
    case SleepStage::kRem: return "R";
    case SleepStage::kExcluded: return "?";
  }
  return "?";
}

std::optional<SleepStage> ParseStageToken(std::string_view token) {
  if (token.size() != 1) return std::nullopt;
  switch (token[0]) {
    case 'W': return SleepStage::kWake;
    case '1': return SleepStage::kS1;
    case '2': return SleepStage::kS2;
    case '3': return SleepStage::kS3;
    case '4': return SleepStage::kS4;
    case 'R': return SleepStage::kRem;
    case '?':
    case 'M': return SleepStage::kExcluded;
    default: return std::nullopt;
  }
}

}  // namespace sleepstage
