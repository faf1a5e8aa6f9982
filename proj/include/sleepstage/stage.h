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

#ifndef SLEEPSTAGE_STAGE_H_
#define SLEEPSTAGE_STAGE_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace sleepstage {

// Rechtschaffen & Kales stages. kExcluded marks unscored or movement epochs
// and is dropped during epoching; it never reaches a Dataset.
enum class SleepStage { kWake = 0, kS1, kS2, kS3, kS4, kRem, kExcluded };

inline constexpr std::size_t kNumStages = 6;

// Canonical class order. All tie-breaking follows this order.
inline constexpr std::array<SleepStage, kNumStages> kAllStages = {
    SleepStage::kWake, SleepStage::kS1, SleepStage::kS2,
    SleepStage::kS3,   SleepStage::kS4, SleepStage::kRem};

inline constexpr std::size_t StageIndex(SleepStage s) {
  return static_cast<std::size_t>(s);
}

inline constexpr bool IsClassifierStage(SleepStage s) {
  return s != SleepStage::kExcluded;
}

// "W", "1", "2", "3", "4", "R"; "?" for kExcluded.
std::string_view StageToken(SleepStage s);

// Accepts W,1,2,3,4,R and the excluded tokens "?" and "M".
std::optional<SleepStage> ParseStageToken(std::string_view token);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_STAGE_H_
