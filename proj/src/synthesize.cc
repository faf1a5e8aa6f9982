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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/ingest.h"

namespace sleepstage {

StageWaveform WaveformFor(SleepStage stage) {
  // Amplitudes are the midpoints of each stage's range; "<50 uV" is [0, 50].
  switch (stage) {
    case SleepStage::kWake: return {15.0, 50.0, 25.0};
    case SleepStage::kS1: return {4.0, 8.0, 75.0};
    case SleepStage::kS2: return {4.0, 15.0, 100.0};
    case SleepStage::kS3: return {2.0, 4.0, 125.0};
    case SleepStage::kS4: return {0.5, 2.0, 150.0};
    case SleepStage::kRem: return {15.0, 30.0, 25.0};
    case SleepStage::kExcluded: break;
  }
  return {0.0, 0.0, 0.0};
}

std::size_t EpochLength(double sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(kEpochSeconds * sample_rate_hz));
}

std::pair<Recording, Hypnogram> SynthesizeRecording(
    std::span<const SleepStage> stages, double sample_rate_hz,
    std::uint64_t seed) {
  if (stages.empty()) {
    throw Error(ErrorCode::kEmptyStageSequence, "no stages to synthesize");
  }
  if (!(sample_rate_hz >= kMinSyntheticRateHz) || !std::isfinite(sample_rate_hz)) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic sample rate must be at least 64 Hz");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t len = EpochLength(sample_rate_hz);

  Recording rec;
  rec.subject_id = "synthetic-" + std::to_string(seed);
  rec.channel_label = "EEG synthetic";
  rec.sample_rate_hz = sample_rate_hz;
  rec.samples.reserve(len * stages.size());

  std::vector<HypnogramEntry> entries;
  entries.reserve(stages.size());
  for (std::size_t e = 0; e < stages.size(); ++e) {
    const SleepStage stage = stages[e];
    const StageWaveform wave = WaveformFor(stage);
    const double freq =
        wave.freq_lo_hz + (wave.freq_hi_hz - wave.freq_lo_hz) * unit(rng);
    const double omega = 2.0 * std::numbers::pi * freq / sample_rate_hz;
    for (std::size_t i = 0; i < len; ++i) {
      const double noise = kSyntheticNoiseUv * (2.0 * unit(rng) - 1.0);
      rec.samples.push_back(wave.amplitude_uv *
                                std::sin(omega * static_cast<double>(i)) +
                            noise);
    }
    entries.push_back({static_cast<std::int64_t>(e), stage});
  }
  return {std::move(rec), Hypnogram(std::move(entries))};
}

std::vector<SleepStage> BalancedStageSequence(std::size_t n,
                                              std::uint64_t seed) {
  std::vector<SleepStage> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = kAllStages[i % kNumStages];
  std::mt19937_64 rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<LabeledEpoch> EpochSplit(const Recording& recording,
                                     const Hypnogram& hypnogram) {
  ValidateRecording(recording);
  const std::size_t len = EpochLength(recording.sample_rate_hz);
  if (len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "epoch length rounds to zero");
  }
  const std::size_t complete = recording.samples.size() / len;

  std::vector<LabeledEpoch> out;
  for (const HypnogramEntry& entry : hypnogram.entries()) {
    if (entry.stage == SleepStage::kExcluded) continue;
    const auto index = static_cast<std::size_t>(entry.epoch_index);
    if (index >= complete) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "epoch " + std::to_string(entry.epoch_index) +
                      " exceeds the recording (" + std::to_string(complete) +
                      " complete epochs)");
    }
    LabeledEpoch epoch;
    const auto begin = recording.samples.begin() +
                       static_cast<std::ptrdiff_t>(index * len);
    epoch.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(len));
    epoch.stage = entry.stage;
    epoch.subject_id = recording.subject_id;
    epoch.epoch_index = entry.epoch_index;
    out.push_back(std::move(epoch));
  }
  return out;
}

}  // namespace sleepstage
