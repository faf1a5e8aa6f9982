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

#ifndef SLEEPSTAGE_INGEST_H_
#define SLEEPSTAGE_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/stage.h"

namespace sleepstage {

inline constexpr double kEpochSeconds = 30.0;

// One EEG channel in physical units (microvolts).
struct Recording {
  std::string subject_id;
  std::string channel_label;
  double sample_rate_hz = 0.0;
  std::vector<double> samples;
  double start_time = 0.0;  // seconds since midnight of the start date
};

// Throws kInvalidArgument unless sample_rate_hz > 0 and samples are
// nonempty and finite.
void ValidateRecording(const Recording& recording);

struct HypnogramEntry {
  std::int64_t epoch_index = 0;
  SleepStage stage = SleepStage::kExcluded;

  friend bool operator==(const HypnogramEntry&,
                         const HypnogramEntry&) = default;
};

// Per-epoch stage labels on the fixed 30 s grid. Indices are nonnegative and
// strictly increasing; the constructor enforces this (kNonMonotoneIndex).
class Hypnogram {
 public:
  Hypnogram() = default;
  explicit Hypnogram(std::vector<HypnogramEntry> entries);

  double epoch_seconds() const { return kEpochSeconds; }
  const std::vector<HypnogramEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const Hypnogram&, const Hypnogram&) = default;

 private:
  std::vector<HypnogramEntry> entries_;
};

struct LabeledEpoch {
  std::vector<double> samples;
  SleepStage stage = SleepStage::kWake;
  std::string subject_id;
  std::int64_t epoch_index = 0;
};

// Number of samples in one scoring epoch: round(30 * fs).
std::size_t EpochLength(double sample_rate_hz);

// ---------------------------------------------------------------------------
// EDF

struct EdfSignalHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  std::int32_t digital_min = 0;
  std::int32_t digital_max = 0;
  std::string prefiltering;
  std::int32_t samples_per_record = 0;
};

// A parsed EDF file with digital (uncalibrated) samples.
struct EdfFile {
  std::string patient_id;
  std::string recording_id;
  std::string start_date;  // dd.mm.yy
  std::string start_time;  // hh.mm.ss
  std::string reserved;    // "EDF+C" / "EDF+D" for EDF+ files
  std::int64_t num_records = 0;
  double record_duration_s = 0.0;
  std::vector<EdfSignalHeader> signals;
  // digital[s] holds every sample of signal s across all data records.
  std::vector<std::vector<std::int16_t>> digital;
};

inline constexpr std::string_view kEdfAnnotationsLabel = "EDF Annotations";

// Parses the fixed-width header and 16-bit little-endian data records.
// Errors: kMalformedHeader, kTruncated.
EdfFile ParseEdfFile(std::string_view bytes);

// One Recording per ordinary signal; "EDF Annotations" signals are skipped.
// Errors: as ParseEdfFile, plus kDegenerateCalibration when dig_max = dig_min.
std::vector<Recording> ParseEdf(std::string_view bytes);

// Converts one signal of a parsed file to physical units.
Recording ToRecording(const EdfFile& file, std::size_t signal);

// Concatenated raw annotation-signal bytes, record by record.
std::string ExtractAnnotationBytes(const EdfFile& file);

// Index of the recording whose label equals `label`, or when no label is
// given, the first channel whose label starts with "EEG" (falling back to
// the first channel). Throws kDataLoadError if nothing matches.
std::size_t SelectChannel(const std::vector<Recording>& recordings,
                          const std::optional<std::string>& label);

// ---------------------------------------------------------------------------
// Hypnograms

// Decodes a stream of time-stamped annotation lists. Onsets that are not a
// multiple of 30 s are rounded down and reported through `diagnostics`.
// Errors: kMalformedTal.
Hypnogram ParseTalAnnotations(std::string_view bytes,
                              std::vector<Diagnostic>* diagnostics = nullptr);

// "epoch_index,stage" lines, stage in {W,1,2,3,4,R,?,M}.
// Errors: kBadStageToken, kNonMonotoneIndex, kMalformedCsv.
Hypnogram ParseCsvHypnogram(std::string_view text);

std::string FormatCsvHypnogram(const Hypnogram& hypnogram);

// ---------------------------------------------------------------------------
// Synthetic recordings

struct StageWaveform {
  double freq_lo_hz;
  double freq_hi_hz;
  double amplitude_uv;  // peak amplitude, midpoint of the stage's range
};

// Frequency range and amplitude used for each of the six stages.
StageWaveform WaveformFor(SleepStage stage);

inline constexpr double kSyntheticNoiseUv = 5.0;
inline constexpr double kMinSyntheticRateHz = 64.0;

// One 30 s sinusoid per stage plus uniform noise. kExcluded epochs are
// noise only. Pure function of its arguments.
// Errors: kEmptyStageSequence; kInvalidArgument when fs < 64.
std::pair<Recording, Hypnogram> SynthesizeRecording(
    std::span<const SleepStage> stages, double sample_rate_hz,
    std::uint64_t seed);

// n stages with class counts as equal as possible, in seeded random order.
std::vector<SleepStage> BalancedStageSequence(std::size_t n,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Epoching

// One LabeledEpoch per non-excluded hypnogram entry, in hypnogram order.
// Errors: kIndexOutOfRange when an entry runs past the end of the recording.
std::vector<LabeledEpoch> EpochSplit(const Recording& recording,
                                     const Hypnogram& hypnogram);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_INGEST_H_
