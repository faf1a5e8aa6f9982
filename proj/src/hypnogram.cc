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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/ingest.h"

namespace sleepstage {

namespace {

constexpr char kTalDuration = 0x15;
constexpr char kTalSeparator = 0x14;
constexpr char kTalEnd = 0x00;

std::optional<SleepStage> StageForAnnotation(std::string_view text) {
  constexpr std::string_view kPrefix = "Sleep stage ";
  if (text == "Movement time") return SleepStage::kExcluded;
  if (text.size() != kPrefix.size() + 1 || !text.starts_with(kPrefix)) {
    return std::nullopt;
  }
  switch (text.back()) {
    case 'W': return SleepStage::kWake;
    case '1': return SleepStage::kS1;
    case '2': return SleepStage::kS2;
    case '3': return SleepStage::kS3;
    case '4': return SleepStage::kS4;
    case 'R': return SleepStage::kRem;
    case '?': return SleepStage::kExcluded;
    default: return std::nullopt;
  }
}

double ParseSeconds(std::string_view text, bool signed_onset) {
  double sign = 1.0;
  if (signed_onset) {
    if (text.empty() || (text.front() != '+' && text.front() != '-')) {
      throw Error(ErrorCode::kMalformedTal,
                  "onset must start with '+' or '-': '" + std::string(text) +
                      "'");
    }
    if (text.front() == '-') sign = -1.0;
    text.remove_prefix(1);
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value, std::chars_format::fixed);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kMalformedTal,
                "unparseable time '" + std::string(text) + "'");
  }
  return sign * value;
}

std::string_view TrimLine(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  return s;
}

}  // namespace

Hypnogram::Hypnogram(std::vector<HypnogramEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].epoch_index < 0) {
      throw Error(ErrorCode::kNonMonotoneIndex, "negative epoch index");
    }
    if (i > 0 && entries_[i].epoch_index <= entries_[i - 1].epoch_index) {
      throw Error(ErrorCode::kNonMonotoneIndex,
                  "epoch index " + std::to_string(entries_[i].epoch_index) +
                      " does not increase");
    }
  }
}

Hypnogram ParseTalAnnotations(std::string_view bytes,
                              std::vector<Diagnostic>* diagnostics) {
  std::map<std::int64_t, SleepStage> stages;
  std::size_t pos = 0;
  const std::size_t n = bytes.size();

  while (pos < n) {
    // Records are zero-padded after their last TAL.
    if (bytes[pos] == kTalEnd) {
      ++pos;
      continue;
    }

    const std::size_t onset_end = bytes.find_first_of(
        std::string_view("\x14\x15", 2), pos);
    if (onset_end == std::string_view::npos) {
      throw Error(ErrorCode::kMalformedTal, "onset without separator");
    }
    const double onset = ParseSeconds(bytes.substr(pos, onset_end - pos), true);
    pos = onset_end;

    std::optional<double> duration;
    if (bytes[pos] == kTalDuration) {
      const std::size_t dur_end = bytes.find(kTalSeparator, pos + 1);
      if (dur_end == std::string_view::npos) {
        throw Error(ErrorCode::kMalformedTal, "duration without separator");
      }
      duration = ParseSeconds(bytes.substr(pos + 1, dur_end - pos - 1), false);
      pos = dur_end;
    }
    ++pos;  // onset/duration separator

    std::vector<std::string_view> texts;
    for (;;) {
      if (pos >= n) {
        throw Error(ErrorCode::kMalformedTal, "TAL is not terminated");
      }
      if (bytes[pos] == kTalEnd) {
        ++pos;
        break;
      }
      const std::size_t text_end = bytes.find(kTalSeparator, pos);
      if (text_end == std::string_view::npos) {
        throw Error(ErrorCode::kMalformedTal, "annotation is not terminated");
      }
      texts.push_back(bytes.substr(pos, text_end - pos));
      pos = text_end + 1;
    }

    for (std::string_view text : texts) {
      const std::optional<SleepStage> stage = StageForAnnotation(text);
      if (!stage) continue;
      if (onset < 0.0) {
        throw Error(ErrorCode::kMalformedTal,
                    "stage annotation with negative onset");
      }
      const double ratio = onset / kEpochSeconds;
      const auto first = static_cast<std::int64_t>(std::floor(ratio + 1e-9));
      if (std::abs(ratio - std::round(ratio)) > 1e-9 && diagnostics) {
        diagnostics->push_back(
            {ErrorCode::kNonAlignedOnset,
             "onset " + std::to_string(onset) +
                 " s is not a multiple of 30 s; rounded down to epoch " +
                 std::to_string(first)});
      }
      std::int64_t count = 1;
      if (duration) {
        count = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(
                   std::floor(*duration / kEpochSeconds + 1e-9)));
      }
      for (std::int64_t e = first; e < first + count; ++e) {
        if (!stages.emplace(e, *stage).second) {
          throw Error(ErrorCode::kMalformedTal,
                      "overlapping stage annotations at epoch " +
                          std::to_string(e));
        }
      }
    }
  }

  std::vector<HypnogramEntry> entries;
  entries.reserve(stages.size());
  for (const auto& [index, stage] : stages) entries.push_back({index, stage});
  return Hypnogram(std::move(entries));
}

Hypnogram ParseCsvHypnogram(std::string_view text) {
  std::vector<HypnogramEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = TrimLine(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view() : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line == "epoch_index,stage") continue;

    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorCode::kMalformedCsv,
                  "line " + std::to_string(line_no) + ": expected 'index,stage'");
    }
    std::string_view index_text = TrimLine(line.substr(0, comma));
    std::string_view stage_text = TrimLine(line.substr(comma + 1));
    std::int64_t index = 0;
    auto [ptr, ec] = std::from_chars(
        index_text.data(), index_text.data() + index_text.size(), index);
    if (index_text.empty() || ec != std::errc() ||
        ptr != index_text.data() + index_text.size() || index < 0) {
      throw Error(ErrorCode::kMalformedCsv,
                  "line " + std::to_string(line_no) + ": bad epoch index '" +
                      std::string(index_text) + "'");
    }
    const std::optional<SleepStage> stage = ParseStageToken(stage_text);
    if (!stage) {
      throw Error(ErrorCode::kBadStageToken,
                  "line " + std::to_string(line_no) + ": '" +
                      std::string(stage_text) + "'");
    }
    if (!entries.empty() && index <= entries.back().epoch_index) {
      throw Error(ErrorCode::kNonMonotoneIndex,
                  "line " + std::to_string(line_no) + ": index " +
                      std::to_string(index) + " does not increase");
    }
    entries.push_back({index, *stage});
  }
  return Hypnogram(std::move(entries));
}

std::string FormatCsvHypnogram(const Hypnogram& hypnogram) {
  std::string out;
  for (const auto& e : hypnogram.entries()) {
    out += std::to_string(e.epoch_index);
    out += ',';
    out += StageToken(e.stage);
    out += '\n';
  }
  return out;
}

}  // namespace sleepstage
