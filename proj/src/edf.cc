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
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/ingest.h"

namespace sleepstage {

namespace {

constexpr std::size_t kFixedHeaderBytes = 256;
constexpr std::size_t kSignalHeaderBytes = 256;
constexpr std::size_t kBytesPerSample = 2;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\0')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) {
    s.remove_suffix(1);
  }
  return s;
}

// Sequential reader over the fixed-width ASCII header.
class FieldReader {
 public:
  explicit FieldReader(std::string_view header) : header_(header) {}

  std::string_view Raw(std::size_t width) {
    std::string_view field = header_.substr(pos_, width);
    pos_ += width;
    return field;
  }

  std::string Text(std::size_t width) { return std::string(Trim(Raw(width))); }

  std::int64_t Integer(std::size_t width, std::string_view name) {
    std::string_view field = Trim(Raw(width));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() ||
        ptr != field.data() + field.size()) {
      throw Error(ErrorCode::kMalformedHeader,
                  std::string(name) + " is not an integer: '" +
                      std::string(field) + "'");
    }
    return value;
  }

  double Real(std::size_t width, std::string_view name) {
    std::string_view field = Trim(Raw(width));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() ||
        ptr != field.data() + field.size() || !std::isfinite(value)) {
      throw Error(ErrorCode::kMalformedHeader,
                  std::string(name) + " is not a number: '" +
                      std::string(field) + "'");
    }
    return value;
  }

 private:
  std::string_view header_;
  std::size_t pos_ = 0;
};

double ParseClockTime(std::string_view hhmmss) {
  int parts[3] = {0, 0, 0};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? hhmmss.find('.', start) : hhmmss.size();
    if (end == std::string_view::npos) {
      throw Error(ErrorCode::kMalformedHeader,
                  "start time is not hh.mm.ss: '" + std::string(hhmmss) + "'");
    }
    std::string_view part = hhmmss.substr(start, end - start);
    auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), parts[i]);
    if (part.empty() || ec != std::errc() ||
        ptr != part.data() + part.size()) {
      throw Error(ErrorCode::kMalformedHeader,
                  "start time is not hh.mm.ss: '" + std::string(hhmmss) + "'");
    }
    start = end + 1;
  }
  return parts[0] * 3600.0 + parts[1] * 60.0 + parts[2];
}

std::int16_t ReadLe16(const char* p) {
  const auto lo = static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]));
  const auto hi = static_cast<std::uint16_t>(static_cast<unsigned char>(p[1]));
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
}

}  // namespace

void ValidateRecording(const Recording& recording) {
  if (!(recording.sample_rate_hz > 0.0) ||
      !std::isfinite(recording.sample_rate_hz)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample rate must be positive and finite");
  }
  if (recording.samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "recording has no samples");
  }
  for (double v : recording.samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "recording contains a non-finite sample");
    }
  }
}

EdfFile ParseEdfFile(std::string_view bytes) {
  if (bytes.size() < kFixedHeaderBytes) {
    throw Error(ErrorCode::kTruncated,
                "file shorter than the 256-byte fixed header");
  }
  FieldReader fixed(bytes.substr(0, kFixedHeaderBytes));
  if (fixed.Raw(8) != std::string_view("0       ", 8)) {
    throw Error(ErrorCode::kMalformedHeader, "version field is not '0'");
  }

  EdfFile file;
  file.patient_id = fixed.Text(80);
  file.recording_id = fixed.Text(80);
  file.start_date = fixed.Text(8);
  file.start_time = fixed.Text(8);
  const std::int64_t header_bytes = fixed.Integer(8, "header byte count");
  file.reserved = fixed.Text(44);
  file.num_records = fixed.Integer(8, "data record count");
  file.record_duration_s = fixed.Real(8, "data record duration");
  const std::int64_t num_signals = fixed.Integer(4, "signal count");

  if (num_signals <= 0) {
    throw Error(ErrorCode::kMalformedHeader, "signal count must be positive");
  }
  if (!(file.record_duration_s > 0.0)) {
    throw Error(ErrorCode::kMalformedHeader,
                "data record duration must be positive");
  }
  const auto ns = static_cast<std::size_t>(num_signals);
  const std::size_t expected_header = kFixedHeaderBytes * (ns + 1);
  if (header_bytes != static_cast<std::int64_t>(expected_header)) {
    throw Error(ErrorCode::kMalformedHeader,
                "header byte count " + std::to_string(header_bytes) +
                    " does not match 256 * (signals + 1)");
  }
  if (bytes.size() < expected_header) {
    throw Error(ErrorCode::kTruncated, "file ends inside signal headers");
  }

  // Signal headers are stored field-major: all labels, then all transducers...
  FieldReader sig(bytes.substr(kFixedHeaderBytes, kSignalHeaderBytes * ns));
  file.signals.resize(ns);
  for (auto& s : file.signals) s.label = sig.Text(16);
  for (auto& s : file.signals) s.transducer = sig.Text(80);
  for (auto& s : file.signals) s.physical_dimension = sig.Text(8);
  for (auto& s : file.signals) s.physical_min = sig.Real(8, "physical minimum");
  for (auto& s : file.signals) s.physical_max = sig.Real(8, "physical maximum");
  for (auto& s : file.signals) {
    s.digital_min = static_cast<std::int32_t>(sig.Integer(8, "digital minimum"));
  }
  for (auto& s : file.signals) {
    s.digital_max = static_cast<std::int32_t>(sig.Integer(8, "digital maximum"));
  }
  for (auto& s : file.signals) s.prefiltering = sig.Text(80);
  std::size_t record_samples = 0;
  for (auto& s : file.signals) {
    const std::int64_t n = sig.Integer(8, "samples per record");
    if (n <= 0 || n > (1 << 24)) {
      throw Error(ErrorCode::kMalformedHeader,
                  "samples per record out of range for signal '" + s.label +
                      "'");
    }
    s.samples_per_record = static_cast<std::int32_t>(n);
    record_samples += static_cast<std::size_t>(n);
  }

  const std::size_t record_bytes = record_samples * kBytesPerSample;
  const std::size_t data_bytes = bytes.size() - expected_header;
  if (file.num_records == -1) {
    // Unknown record count (interrupted recording): infer from length.
    if (data_bytes % record_bytes != 0) {
      throw Error(ErrorCode::kTruncated, "file ends inside a data record");
    }
    file.num_records = static_cast<std::int64_t>(data_bytes / record_bytes);
  } else if (file.num_records < 0) {
    throw Error(ErrorCode::kMalformedHeader, "negative data record count");
  }
  const std::size_t declared =
      static_cast<std::size_t>(file.num_records) * record_bytes;
  if (data_bytes < declared) {
    throw Error(ErrorCode::kTruncated,
                "file holds " + std::to_string(data_bytes) +
                    " data bytes, header declares " +
                    std::to_string(declared));
  }
  if (data_bytes > declared) {
    throw Error(ErrorCode::kMalformedHeader,
                "data record count does not match file length");
  }

  file.digital.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    file.digital[s].reserve(static_cast<std::size_t>(file.num_records) *
                            file.signals[s].samples_per_record);
  }
  const char* p = bytes.data() + expected_header;
  for (std::int64_t r = 0; r < file.num_records; ++r) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::int32_t i = 0; i < file.signals[s].samples_per_record; ++i) {
        file.digital[s].push_back(ReadLe16(p));
        p += kBytesPerSample;
      }
    }
  }
  return file;
}

Recording ToRecording(const EdfFile& file, std::size_t signal) {
  const EdfSignalHeader& h = file.signals.at(signal);
  if (h.digital_max == h.digital_min) {
    throw Error(ErrorCode::kDegenerateCalibration,
                "digital max equals digital min for signal '" + h.label + "'");
  }
  if (file.num_records == 0) {
    throw Error(ErrorCode::kMalformedHeader, "file has no data records");
  }
  Recording rec;
  rec.subject_id = file.patient_id;
  rec.channel_label = h.label;
  rec.sample_rate_hz = h.samples_per_record / file.record_duration_s;
  rec.start_time = file.start_time.empty() ? 0.0 : ParseClockTime(file.start_time);
  const double gain = (h.physical_max - h.physical_min) /
                      (static_cast<double>(h.digital_max) - h.digital_min);
  const auto& digital = file.digital[signal];
  rec.samples.resize(digital.size());
  for (std::size_t i = 0; i < digital.size(); ++i) {
    rec.samples[i] =
        (static_cast<double>(digital[i]) - h.digital_min) * gain + h.physical_min;
  }
  return rec;
}

std::vector<Recording> ParseEdf(std::string_view bytes) {
  const EdfFile file = ParseEdfFile(bytes);
  std::vector<Recording> out;
  for (std::size_t s = 0; s < file.signals.size(); ++s) {
    if (file.signals[s].label == kEdfAnnotationsLabel) continue;
    out.push_back(ToRecording(file, s));
  }
  return out;
}

std::string ExtractAnnotationBytes(const EdfFile& file) {
  std::vector<std::size_t> annotation_signals;
  for (std::size_t s = 0; s < file.signals.size(); ++s) {
    if (file.signals[s].label == kEdfAnnotationsLabel) {
      annotation_signals.push_back(s);
    }
  }
  std::string out;
  for (std::int64_t r = 0; r < file.num_records; ++r) {
    for (std::size_t s : annotation_signals) {
      const auto per = static_cast<std::size_t>(file.signals[s].samples_per_record);
      const auto& d = file.digital[s];
      for (std::size_t i = 0; i < per; ++i) {
        const auto word =
            static_cast<std::uint16_t>(d[static_cast<std::size_t>(r) * per + i]);
        out.push_back(static_cast<char>(word & 0xff));
        out.push_back(static_cast<char>(word >> 8));
      }
    }
  }
  return out;
}

std::size_t SelectChannel(const std::vector<Recording>& recordings,
                          const std::optional<std::string>& label) {
  if (recordings.empty()) {
    throw Error(ErrorCode::kDataLoadError, "file contains no signals");
  }
  if (label) {
    for (std::size_t i = 0; i < recordings.size(); ++i) {
      if (recordings[i].channel_label == *label) return i;
    }
    throw Error(ErrorCode::kDataLoadError, "no channel labelled '" + *label + "'");
  }
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    std::string_view l = recordings[i].channel_label;
    if (l.size() >= 3 && std::toupper(static_cast<unsigned char>(l[0])) == 'E' &&
        std::toupper(static_cast<unsigned char>(l[1])) == 'E' &&
        std::toupper(static_cast<unsigned char>(l[2])) == 'G') {
      return i;
    }
  }
  return 0;
}

}  // namespace sleepstage
