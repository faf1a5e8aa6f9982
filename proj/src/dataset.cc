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
#include <string>
#include <system_error>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/features.h"
#include "sleepstage/parallel.h"

namespace sleepstage {

std::vector<std::string> DefaultFeatureNames(std::size_t d) {
  std::vector<std::string> names;
  names.reserve(d);
  for (std::size_t i = 0; i < d; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

void ValidateDataset(const Dataset& data) {
  if (data.x.rows() != data.y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature rows and labels differ in count");
  }
  if (!data.feature_names.empty() && data.feature_names.size() != data.x.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature name count differs from column count");
  }
  for (SleepStage s : data.y) {
    if (!IsClassifierStage(s)) {
      throw Error(ErrorCode::kInvalidArgument, "excluded stage in dataset");
    }
  }
  for (double v : data.x.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite feature value");
    }
  }
}

Dataset BuildDataset(std::span<const LabeledEpoch> epochs,
                     double sample_rate_hz, int workers) {
  Dataset data;
  data.feature_names = DefaultFeatureNames(kFeatureDim);
  data.x = Matrix(epochs.size(), kFeatureDim);
  data.y.resize(epochs.size());
  ParallelFor(
      epochs.size(), workers,
      [&](std::size_t i) {
        const FeatureVector f = Featurize(epochs[i], sample_rate_hz);
        std::copy(f.begin(), f.end(), data.x.row(i).begin());
        data.y[i] = epochs[i].stage;
      },
      /*block=*/8);
  if (epochs.empty()) data.x = Matrix(0, kFeatureDim);
  return data;
}

Dataset Subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.x = Matrix(rows.size(), data.x.cols());
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = data.x.row(rows[i]);
    std::copy(src.begin(), src.end(), out.x.row(i).begin());
    out.y.push_back(data.y[rows[i]]);
  }
  return out;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string WriteDatasetCsv(const Dataset& data) {
  std::string out = "label";
  for (std::size_t j = 0; j < data.x.cols(); ++j) {
    out += ",f" + std::to_string(j);
  }
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += StageToken(data.y[i]);
    for (double v : data.x.row(i)) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

Dataset ReadDatasetCsv(std::string_view text) {
  auto next_line = [&text]() {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view() : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::string_view header = next_line();
  if (!header.starts_with("label")) {
    throw Error(ErrorCode::kMalformedCsv, "dataset header must start with 'label'");
  }
  Dataset data;
  std::size_t pos = 5;
  while (pos < header.size()) {
    if (header[pos] != ',') {
      throw Error(ErrorCode::kMalformedCsv, "bad dataset header");
    }
    const std::size_t end = std::min(header.find(',', pos + 1), header.size());
    data.feature_names.emplace_back(header.substr(pos + 1, end - pos - 1));
    pos = end;
  }
  const std::size_t d = data.feature_names.size();
  data.x = Matrix(0, d);

  std::vector<double> row(d);
  std::size_t line_no = 1;
  while (!text.empty()) {
    std::string_view line = next_line();
    ++line_no;
    if (line.empty()) continue;
    const std::size_t comma = std::min(line.find(','), line.size());
    const auto stage = ParseStageToken(line.substr(0, comma));
    if (!stage || *stage == SleepStage::kExcluded) {
      throw Error(ErrorCode::kBadStageToken,
                  "line " + std::to_string(line_no) + ": '" +
                      std::string(line.substr(0, comma)) + "'");
    }
    std::size_t field = 0;
    pos = comma;
    while (pos < line.size()) {
      const std::size_t end = std::min(line.find(',', pos + 1), line.size());
      std::string_view token = line.substr(pos + 1, end - pos - 1);
      if (field >= d) break;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedCsv,
                    "line " + std::to_string(line_no) + ": bad value '" +
                        std::string(token) + "'");
      }
      row[field++] = v;
      pos = end;
    }
    if (field != d || pos < line.size()) {
      throw Error(ErrorCode::kMalformedCsv,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(d) + " values");
    }
    if (d == 0) {
      data.x = Matrix(data.x.rows() + 1, 0);
    } else {
      data.x.AppendRow(row);
    }
    data.y.push_back(*stage);
  }
  return data;
}

}  // namespace sleepstage
