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

#ifndef SLEEPSTAGE_BENCH_H_
#define SLEEPSTAGE_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sleepstage/classify.h"
#include "sleepstage/evaluate.h"
#include "sleepstage/features.h"
#include "sleepstage/ingest.h"
#include "sleepstage/reduce.h"

namespace sleepstage {

inline constexpr std::size_t kDefaultReducedDim = 30;

// No kind means the raw 75 features.
struct Reduction {
  std::optional<ReductionKind> kind;
  std::size_t k = kDefaultReducedDim;

  std::string_view name() const {
    return kind ? ReductionKindName(*kind) : std::string_view("none");
  }
  friend bool operator==(const Reduction&, const Reduction&) = default;
};

// Parses "none", "pca" or "svd".
std::optional<Reduction> ParseReduction(std::string_view name,
                                        std::size_t k = kDefaultReducedDim);

struct SyntheticSource {
  std::size_t num_epochs = 600;
  std::uint64_t seed = 42;
  double sample_rate_hz = 100.0;
};

struct EdfSource {
  std::vector<std::string> edf_paths;
  std::vector<std::string> hypnogram_paths;  // paired with edf_paths
  std::optional<std::string> channel;
};

struct CsvSource {
  std::string path;
};

using DataSource = std::variant<SyntheticSource, EdfSource, CsvSource>;

// "synth:N[:seed[:fs]]" selects synthetic data; anything else is a dataset
// CSV path.
DataSource ParseDataSource(std::string_view text);

struct PipelineConfig {
  DataSource source = SyntheticSource{};
  ModelSpec model;
  std::vector<Reduction> reductions = {Reduction{}};
  double train_fraction = 0.8;
  std::uint64_t split_seed = 42;
  std::vector<int> worker_counts = {1};
  Averaging averaging = Averaging::kMacro;
};

// Throws kInvalidArgument: empty or unsorted worker counts, non-positive
// workers, reduced dimension outside [1, 75], bad fraction or model spec.
void ValidateConfig(const PipelineConfig& config);

// Wall-clock seconds per stage, from a monotonic clock.
struct StageTimes {
  double ingest_s = 0.0;
  double featurize_s = 0.0;
  double reduce_s = 0.0;  // includes the train/test split
  double train_s = 0.0;
  double eval_s = 0.0;

  friend bool operator==(const StageTimes&, const StageTimes&) = default;
};

struct PipelineResult {
  MetricsReport metrics;
  ConfusionMatrix confusion;
  std::vector<SleepStage> predictions;  // test rows, in row order
  StageTimes times;
  double total_s = 0.0;
};

// Labeled epochs and their shared sample rate. Errors: kDataLoadError for
// unreadable files or mixed sample rates, plus any parse error.
struct EpochSet {
  std::vector<LabeledEpoch> epochs;
  double sample_rate_hz = 0.0;
};
EpochSet LoadEpochs(const SyntheticSource& source);
EpochSet LoadEpochs(const EdfSource& source);

// Hypnogram from a CSV sidecar (".csv"), an EDF+ annotation file, or a raw
// TAL stream.
Hypnogram LoadHypnogram(const std::string& path);

std::string ReadFile(const std::string& path);  // kDataLoadError on failure
void WriteFile(const std::string& path, std::string_view contents);

// ingest -> featurize -> split + reduce -> train -> evaluate with one worker
// count. Metrics and predictions depend only on config and reduction.
PipelineResult RunPipeline(const PipelineConfig& config,
                           const Reduction& reduction, int workers);

struct BenchRow {
  std::string algorithm;
  std::string reduction;
  int workers = 1;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  StageTimes times;
  double total_s = 0.0;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string environment;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

// One row per (reduction, worker count), reductions outermost.
BenchReport Sweep(const PipelineConfig& config);

// Core count and UTC timestamp.
std::string DescribeEnvironment();

enum class ReportFormat { kCsv, kJson };

// CSV columns: algo,reduce,workers,A,P,R,featurize_s,reduce_s,train_s,
// eval_s,total_s. JSON carries every field. Errors: kEmptyReport.
std::string EmitReport(const BenchReport& report, ReportFormat format);

// Inverse of EmitReport. CSV input leaves ingest_s and environment empty.
BenchReport ParseReport(std::string_view text, ReportFormat format);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_BENCH_H_
