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

#include "sleepstage/bench.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "sleepstage/error.h"
#include "sleepstage/serialize.h"

namespace sleepstage {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

constexpr std::string_view kCsvHeader =
    "algo,reduce,workers,A,P,R,ingest_s,featurize_s,reduce_s,train_s,eval_s,total_s";

}  // namespace

std::optional<Reduction> ParseReduction(std::string_view name, std::size_t k) {
  if (name == "none") return Reduction{std::nullopt, k};
  if (name == "pca") return Reduction{ReductionKind::kPca, k};
  if (name == "svd") return Reduction{ReductionKind::kSvd, k};
  return std::nullopt;
}

DataSource ParseDataSource(std::string_view text) {
  if (!text.starts_with("synth:")) return CsvSource{std::string(text)};
  SyntheticSource s;
  std::string_view rest = text.substr(6);
  int field = 0;
  while (!rest.empty()) {
    const std::size_t colon = std::min(rest.find(':'), rest.size());
    std::string_view part = rest.substr(0, colon);
    rest = colon < rest.size() ? rest.substr(colon + 1) : std::string_view();
    std::from_chars_result res{part.data(), std::errc::invalid_argument};
    const char* end = part.data() + part.size();
    switch (field++) {
      case 0: res = std::from_chars(part.data(), end, s.num_epochs); break;
      case 1: res = std::from_chars(part.data(), end, s.seed); break;
      case 2: res = std::from_chars(part.data(), end, s.sample_rate_hz); break;
      default: break;
    }
    const auto [ptr, ec] = res;
    if (part.empty() || ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidArgument,
                  "synthetic source must be synth:N[:seed[:fs]], got '" +
                      std::string(text) + "'");
    }
  }
  if (field == 0) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic source needs an epoch count");
  }
  return s;
}

void ValidateConfig(const PipelineConfig& config) {
  ValidateSpec(config.model);
  if (config.worker_counts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "worker_counts is empty");
  }
  for (std::size_t i = 0; i < config.worker_counts.size(); ++i) {
    if (config.worker_counts[i] < 1) {
      throw Error(ErrorCode::kInvalidArgument, "worker counts must be positive");
    }
    if (i > 0 && config.worker_counts[i] < config.worker_counts[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "worker counts must be ascending");
    }
  }
  if (config.reductions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no reductions requested");
  }
  for (const Reduction& r : config.reductions) {
    if (r.kind && (r.k < 1 || r.k > kFeatureDim)) {
      throw Error(ErrorCode::kInvalidArgument, "reduced dimension must be in [1, 75]");
    }
  }
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must be in (0, 1)");
  }
  if (const auto* edf = std::get_if<EdfSource>(&config.source)) {
    if (edf->edf_paths.empty() ||
        edf->edf_paths.size() != edf->hypnogram_paths.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "need one hypnogram per EDF file");
    }
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kDataLoadError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kDataLoadError, "cannot read '" + path + "'");
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kDataLoadError, "cannot write '" + path + "'");
}

Hypnogram LoadHypnogram(const std::string& path) {
  const std::string bytes = ReadFile(path);
  if (EndsWith(path, ".csv")) return ParseCsvHypnogram(bytes);
  if (bytes.starts_with("0       ")) {
    return ParseTalAnnotations(ExtractAnnotationBytes(ParseEdfFile(bytes)));
  }
  return ParseTalAnnotations(bytes);
}

EpochSet LoadEpochs(const SyntheticSource& source) {
  const std::vector<SleepStage> stages =
      BalancedStageSequence(source.num_epochs, source.seed);
  const auto [recording, hypnogram] =
      SynthesizeRecording(stages, source.sample_rate_hz, source.seed);
  return {EpochSplit(recording, hypnogram), source.sample_rate_hz};
}

EpochSet LoadEpochs(const EdfSource& source) {
  if (source.edf_paths.size() != source.hypnogram_paths.size()) {
    throw Error(ErrorCode::kInvalidArgument, "need one hypnogram per EDF file");
  }
  EpochSet out;
  for (std::size_t i = 0; i < source.edf_paths.size(); ++i) {
    const std::vector<Recording> recordings = ParseEdf(ReadFile(source.edf_paths[i]));
    const Recording& rec = recordings[SelectChannel(recordings, source.channel)];
    if (i > 0 && rec.sample_rate_hz != out.sample_rate_hz) {
      throw Error(ErrorCode::kDataLoadError,
                  "'" + source.edf_paths[i] + "' has a different sample rate");
    }
    out.sample_rate_hz = rec.sample_rate_hz;
    std::vector<LabeledEpoch> epochs =
        EpochSplit(rec, LoadHypnogram(source.hypnogram_paths[i]));
    std::move(epochs.begin(), epochs.end(), std::back_inserter(out.epochs));
  }
  return out;
}

PipelineResult RunPipeline(const PipelineConfig& config, const Reduction& reduction,
                           int workers) {
  ValidateConfig(config);
  PipelineResult result;
  const auto start = Clock::now();

  // ingest
  auto t = Clock::now();
  std::optional<EpochSet> epochs;
  Dataset data;
  if (const auto* csv = std::get_if<CsvSource>(&config.source)) {
    data = ReadDatasetCsv(ReadFile(csv->path));
  } else if (const auto* synth = std::get_if<SyntheticSource>(&config.source)) {
    epochs = LoadEpochs(*synth);
  } else {
    epochs = LoadEpochs(std::get<EdfSource>(config.source));
  }
  result.times.ingest_s = SecondsSince(t);

  // featurize
  t = Clock::now();
  if (epochs) data = BuildDataset(epochs->epochs, epochs->sample_rate_hz, workers);
  ValidateDataset(data);
  result.times.featurize_s = SecondsSince(t);

  // split + reduce
  t = Clock::now();
  auto [train, test] = Split(data, config.train_fraction, config.split_seed);
  if (reduction.kind) {
    if (reduction.k > train.dim()) {
      throw Error(ErrorCode::kBadK, "k exceeds the feature dimension");
    }
    const ReducedBasis basis = *reduction.kind == ReductionKind::kPca
                                   ? PcaFit(train.x, reduction.k)
                                   : SvdReduceFit(train.x, reduction.k);
    train.x = Transform(basis, train.x, workers);
    test.x = Transform(basis, test.x, workers);
    train.feature_names = test.feature_names = DefaultFeatureNames(reduction.k);
  }
  result.times.reduce_s = SecondsSince(t);

  // train
  t = Clock::now();
  const TrainedModel model = Fit(train, config.model, workers);
  result.times.train_s = SecondsSince(t);

  // evaluate
  t = Clock::now();
  result.predictions = PredictBatch(model, test.x, workers);
  result.confusion = Confusion(test.y, result.predictions);
  result.metrics = Report(result.confusion);
  result.times.eval_s = SecondsSince(t);

  result.total_s = SecondsSince(start);
  return result;
}

std::string DescribeEnvironment() {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return "cores=" + std::to_string(std::thread::hardware_concurrency()) +
         "; timestamp=" + stamp;
}

BenchReport Sweep(const PipelineConfig& config) {
  ValidateConfig(config);
  BenchReport report;
  report.environment = DescribeEnvironment();
  for (const Reduction& reduction : config.reductions) {
    for (int workers : config.worker_counts) {
      const PipelineResult r = RunPipeline(config, reduction, workers);
      BenchRow row;
      row.algorithm = std::string(AlgorithmName(config.model.algorithm));
      row.reduction = std::string(reduction.name());
      row.workers = workers;
      row.accuracy = r.metrics.accuracy;
      row.precision = r.metrics.precision(config.averaging);
      row.recall = r.metrics.recall(config.averaging);
      row.times = r.times;
      row.total_s = r.total_s;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string EmitReport(const BenchReport& report, ReportFormat format) {
  if (report.rows.empty()) throw Error(ErrorCode::kEmptyReport, "no rows to emit");
  if (format == ReportFormat::kJson) return ToJson(report).dump(2) + "\n";
  std::string out(kCsvHeader);
  out += '\n';
  for (const BenchRow& r : report.rows) {
    out += r.algorithm + ',' + r.reduction + ',' + std::to_string(r.workers);
    for (double v : {r.accuracy, r.precision, r.recall, r.times.ingest_s,
                     r.times.featurize_s, r.times.reduce_s, r.times.train_s, r.times.eval_s, r.total_s}) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

BenchReport ParseReport(std::string_view text, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedCsv, std::string("report: ") + e.what());
    }
    return BenchReportFromJson(j);
  }
  BenchReport report;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::kMalformedCsv, "unexpected report header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw Error(ErrorCode::kMalformedCsv, "report row needs 12 fields");
    auto num = [](const std::string& s) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::kMalformedCsv, "bad number '" + s + "'");
      }
      return v;
    };
    BenchRow r;
    r.algorithm = f[0];
    r.reduction = f[1];
    r.workers = static_cast<int>(num(f[2]));
    r.accuracy = num(f[3]);
    r.precision = num(f[4]);
    r.recall = num(f[5]);
    r.times.ingest_s = num(f[6]);
    r.times.featurize_s = num(f[7]);
    r.times.reduce_s = num(f[8]);
    r.times.train_s = num(f[9]);
    r.times.eval_s = num(f[10]);
    r.total_s = num(f[11]);
    report.rows.push_back(std::move(r));
  }
  return report;
}

}  // namespace sleepstage
