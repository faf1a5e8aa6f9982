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

// sleepstage: EEG sleep-stage pipeline and worker-sweep benchmark.
//
//   sleepstage synth --stages 600 --seed 42 --out data.csv
//   sleepstage ingest --edf a.edf --hypnogram a.csv --out data.csv
//   sleepstage train --data data.csv --algo rf --reduce pca --model-out m.json
//   sleepstage eval --data data.csv --model m.json --format json
//   sleepstage bench --data synth:2000 --algo rf --reduce none,pca,svd
//       --workers 1,2,4,8 --out report.csv
//
// Exit status: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sleepstage/bench.h"
#include "sleepstage/classify.h"
#include "sleepstage/error.h"
#include "sleepstage/evaluate.h"
#include "sleepstage/features.h"
#include "sleepstage/ingest.h"
#include "sleepstage/reduce.h"
#include "sleepstage/serialize.h"

namespace sleepstage {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Flags shared by train and bench. Unset optionals leave the config alone.
struct ModelFlags {
  std::optional<std::string> data;
  std::optional<std::string> algo;
  std::vector<std::string> reduce;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> trees;
  std::optional<int> max_depth;
  std::optional<int> min_leaf;
  std::optional<int> gbt_stages;
  std::optional<int> lr_iterations;
  std::optional<std::string> config;
};

void AddModelFlags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--data", f.data, "dataset CSV or synth:N[:seed[:fs]]");
  cmd->add_option("--algo", f.algo, "nb|lr|dt|rf|gbt")
      ->check(CLI::IsMember({"nb", "lr", "dt", "rf", "gbt"}));
  cmd->add_option("--k", f.k, "reduced dimension for pca/svd")->check(CLI::Range(1, 75));
  cmd->add_option("--seed", f.seed, "model seed");
  cmd->add_option("--trees", f.trees, "random forest size");
  cmd->add_option("--max-depth", f.max_depth, "tree depth limit");
  cmd->add_option("--min-leaf", f.min_leaf, "minimum rows per tree leaf");
  cmd->add_option("--gbt-stages", f.gbt_stages, "boosting stages per class");
  cmd->add_option("--lr-iterations", f.lr_iterations, "gradient descent steps");
  cmd->add_option("--config", f.config, "JSON config; flags override it");
}

PipelineConfig ResolveConfig(const ModelFlags& f) {
  PipelineConfig c;
  if (f.config) c = ConfigFromJson(Json::parse(ReadFile(*f.config)), c);
  if (f.data) c.source = ParseDataSource(*f.data);
  if (f.algo) c.model.algorithm = *ParseAlgorithm(*f.algo);
  if (f.seed) c.model.seed = *f.seed;
  if (f.trees) c.model.hyper.num_trees = *f.trees;
  if (f.max_depth) c.model.hyper.max_depth = *f.max_depth;
  if (f.min_leaf) c.model.hyper.min_samples_leaf = *f.min_leaf;
  if (f.gbt_stages) c.model.hyper.gbt_stages = *f.gbt_stages;
  if (f.lr_iterations) c.model.hyper.lr_iterations = *f.lr_iterations;
  if (!f.reduce.empty()) {
    c.reductions.clear();
    for (const std::string& name : f.reduce) {
      const auto r = ParseReduction(name, f.k.value_or(kDefaultReducedDim));
      if (!r) throw Error(ErrorCode::kInvalidArgument, "unknown reduction '" + name + "'");
      c.reductions.push_back(*r);
    }
  } else if (f.k) {
    for (Reduction& r : c.reductions) r.k = *f.k;
  }
  ValidateSpec(c.model);
  return c;
}

Dataset LoadDataset(const DataSource& source, int workers) {
  if (const auto* csv = std::get_if<CsvSource>(&source)) {
    return ReadDatasetCsv(ReadFile(csv->path));
  }
  const EpochSet epochs = std::holds_alternative<SyntheticSource>(source)
                              ? LoadEpochs(std::get<SyntheticSource>(source))
                              : LoadEpochs(std::get<EdfSource>(source));
  return BuildDataset(epochs.epochs, epochs.sample_rate_hz, workers);
}

void Emit(const std::optional<std::string>& out, const std::string& text) {
  if (out) {
    WriteFile(*out, text);
  } else {
    std::cout << text;
  }
}

int Run(int argc, char** argv) {
  CLI::App app{"EEG sleep-stage classification pipeline and benchmark"};
  app.require_subcommand(1);
  int workers = 1;
  app.add_option("--threads", workers, "workers for single-run subcommands")
      ->check(CLI::PositiveNumber);

  // ingest
  std::vector<std::string> edf_paths, hyp_paths;
  std::optional<std::string> channel;
  std::string ingest_out;
  CLI::App* ingest = app.add_subcommand("ingest", "EDF + hypnogram to feature CSV");
  ingest->add_option("--edf", edf_paths, "EDF recordings")->required();
  ingest->add_option("--hypnogram", hyp_paths, "hypnograms (.csv, EDF+, or TAL)")
      ->required();
  ingest->add_option("--channel", channel, "signal label (default: first EEG)");
  ingest->add_option("--out", ingest_out, "dataset CSV")->required();

  // synth
  std::size_t stages = 600;
  std::uint64_t synth_seed = 42;
  double fs = 100.0;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "synthetic recording to feature CSV");
  synth->add_option("--stages", stages, "number of 30 s epochs")->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--fs", fs, "sample rate in Hz")->check(CLI::Range(64.0, 1e6));
  synth->add_option("--out", synth_out, "dataset CSV")->required();

  // train
  ModelFlags train_flags;
  std::string reduce_one = "none";
  std::string model_out;
  CLI::App* train = app.add_subcommand("train", "fit a model on a whole dataset");
  AddModelFlags(train, train_flags);
  train->add_option("--reduce", reduce_one, "none|pca|svd")
      ->check(CLI::IsMember({"none", "pca", "svd"}));
  train->add_option("--model-out", model_out, "model JSON")->required();

  // eval
  std::string eval_data, model_path, eval_format = "json", averaging = "macro";
  std::optional<std::string> eval_out;
  CLI::App* eval = app.add_subcommand("eval", "score a saved model on a dataset");
  eval->add_option("--data", eval_data, "dataset CSV or synth:N[:seed[:fs]]")->required();
  eval->add_option("--model", model_path, "model JSON")->required();
  eval->add_option("--format", eval_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  eval->add_option("--averaging", averaging, "macro|micro")
      ->check(CLI::IsMember({"macro", "micro"}));
  eval->add_option("--out", eval_out, "output file (default stdout)");

  // bench
  ModelFlags bench_flags;
  std::vector<int> worker_counts;
  std::optional<double> train_fraction;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::string> bench_avg;
  std::string bench_format = "csv";
  std::optional<std::string> bench_out;
  CLI::App* bench = app.add_subcommand("bench", "worker-count sweep with stage timings");
  AddModelFlags(bench, bench_flags);
  bench->add_option("--reduce", bench_flags.reduce, "none,pca,svd")
      ->delimiter(',')
      ->check(CLI::IsMember({"none", "pca", "svd"}));
  bench->add_option("--workers", worker_counts, "ascending worker counts, e.g. 1,2,4,8")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--train-fraction", train_fraction, "train share of each class")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--split-seed", split_seed, "train/test split seed");
  bench->add_option("--averaging", bench_avg, "macro|micro headline P/R")
      ->check(CLI::IsMember({"macro", "micro"}));
  bench->add_option("--format", bench_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", bench_out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (ingest->parsed()) {
    EdfSource source{edf_paths, hyp_paths, channel};
    const Dataset d = LoadDataset(source, workers);
    WriteFile(ingest_out, WriteDatasetCsv(d));
    std::fprintf(stderr, "wrote %zu epochs to %s\n", d.size(), ingest_out.c_str());
  } else if (synth->parsed()) {
    const Dataset d = LoadDataset(SyntheticSource{stages, synth_seed, fs}, workers);
    WriteFile(synth_out, WriteDatasetCsv(d));
    std::fprintf(stderr, "wrote %zu epochs to %s\n", d.size(), synth_out.c_str());
  } else if (train->parsed()) {
    train_flags.reduce = {reduce_one};
    const PipelineConfig c = ResolveConfig(train_flags);
    Dataset d = LoadDataset(c.source, workers);
    ValidateDataset(d);
    std::optional<ReducedBasis> basis;
    const Reduction& r = c.reductions.front();
    if (r.kind) {
      basis = *r.kind == ReductionKind::kPca ? PcaFit(d.x, r.k) : SvdReduceFit(d.x, r.k);
      d.x = Transform(*basis, d.x, workers);
      d.feature_names = DefaultFeatureNames(r.k);
    }
    const TrainedModel m = Fit(d, c.model, workers);
    WriteFile(model_out, ToJson(m, basis).dump(1) + "\n");
    std::fprintf(stderr, "trained %s on %zu rows -> %s\n",
                 std::string(AlgorithmName(c.model.algorithm)).c_str(), d.size(),
                 model_out.c_str());
  } else if (eval->parsed()) {
    const Json mj = [&] {
      try {
        return Json::parse(ReadFile(model_path));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedModel, e.what());
      }
    }();
    const TrainedModel m = ModelFromJson(mj);
    const std::optional<ReducedBasis> basis = ReductionFromModelJson(mj);
    const Dataset d = LoadDataset(ParseDataSource(eval_data), workers);
    const auto start = std::chrono::steady_clock::now();
    const Matrix x = basis ? Transform(*basis, d.x, workers) : d.x;
    const std::vector<SleepStage> predicted = PredictBatch(m, x, workers);
    const ConfusionMatrix cm = Confusion(d.y, predicted);
    const MetricsReport rep = Report(cm);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Averaging avg = *ParseAveraging(averaging);
    const std::string reduce = basis ? std::string(ReductionKindName(basis->kind)) : "none";
    if (eval_format == "json") {
      Json j = {{"algo", AlgorithmName(m.spec.algorithm)},
                {"reduce", reduce},
                {"workers", workers},
                {"averaging", averaging},
                {"A", rep.accuracy},
                {"P", rep.precision(avg)},
                {"R", rep.recall(avg)},
                {"seconds", secs},
                {"metrics", ToJson(rep)},
                {"confusion", ToJson(cm)}};
      Emit(eval_out, j.dump(2) + "\n");
    } else {
      Emit(eval_out, "algo,reduce,workers,A,P,R,seconds\n" +
                         std::string(AlgorithmName(m.spec.algorithm)) + "," + reduce +
                         "," + std::to_string(workers) + "," +
                         FormatDouble(rep.accuracy) + "," +
                         FormatDouble(rep.precision(avg)) + "," +
                         FormatDouble(rep.recall(avg)) + "," + FormatDouble(secs) + "\n");
    }
  } else if (bench->parsed()) {
    PipelineConfig c = ResolveConfig(bench_flags);
    if (!worker_counts.empty()) c.worker_counts = worker_counts;
    if (train_fraction) c.train_fraction = *train_fraction;
    if (split_seed) c.split_seed = *split_seed;
    if (bench_avg) c.averaging = *ParseAveraging(*bench_avg);
    const BenchReport report = Sweep(c);
    std::fprintf(stderr, "%s\n", report.environment.c_str());
    Emit(bench_out, EmitReport(report, bench_format == "json" ? ReportFormat::kJson
                                                             : ReportFormat::kCsv));
  }
  return kExitOk;
}

}  // namespace
}  // namespace sleepstage

int main(int argc, char** argv) {
  try {
    return sleepstage::Run(argc, argv);
  } catch (const sleepstage::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return sleepstage::IsDataError(e.code()) ? sleepstage::kExitData
                                             : sleepstage::kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: malformed JSON: %s\n", e.what());
    return sleepstage::kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return sleepstage::kExitInternal;
  }
}
