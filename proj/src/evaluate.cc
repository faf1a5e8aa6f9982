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

#include "sleepstage/evaluate.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "sleepstage/error.h"

namespace sleepstage {

SplitIndices SplitRows(std::span<const SleepStage> labels,
                       double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = labels.size();
  const auto target = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (n < 2 || target == 0 || target == n) {
    throw Error(ErrorCode::kDegenerateSplit,
                std::to_string(n) + " rows cannot be split at fraction " +
                    std::to_string(train_fraction));
  }

  std::array<std::vector<std::size_t>, kNumStages + 1> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[StageIndex(labels[i])].push_back(i);

  // Largest-remainder apportionment of `target` train rows across classes.
  std::array<std::size_t, kNumStages + 1> quota{};
  std::array<double, kNumStages + 1> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const double exact = train_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(by_class.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t c : order) {
    if (assigned >= target) break;
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  std::mt19937_64 rng(seed);
  SplitIndices out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    std::shuffle(rows.begin(), rows.end(), rng);
    out.train.insert(out.train.end(), rows.begin(),
                     rows.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    out.test.insert(out.test.end(),
                    rows.begin() + static_cast<std::ptrdiff_t>(quota[c]), rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> Split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed) {
  ValidateDataset(data);
  const SplitIndices idx = SplitRows(data.y, train_fraction, seed);
  return {Subset(data, idx.train), Subset(data, idx.test)};
}

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (std::size_t c = 0; c < k_; ++c) t += count(c, c);
  return t;
}

std::int64_t ConfusionMatrix::FalsePositives(std::size_t c) const {
  std::int64_t s = 0;
  for (std::size_t r = 0; r < k_; ++r) {
    if (r != c) s += count(r, c);
  }
  return s;
}

std::int64_t ConfusionMatrix::FalseNegatives(std::size_t c) const {
  std::int64_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) {
    if (p != c) s += count(c, p);
  }
  return s;
}

std::int64_t ConfusionMatrix::TrueNegatives(std::size_t c) const {
  return total() - TruePositives(c) - FalsePositives(c) - FalseNegatives(c);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.k_ != k_) {
    throw Error(ErrorCode::kLengthMismatch, "class counts differ");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix Confusion(std::span<const SleepStage> truth,
                          std::span<const SleepStage> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label sequences differ in length");
  }
  if (truth.empty()) throw Error(ErrorCode::kEmpty, "no labels");
  ConfusionMatrix cm(kNumStages);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!IsClassifierStage(truth[i]) || !IsClassifierStage(predicted[i])) {
      throw Error(ErrorCode::kBadClass, "excluded stage in labels");
    }
    cm.Add(StageIndex(truth[i]), StageIndex(predicted[i]));
  }
  return cm;
}

ConfusionMatrix Confusion(std::span<const int> truth,
                          std::span<const int> predicted, std::size_t k) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label sequences differ in length");
  }
  if (truth.empty()) throw Error(ErrorCode::kEmpty, "no labels");
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0 ||
        static_cast<std::size_t>(truth[i]) >= k ||
        static_cast<std::size_t>(predicted[i]) >= k) {
      throw Error(ErrorCode::kBadClass, "label outside [0, k)");
    }
    cm.Add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

double Accuracy(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::kEmpty, "empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

PrecisionRecall ComputePrecisionRecall(const ConfusionMatrix& cm, std::size_t c) {
  if (c >= cm.num_classes()) {
    throw Error(ErrorCode::kBadClass, "class " + std::to_string(c) + " out of range");
  }
  if (cm.total() == 0) throw Error(ErrorCode::kEmpty, "empty confusion matrix");
  const std::int64_t tp = cm.TruePositives(c);
  const std::int64_t fp = cm.FalsePositives(c);
  const std::int64_t fn = cm.FalseNegatives(c);
  PrecisionRecall pr;
  if (tp + fp > 0) {
    pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    pr.precision_defined = true;
  }
  if (tp + fn > 0) {
    pr.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    pr.recall_defined = true;
  }
  return pr;
}

std::string_view AveragingName(Averaging averaging) {
  return averaging == Averaging::kMacro ? "macro" : "micro";
}

std::optional<Averaging> ParseAveraging(std::string_view name) {
  if (name == "macro") return Averaging::kMacro;
  if (name == "micro") return Averaging::kMicro;
  return std::nullopt;
}

MetricsReport Report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.accuracy = Accuracy(cm);
  double p_sum = 0.0, r_sum = 0.0;
  std::size_t p_n = 0, r_n = 0;
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const PrecisionRecall pr = ComputePrecisionRecall(cm, c);
    r.per_class.push_back(pr);
    if (pr.precision_defined) {
      p_sum += pr.precision;
      ++p_n;
    }
    if (pr.recall_defined) {
      r_sum += pr.recall;
      ++r_n;
    }
    tp += cm.TruePositives(c);
    fp += cm.FalsePositives(c);
    fn += cm.FalseNegatives(c);
  }
  r.macro_precision = p_n > 0 ? p_sum / static_cast<double>(p_n) : 0.0;
  r.macro_recall = r_n > 0 ? r_sum / static_cast<double>(r_n) : 0.0;
  r.micro_precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.micro_recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return r;
}

}  // namespace sleepstage
