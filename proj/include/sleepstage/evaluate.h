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

#ifndef SLEEPSTAGE_EVALUATE_H_
#define SLEEPSTAGE_EVALUATE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sleepstage/features.h"
#include "sleepstage/stage.h"

namespace sleepstage {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

// Stratified seeded split. The train side receives round(fraction * N) rows,
// apportioned across classes by largest remainder so each class lands within
// one row of its exact share. Errors: kInvalidArgument for a fraction outside
// (0, 1); kDegenerateSplit when either side would be empty.
SplitIndices SplitRows(std::span<const SleepStage> labels,
                       double train_fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> Split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed);

// K x K counts; rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes = kNumStages)
      : k_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const { return k_; }
  std::int64_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * k_ + predicted];
  }
  void Add(std::size_t truth, std::size_t predicted, std::int64_t n = 1) {
    counts_[truth * k_ + predicted] += n;
  }
  std::int64_t total() const;
  std::int64_t trace() const;

  // One-vs-rest marginals for class c.
  std::int64_t TruePositives(std::size_t c) const { return count(c, c); }
  std::int64_t FalsePositives(std::size_t c) const;
  std::int64_t FalseNegatives(std::size_t c) const;
  std::int64_t TrueNegatives(std::size_t c) const;

  // Counts merge additively across disjoint prediction batches.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::int64_t> counts_;
};

// Over the six stages in canonical order. Errors: kLengthMismatch, kEmpty.
ConfusionMatrix Confusion(std::span<const SleepStage> truth,
                          std::span<const SleepStage> predicted);
// Over class indices in [0, k). Also throws kBadClass.
ConfusionMatrix Confusion(std::span<const int> truth,
                          std::span<const int> predicted, std::size_t k);

// trace / total. Errors: kEmpty.
double Accuracy(const ConfusionMatrix& cm);

// A zero denominator yields 0 with the matching *_defined flag cleared.
struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = false;
  bool recall_defined = false;

  friend bool operator==(const PrecisionRecall&, const PrecisionRecall&) = default;
};

// Errors: kEmpty, kBadClass.
PrecisionRecall ComputePrecisionRecall(const ConfusionMatrix& cm, std::size_t c);

enum class Averaging { kMacro, kMicro };

std::string_view AveragingName(Averaging averaging);
std::optional<Averaging> ParseAveraging(std::string_view name);

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<PrecisionRecall> per_class;
  // Unweighted mean over classes whose value is defined.
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  // Pooled TP / FP / FN over all classes.
  double micro_precision = 0.0;
  double micro_recall = 0.0;

  double precision(Averaging a) const {
    return a == Averaging::kMacro ? macro_precision : micro_precision;
  }
  double recall(Averaging a) const {
    return a == Averaging::kMacro ? macro_recall : micro_recall;
  }

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Errors: kEmpty.
MetricsReport Report(const ConfusionMatrix& cm);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_EVALUATE_H_
