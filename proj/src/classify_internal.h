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

#ifndef SLEEPSTAGE_SRC_CLASSIFY_INTERNAL_H_
#define SLEEPSTAGE_SRC_CLASSIFY_INTERNAL_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sleepstage/classify.h"

namespace sleepstage::internal {

// Labels of a dataset as indices into its sorted class list.
struct EncodedLabels {
  std::vector<SleepStage> class_list;
  std::vector<int> index;  // per row
  std::vector<std::size_t> counts;  // per class
};

EncodedLabels EncodeLabels(std::span<const SleepStage> y);

// First index holding the maximum; the tie-break used by every classifier.
template <typename T>
std::size_t ArgMax(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

struct SplitLimits {
  int max_depth = 10;
  int min_samples_leaf = 1;
  std::size_t features_per_split = 0;  // == D considers every feature
};

// CART with Gini impurity over the (possibly repeated) rows given. When
// features_per_split < D, a fresh subset is drawn from `rng` at every node.
Tree GrowClassificationTree(const Matrix& x, std::span<const int> labels,
                            int num_classes, std::vector<std::uint32_t> rows,
                            const SplitLimits& limits, std::mt19937_64* rng);

// Least-squares regression tree on `target`; leaf values are one Newton step
// for the binomial deviance: sum(r) / max(sum(|r| (2 - |r|)), floor).
Tree GrowNewtonRegressionTree(const Matrix& x, std::span<const double> target,
                              std::vector<std::uint32_t> rows,
                              const SplitLimits& limits);

}  // namespace sleepstage::internal

#endif  // SLEEPSTAGE_SRC_CLASSIFY_INTERNAL_H_
