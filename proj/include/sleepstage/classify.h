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

#ifndef SLEEPSTAGE_CLASSIFY_H_
#define SLEEPSTAGE_CLASSIFY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sleepstage/features.h"
#include "sleepstage/matrix.h"
#include "sleepstage/stage.h"

namespace sleepstage {

enum class Algorithm { kNb, kLr, kDt, kRf, kGbt };

std::string_view AlgorithmName(Algorithm algorithm);  // "nb", "lr", ...
std::optional<Algorithm> ParseAlgorithm(std::string_view name);

// Defaults for every algorithm; each fit reads only its own fields.
struct Hyperparameters {
  // Logistic regression.
  double lr_l2 = 1e-4;
  double lr_learning_rate = 0.1;
  int lr_iterations = 500;
  // Decision tree, and each random-forest tree.
  int max_depth = 10;
  int min_samples_leaf = 5;
  // Random forest.
  int num_trees = 100;
  bool bootstrap = true;
  int features_per_split = 0;  // 0 selects floor(sqrt(D))
  // Gradient-boosted trees, one ensemble per class.
  int gbt_stages = 50;
  double gbt_learning_rate = 0.1;
  int gbt_max_depth = 3;
  int gbt_min_samples_leaf = 1;

  friend bool operator==(const Hyperparameters&,
                         const Hyperparameters&) = default;
};

struct ModelSpec {
  Algorithm algorithm = Algorithm::kNb;
  Hyperparameters hyper;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Throws kInvalidArgument for out-of-range hyperparameters.
void ValidateSpec(const ModelSpec& spec);

inline constexpr double kNbVarianceScale = 1e-9;
inline constexpr double kNbVarianceOffset = 1e-12;
inline constexpr double kLrStdFloor = 1e-12;
inline constexpr double kNewtonFloor = 1e-12;

struct NbParams {
  std::vector<double> log_prior;  // K
  Matrix mean;                    // K x D
  Matrix variance;                // K x D, floored

  friend bool operator==(const NbParams&, const NbParams&) = default;
};

struct LrParams {
  std::vector<double> feature_mean;   // D
  std::vector<double> feature_scale;  // D, floored standard deviations
  Matrix weights;                     // K x (D + 1); last column is the bias

  friend bool operator==(const LrParams&, const LrParams&) = default;
};

// feature < 0 marks a leaf. Classification leaves carry leaf_class (an index
// into the model's class_list); regression leaves carry value.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf_class = 0;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Node 0 is the root. Rows with x[feature] <= threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& Leaf(std::span<const double> row) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct ForestParams {
  std::vector<Tree> trees;
  std::vector<std::uint64_t> tree_seeds;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct GbtParams {
  std::vector<double> initial_score;      // K
  std::vector<std::vector<Tree>> stages;  // K ensembles of M regression trees
  double learning_rate = 0.1;

  friend bool operator==(const GbtParams&, const GbtParams&) = default;
};

using ModelParams =
    std::variant<NbParams, LrParams, Tree, ForestParams, GbtParams>;

struct TrainedModel {
  ModelSpec spec;
  std::vector<SleepStage> class_list;  // classes seen in training, W..R order
  std::size_t dim = 0;
  ModelParams params;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// All fits throw kEmptyDataset on N = 0. Every fit is a pure function of
// (data, spec); the worker count never changes the result.
TrainedModel NbFit(const Dataset& data, const ModelSpec& spec = {});
// Also throws kSingleClass. When `loss_history` is given it receives the
// regularized training loss before each step and after the last.
TrainedModel LrFit(const Dataset& data, const ModelSpec& spec,
                   std::vector<double>* loss_history = nullptr);
TrainedModel DtFit(const Dataset& data, const ModelSpec& spec);
TrainedModel RfFit(const Dataset& data, const ModelSpec& spec,
                   int workers = 1);
TrainedModel GbtFit(const Dataset& data, const ModelSpec& spec,
                    int workers = 1);

// Dispatches on spec.algorithm.
TrainedModel Fit(const Dataset& data, const ModelSpec& spec, int workers = 1);

SleepStage Predict(const TrainedModel& model, std::span<const double> row);

// Row-wise predictions. Errors: kDimensionMismatch.
std::vector<SleepStage> PredictBatch(const TrainedModel& model,
                                     const Matrix& x, int workers = 1);

// Structural checks on a deserialized model (node links, payload shapes).
// Throws kMalformedModel.
void ValidateModel(const TrainedModel& model);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_CLASSIFY_H_
