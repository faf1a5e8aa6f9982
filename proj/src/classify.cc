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
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "classify_internal.h"
#include "sleepstage/classify.h"
#include "sleepstage/error.h"
#include "sleepstage/parallel.h"

namespace sleepstage {

namespace internal {

EncodedLabels EncodeLabels(std::span<const SleepStage> y) {
  std::array<std::size_t, kNumStages> seen{};
  for (SleepStage s : y) seen[StageIndex(s)]++;
  EncodedLabels enc;
  std::array<int, kNumStages> slot{};
  for (std::size_t s = 0; s < kNumStages; ++s) {
    if (seen[s] == 0) continue;
    slot[s] = static_cast<int>(enc.class_list.size());
    enc.class_list.push_back(kAllStages[s]);
    enc.counts.push_back(seen[s]);
  }
  enc.index.reserve(y.size());
  for (SleepStage s : y) enc.index.push_back(slot[StageIndex(s)]);
  return enc;
}

}  // namespace internal

namespace {

void RequireRows(const Dataset& data) {
  ValidateDataset(data);
  if (data.size() == 0) throw Error(ErrorCode::kEmptyDataset, "no training rows");
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNb: return "nb";
    case Algorithm::kLr: return "lr";
    case Algorithm::kDt: return "dt";
    case Algorithm::kRf: return "rf";
    case Algorithm::kGbt: return "gbt";
  }
  return "?";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kNb, Algorithm::kLr, Algorithm::kDt,
                      Algorithm::kRf, Algorithm::kGbt}) {
    if (AlgorithmName(a) == name) return a;
  }
  return std::nullopt;
}

void ValidateSpec(const ModelSpec& spec) {
  const Hyperparameters& h = spec.hyper;
  Require(h.lr_l2 >= 0.0 && std::isfinite(h.lr_l2), "lr_l2 must be >= 0");
  Require(h.lr_learning_rate > 0.0 && std::isfinite(h.lr_learning_rate),
          "lr_learning_rate must be > 0");
  Require(h.lr_iterations >= 0, "lr_iterations must be >= 0");
  Require(h.max_depth >= 0, "max_depth must be >= 0");
  Require(h.min_samples_leaf >= 1, "min_samples_leaf must be >= 1");
  Require(h.num_trees >= 1, "num_trees must be >= 1");
  Require(h.features_per_split >= 0, "features_per_split must be >= 0");
  Require(h.gbt_stages >= 0, "gbt_stages must be >= 0");
  Require(h.gbt_learning_rate > 0.0 && std::isfinite(h.gbt_learning_rate),
          "gbt_learning_rate must be > 0");
  Require(h.gbt_max_depth >= 0, "gbt_max_depth must be >= 0");
  Require(h.gbt_min_samples_leaf >= 1, "gbt_min_samples_leaf must be >= 1");
}

TrainedModel NbFit(const Dataset& data, const ModelSpec& spec) {
  ValidateSpec(spec);
  RequireRows(data);
  const internal::EncodedLabels enc = internal::EncodeLabels(data.y);
  const std::size_t k = enc.class_list.size();
  const std::size_t d = data.dim();
  const std::size_t n = data.size();

  NbParams nb;
  nb.log_prior.resize(k);
  nb.mean = Matrix(k, d);
  nb.variance = Matrix(k, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(enc.index[i]);
    for (std::size_t j = 0; j < d; ++j) nb.mean(c, j) += data.x(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto nc = static_cast<double>(enc.counts[c]);
    nb.log_prior[c] = std::log(nc / static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) nb.mean(c, j) /= nc;
  }

  std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) global_mean[j] += data.x(i, j);
  }
  for (double& m : global_mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(enc.index[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double dc = data.x(i, j) - nb.mean(c, j);
      nb.variance(c, j) += dc * dc;
      const double dg = data.x(i, j) - global_mean[j];
      global_var[j] += dg * dg;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    global_var[j] /= static_cast<double>(n);
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto nc = static_cast<double>(enc.counts[c]);
    for (std::size_t j = 0; j < d; ++j) {
      const double floor = kNbVarianceScale * (global_var[j] + kNbVarianceOffset);
      nb.variance(c, j) = std::max(nb.variance(c, j) / nc, floor);
    }
  }

  TrainedModel model;
  model.spec = spec;
  model.class_list = enc.class_list;
  model.dim = d;
  model.params = std::move(nb);
  return model;
}

namespace {

// Softmax cross-entropy objective over standardized rows with an appended
// constant 1 for the bias.
double LrLossAndGradient(const Matrix& z, std::span<const int> labels,
                         const Matrix& w, double l2, Matrix* grad) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const std::size_t k = w.rows();
  std::fill(grad->data().begin(), grad->data().end(), 0.0);
  std::vector<double> logits(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = z.row(i);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      double s = w(c, d);
      const auto wc = w.row(c);
      for (std::size_t j = 0; j < d; ++j) s += wc[j] * row[j];
      logits[c] = s;
      top = std::max(top, s);
    }
    double norm = 0.0;
    for (double& l : logits) {
      l = std::exp(l - top);
      norm += l;
    }
    const auto yi = static_cast<std::size_t>(labels[i]);
    loss -= std::log(logits[yi] / norm);
    for (std::size_t c = 0; c < k; ++c) {
      const double g = logits[c] / norm - (c == yi ? 1.0 : 0.0);
      auto gc = grad->row(c);
      for (std::size_t j = 0; j < d; ++j) gc[j] += g * row[j];
      gc[d] += g;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double penalty = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    auto gc = grad->row(c);
    const auto wc = w.row(c);
    for (std::size_t j = 0; j <= d; ++j) gc[j] *= inv_n;
    for (std::size_t j = 0; j < d; ++j) {
      gc[j] += l2 * wc[j];
      penalty += wc[j] * wc[j];
    }
  }
  return loss * inv_n + 0.5 * l2 * penalty;
}

}  // namespace

TrainedModel LrFit(const Dataset& data, const ModelSpec& spec,
                   std::vector<double>* loss_history) {
  ValidateSpec(spec);
  RequireRows(data);
  const internal::EncodedLabels enc = internal::EncodeLabels(data.y);
  if (enc.class_list.size() < 2) {
    throw Error(ErrorCode::kSingleClass,
                "logistic regression needs at least two classes");
  }
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const std::size_t k = enc.class_list.size();

  // Canonical row order (label, then features) makes every sum below
  // independent of the order rows arrive in.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (enc.index[a] != enc.index[b]) return enc.index[a] < enc.index[b];
    const auto ra = data.x.row(a);
    const auto rb = data.x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });

  LrParams lr;
  lr.feature_mean.assign(d, 0.0);
  lr.feature_scale.assign(d, 0.0);
  for (std::size_t i : order) {
    for (std::size_t j = 0; j < d; ++j) lr.feature_mean[j] += data.x(i, j);
  }
  for (double& m : lr.feature_mean) m /= static_cast<double>(n);
  for (std::size_t i : order) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = data.x(i, j) - lr.feature_mean[j];
      lr.feature_scale[j] += dv * dv;
    }
  }
  for (double& s : lr.feature_scale) {
    s = std::max(std::sqrt(s / static_cast<double>(n)), kLrStdFloor);
  }

  Matrix z(n, d);
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    labels[r] = enc.index[i];
    for (std::size_t j = 0; j < d; ++j) {
      z(r, j) = (data.x(i, j) - lr.feature_mean[j]) / lr.feature_scale[j];
    }
  }

  lr.weights = Matrix(k, d + 1, 0.0);
  Matrix grad(k, d + 1);
  const double rate = spec.hyper.lr_learning_rate;
  const double l2 = spec.hyper.lr_l2;
  if (loss_history) loss_history->clear();
  for (int it = 0; it < spec.hyper.lr_iterations; ++it) {
    const double loss = LrLossAndGradient(z, labels, lr.weights, l2, &grad);
    if (loss_history) loss_history->push_back(loss);
    auto w = lr.weights.data();
    const auto g = grad.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= rate * g[i];
  }
  if (loss_history) {
    loss_history->push_back(LrLossAndGradient(z, labels, lr.weights, l2, &grad));
  }

  TrainedModel model;
  model.spec = spec;
  model.class_list = enc.class_list;
  model.dim = d;
  model.params = std::move(lr);
  return model;
}

TrainedModel Fit(const Dataset& data, const ModelSpec& spec, int workers) {
  switch (spec.algorithm) {
    case Algorithm::kNb: return NbFit(data, spec);
    case Algorithm::kLr: return LrFit(data, spec);
    case Algorithm::kDt: return DtFit(data, spec);
    case Algorithm::kRf: return RfFit(data, spec, workers);
    case Algorithm::kGbt: return GbtFit(data, spec, workers);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm");
}

namespace {

struct Scorer {
  const TrainedModel& model;
  std::span<const double> row;
  std::vector<double>& scores;

  void operator()(const NbParams& nb) const {
    const std::size_t d = model.dim;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      double s = nb.log_prior[c];
      for (std::size_t j = 0; j < d; ++j) {
        const double var = nb.variance(c, j);
        const double diff = row[j] - nb.mean(c, j);
        s -= 0.5 * std::log(2.0 * std::numbers::pi * var) + diff * diff / (2.0 * var);
      }
      scores[c] = s;
    }
  }
  void operator()(const LrParams& lr) const {
    const std::size_t d = model.dim;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      double s = lr.weights(c, d);
      for (std::size_t j = 0; j < d; ++j) {
        s += lr.weights(c, j) * (row[j] - lr.feature_mean[j]) / lr.feature_scale[j];
      }
      scores[c] = s;
    }
  }
  void operator()(const Tree& tree) const {
    std::fill(scores.begin(), scores.end(), 0.0);
    scores[static_cast<std::size_t>(tree.Leaf(row).leaf_class)] = 1.0;
  }
  void operator()(const ForestParams& forest) const {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (const Tree& t : forest.trees) {
      scores[static_cast<std::size_t>(t.Leaf(row).leaf_class)] += 1.0;
    }
  }
  void operator()(const GbtParams& gbt) const {
    for (std::size_t c = 0; c < scores.size(); ++c) {
      double s = gbt.initial_score[c];
      for (const Tree& t : gbt.stages[c]) s += gbt.learning_rate * t.Leaf(row).value;
      scores[c] = s;
    }
  }
};

}  // namespace

SleepStage Predict(const TrainedModel& model, std::span<const double> row) {
  if (row.size() != model.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(model.dim) + " features, got " +
                    std::to_string(row.size()));
  }
  std::vector<double> scores(model.class_list.size());
  std::visit(Scorer{model, row, scores}, model.params);
  return model.class_list[internal::ArgMax<double>(scores)];
}

std::vector<SleepStage> PredictBatch(const TrainedModel& model, const Matrix& x,
                                     int workers) {
  if (x.rows() > 0 && x.cols() != model.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(model.dim) + " features, got " +
                    std::to_string(x.cols()));
  }
  std::vector<SleepStage> out(x.rows());
  ParallelFor(
      x.rows(), workers, [&](std::size_t i) { out[i] = Predict(model, x.row(i)); },
      /*block=*/64);
  return out;
}

namespace {

void CheckTree(const Tree& tree, std::size_t dim, std::size_t num_classes,
               bool classification) {
  const auto n = static_cast<std::int64_t>(tree.nodes.size());
  if (n == 0) throw Error(ErrorCode::kMalformedModel, "empty tree");
  // Children must point strictly forward, which rules out cycles.
  for (std::int64_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(i)];
    if (node.is_leaf()) {
      if (classification &&
          (node.leaf_class < 0 ||
           static_cast<std::size_t>(node.leaf_class) >= num_classes)) {
        throw Error(ErrorCode::kMalformedModel, "leaf class out of range");
      }
      continue;
    }
    if (static_cast<std::size_t>(node.feature) >= dim) {
      throw Error(ErrorCode::kMalformedModel, "split feature out of range");
    }
    if (node.left <= i || node.right <= i || node.left >= n || node.right >= n) {
      throw Error(ErrorCode::kMalformedModel, "bad child link");
    }
  }
}

}  // namespace

void ValidateModel(const TrainedModel& model) {
  const std::size_t k = model.class_list.size();
  const std::size_t d = model.dim;
  if (k == 0) throw Error(ErrorCode::kMalformedModel, "empty class list");
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NbParams>) {
          if (p.log_prior.size() != k || p.mean.rows() != k || p.mean.cols() != d ||
              p.variance.rows() != k || p.variance.cols() != d) {
            throw Error(ErrorCode::kMalformedModel, "naive Bayes shape");
          }
          for (double v : p.variance.data()) {
            if (!(v > 0.0)) {
              throw Error(ErrorCode::kMalformedModel, "non-positive variance");
            }
          }
        } else if constexpr (std::is_same_v<T, LrParams>) {
          if (p.feature_mean.size() != d || p.feature_scale.size() != d ||
              p.weights.rows() != k || p.weights.cols() != d + 1) {
            throw Error(ErrorCode::kMalformedModel, "logistic regression shape");
          }
        } else if constexpr (std::is_same_v<T, Tree>) {
          CheckTree(p, d, k, true);
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          if (p.trees.size() != static_cast<std::size_t>(model.spec.hyper.num_trees) ||
              p.tree_seeds.size() != p.trees.size()) {
            throw Error(ErrorCode::kMalformedModel, "forest size");
          }
          for (const Tree& t : p.trees) CheckTree(t, d, k, true);
        } else {
          if (p.initial_score.size() != k || p.stages.size() != k) {
            throw Error(ErrorCode::kMalformedModel, "boosting ensemble count");
          }
          for (const auto& ensemble : p.stages) {
            for (const Tree& t : ensemble) CheckTree(t, d, k, false);
          }
        }
      },
      model.params);
}

}  // namespace sleepstage
