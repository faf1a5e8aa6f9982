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
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "classify_internal.h"
#include "sleepstage/error.h"
#include "sleepstage/parallel.h"

namespace sleepstage {

namespace internal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SplitChoice {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = kNegInf;
};

// Midpoint that still separates a < b after rounding.
double Midpoint(double a, double b) {
  const double m = a + (b - a) * 0.5;
  return m < b ? m : a;
}

class ClassificationGrower {
 public:
  ClassificationGrower(const Matrix& x, std::span<const int> labels,
                       int num_classes, const SplitLimits& limits,
                       std::mt19937_64* rng)
      : x_(x),
        labels_(labels),
        k_(static_cast<std::size_t>(num_classes)),
        limits_(limits),
        rng_(rng),
        pool_(x.cols()) {
    std::iota(pool_.begin(), pool_.end(), 0);
  }

  Tree Grow(std::vector<std::uint32_t> rows) {
    Grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t Grow(std::vector<std::uint32_t> rows, int depth) {
    std::vector<std::int64_t> counts(k_, 0);
    for (std::uint32_t r : rows) counts[static_cast<std::size_t>(labels_[r])]++;
    const auto majority = static_cast<std::int32_t>(
        ArgMax<std::int64_t>(counts));

    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    TreeNode leaf;
    leaf.leaf_class = majority;
    tree_.nodes.push_back(leaf);

    const auto n = static_cast<std::int64_t>(rows.size());
    const bool pure = counts[static_cast<std::size_t>(majority)] == n;
    if (pure || depth >= limits_.max_depth || n < 2 * limits_.min_samples_leaf) {
      return id;
    }
    const SplitChoice best = BestSplit(rows, counts);
    if (best.feature < 0) return id;

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t r : rows) {
      (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::int32_t l = Grow(std::move(left), depth + 1);
    const std::int32_t r = Grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> CandidateFeatures() {
    const std::size_t d = pool_.size();
    const std::size_t m = limits_.features_per_split;
    if (m >= d || rng_ == nullptr) {
      std::vector<std::size_t> all(d);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(pool_[i], pool_[pick(*rng_)]);
    }
    std::vector<std::size_t> chosen(pool_.begin(), pool_.begin() + m);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  SplitChoice BestSplit(const std::vector<std::uint32_t>& rows,
                        const std::vector<std::int64_t>& totals) {
    const std::size_t n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(limits_.min_samples_leaf);
    SplitChoice best;
    std::vector<std::int64_t> left(k_), right(k_);

    for (std::size_t f : CandidateFeatures()) {
      buf_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        buf_[i] = {x_(rows[i], f), labels_[rows[i]]};
      }
      std::sort(buf_.begin(), buf_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (buf_.front().first == buf_.back().first) continue;

      std::fill(left.begin(), left.end(), 0);
      right = totals;
      // Sums of squared class counts; Gini decrease is maximized by
      // maximizing left_sq / n_left + right_sq / n_right.
      std::int64_t left_sq = 0;
      std::int64_t right_sq = 0;
      for (std::int64_t c : totals) right_sq += c * c;

      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto c = static_cast<std::size_t>(buf_[i].second);
        left_sq += 2 * left[c] + 1;
        right_sq -= 2 * right[c] - 1;
        ++left[c];
        --right[c];
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (buf_[i].first == buf_[i + 1].first) continue;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double score = static_cast<double>(left_sq) / static_cast<double>(nl) +
                             static_cast<double>(right_sq) / static_cast<double>(nr);
        if (score > best.score) {
          best.score = score;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = Midpoint(buf_[i].first, buf_[i + 1].first);
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> labels_;
  std::size_t k_;
  SplitLimits limits_;
  std::mt19937_64* rng_;
  std::vector<std::size_t> pool_;
  std::vector<std::pair<double, int>> buf_;
  Tree tree_;
};

class RegressionGrower {
 public:
  RegressionGrower(const Matrix& x, std::span<const double> target,
                   const SplitLimits& limits)
      : x_(x), target_(target), limits_(limits) {}

  Tree Grow(std::vector<std::uint32_t> rows) {
    Grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t Grow(std::vector<std::uint32_t> rows, int depth) {
    double sum = 0.0;
    double hess = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::uint32_t r : rows) {
      const double t = target_[r];
      sum += t;
      hess += std::abs(t) * (2.0 - std::abs(t));
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    TreeNode leaf;
    leaf.value = sum / std::max(hess, kNewtonFloor);
    tree_.nodes.push_back(leaf);

    const auto n = static_cast<std::int64_t>(rows.size());
    if (lo == hi || depth >= limits_.max_depth ||
        n < 2 * limits_.min_samples_leaf) {
      return id;
    }
    const SplitChoice best = BestSplit(rows, sum);
    if (best.feature < 0) return id;

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t r : rows) {
      (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::int32_t l = Grow(std::move(left), depth + 1);
    const std::int32_t r = Grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  SplitChoice BestSplit(const std::vector<std::uint32_t>& rows, double total) {
    const std::size_t n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(limits_.min_samples_leaf);
    const double parent = total * total / static_cast<double>(n);
    SplitChoice best;
    best.score = parent;  // a split must strictly reduce squared error
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      buf_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        buf_[i] = {x_(rows[i], f), target_[rows[i]]};
      }
      std::sort(buf_.begin(), buf_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (buf_.front().first == buf_.back().first) continue;
      double left = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left += buf_[i].second;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (buf_[i].first == buf_[i + 1].first) continue;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right = total - left;
        const double score = left * left / static_cast<double>(nl) +
                             right * right / static_cast<double>(nr);
        if (score > best.score) {
          best.score = score;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = Midpoint(buf_[i].first, buf_[i + 1].first);
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const double> target_;
  SplitLimits limits_;
  std::vector<std::pair<double, double>> buf_;
  Tree tree_;
};

}  // namespace

Tree GrowClassificationTree(const Matrix& x, std::span<const int> labels,
                            int num_classes, std::vector<std::uint32_t> rows,
                            const SplitLimits& limits, std::mt19937_64* rng) {
  return ClassificationGrower(x, labels, num_classes, limits, rng)
      .Grow(std::move(rows));
}

Tree GrowNewtonRegressionTree(const Matrix& x, std::span<const double> target,
                              std::vector<std::uint32_t> rows,
                              const SplitLimits& limits) {
  return RegressionGrower(x, target, limits).Grow(std::move(rows));
}

}  // namespace internal

namespace {

std::vector<std::uint32_t> AllRows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

void RequireRows(const Dataset& data) {
  ValidateDataset(data);
  if (data.size() == 0) throw Error(ErrorCode::kEmptyDataset, "no training rows");
}

// Per-tree seed derived only from the forest seed and the tree index, so
// trees can be grown in any order on any thread.
std::uint64_t TreeSeed(std::uint64_t seed, std::size_t tree) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tree),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(tree) >> 32)};
  std::mt19937_64 gen(seq);
  return gen();
}

}  // namespace

const TreeNode& Tree::Leaf(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(
        row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

TrainedModel DtFit(const Dataset& data, const ModelSpec& spec) {
  ValidateSpec(spec);
  RequireRows(data);
  const internal::EncodedLabels enc = internal::EncodeLabels(data.y);
  internal::SplitLimits limits{spec.hyper.max_depth, spec.hyper.min_samples_leaf,
                               data.dim()};
  TrainedModel model;
  model.spec = spec;
  model.class_list = enc.class_list;
  model.dim = data.dim();
  model.params = internal::GrowClassificationTree(
      data.x, enc.index, static_cast<int>(enc.class_list.size()),
      AllRows(data.size()), limits, nullptr);
  return model;
}

TrainedModel RfFit(const Dataset& data, const ModelSpec& spec, int workers) {
  ValidateSpec(spec);
  RequireRows(data);
  const internal::EncodedLabels enc = internal::EncodeLabels(data.y);
  const std::size_t d = data.dim();
  std::size_t m = spec.hyper.features_per_split > 0
                      ? static_cast<std::size_t>(spec.hyper.features_per_split)
                      : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
  m = std::clamp<std::size_t>(m, 1, std::max<std::size_t>(d, 1));
  const internal::SplitLimits limits{spec.hyper.max_depth,
                                     spec.hyper.min_samples_leaf, m};

  const auto num_trees = static_cast<std::size_t>(spec.hyper.num_trees);
  ForestParams forest;
  forest.trees.resize(num_trees);
  forest.tree_seeds.resize(num_trees);
  const std::size_t n = data.size();
  ParallelFor(num_trees, workers, [&](std::size_t t) {
    const std::uint64_t tree_seed = TreeSeed(spec.seed, t);
    std::mt19937_64 rng(tree_seed);
    std::vector<std::uint32_t> rows;
    if (spec.hyper.bootstrap) {
      rows.resize(n);
      std::uniform_int_distribution<std::uint32_t> pick(
          0, static_cast<std::uint32_t>(n - 1));
      for (auto& r : rows) r = pick(rng);
    } else {
      rows = AllRows(n);
    }
    forest.tree_seeds[t] = tree_seed;
    forest.trees[t] = internal::GrowClassificationTree(
        data.x, enc.index, static_cast<int>(enc.class_list.size()),
        std::move(rows), limits, &rng);
  });

  TrainedModel model;
  model.spec = spec;
  model.class_list = enc.class_list;
  model.dim = d;
  model.params = std::move(forest);
  return model;
}

TrainedModel GbtFit(const Dataset& data, const ModelSpec& spec, int workers) {
  ValidateSpec(spec);
  RequireRows(data);
  const internal::EncodedLabels enc = internal::EncodeLabels(data.y);
  const std::size_t k = enc.class_list.size();
  const std::size_t n = data.size();
  const internal::SplitLimits limits{spec.hyper.gbt_max_depth,
                                     spec.hyper.gbt_min_samples_leaf, data.dim()};
  const double rate = spec.hyper.gbt_learning_rate;
  const auto stages = static_cast<std::size_t>(spec.hyper.gbt_stages);

  GbtParams gbt;
  gbt.learning_rate = rate;
  gbt.initial_score.resize(k);
  gbt.stages.resize(k);

  // One-vs-rest: class c against everything else, targets in {-1, +1}.
  ParallelFor(k, workers, [&](std::size_t c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = enc.index[i] == static_cast<int>(c) ? 1.0 : -1.0;
    }
    const double ybar = std::clamp(
        (2.0 * static_cast<double>(enc.counts[c]) - static_cast<double>(n)) /
            static_cast<double>(n),
        -1.0 + 1e-12, 1.0 - 1e-12);
    const double f0 = 0.5 * std::log((1.0 + ybar) / (1.0 - ybar));
    gbt.initial_score[c] = f0;

    std::vector<double> score(n, f0);
    std::vector<double> residual(n);
    auto& ensemble = gbt.stages[c];
    ensemble.reserve(stages);
    for (std::size_t m = 0; m < stages; ++m) {
      for (std::size_t i = 0; i < n; ++i) {
        residual[i] = 2.0 * y[i] / (1.0 + std::exp(2.0 * y[i] * score[i]));
      }
      Tree tree = internal::GrowNewtonRegressionTree(data.x, residual,
                                                     AllRows(n), limits);
      for (std::size_t i = 0; i < n; ++i) {
        score[i] += rate * tree.Leaf(data.x.row(i)).value;
      }
      ensemble.push_back(std::move(tree));
    }
  });

  TrainedModel model;
  model.spec = spec;
  model.class_list = enc.class_list;
  model.dim = data.dim();
  model.params = std::move(gbt);
  return model;
}

}  // namespace sleepstage
