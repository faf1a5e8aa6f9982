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

#include "sleepstage/serialize.h"

#include <string>
#include <vector>

#include "sleepstage/error.h"

namespace sleepstage {

namespace {

Json MatrixToJson(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

Matrix MatrixFromJson(const Json& j, std::size_t cols_if_empty = 0) {
  if (!j.is_array()) throw Error(ErrorCode::kMalformedModel, "matrix must be an array");
  if (j.empty()) return Matrix(0, cols_if_empty);
  const std::size_t cols = j.at(0).size();
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = j.at(i).get<std::vector<double>>();
    if (row.size() != cols) {
      throw Error(ErrorCode::kMalformedModel, "ragged matrix");
    }
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

Json TreeToJson(const Tree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"leaf_class", n.leaf_class},
                     {"value", n.value}});
  }
  return {{"nodes", nodes}};
}

Tree TreeFromJson(const Json& j) {
  Tree tree;
  for (const Json& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<std::int32_t>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<std::int32_t>();
    node.right = n.at("right").get<std::int32_t>();
    node.leaf_class = n.value("leaf_class", 0);
    node.value = n.value("value", 0.0);
    tree.nodes.push_back(node);
  }
  return tree;
}

SleepStage StageFromJson(const Json& j) {
  const auto s = ParseStageToken(j.get<std::string>());
  if (!s || *s == SleepStage::kExcluded) {
    throw Error(ErrorCode::kMalformedModel, "bad class label");
  }
  return *s;
}

// Re-throws JSON library errors as kMalformedModel.
template <typename Fn>
auto Guard(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedModel, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json ToJson(const ReducedBasis& basis) {
  return {{"kind", ReductionKindName(basis.kind)},
          {"k", basis.k},
          {"mean", basis.mean},
          {"components", MatrixToJson(basis.components)},
          {"explained", basis.explained}};
}

ReducedBasis BasisFromJson(const Json& j) {
  return Guard("basis", [&] {
    ReducedBasis b;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pca") {
      b.kind = ReductionKind::kPca;
    } else if (kind == "svd") {
      b.kind = ReductionKind::kSvd;
    } else {
      throw Error(ErrorCode::kMalformedModel, "unknown basis kind '" + kind + "'");
    }
    b.k = j.at("k").get<std::size_t>();
    b.mean = j.at("mean").get<std::vector<double>>();
    b.components = MatrixFromJson(j.at("components"), b.mean.size());
    b.explained = j.at("explained").get<std::vector<double>>();
    if (b.components.rows() != b.k || b.components.cols() != b.mean.size() ||
        b.explained.size() != b.k) {
      throw Error(ErrorCode::kMalformedModel, "basis shape mismatch");
    }
    return b;
  });
}

Json ToJson(const ModelSpec& spec) {
  const Hyperparameters& h = spec.hyper;
  return {{"algorithm", AlgorithmName(spec.algorithm)},
          {"hyperparameters",
           {{"lr_l2", h.lr_l2},
            {"lr_learning_rate", h.lr_learning_rate},
            {"lr_iterations", h.lr_iterations},
            {"max_depth", h.max_depth},
            {"min_samples_leaf", h.min_samples_leaf},
            {"num_trees", h.num_trees},
            {"bootstrap", h.bootstrap},
            {"features_per_split", h.features_per_split},
            {"gbt_stages", h.gbt_stages},
            {"gbt_learning_rate", h.gbt_learning_rate},
            {"gbt_max_depth", h.gbt_max_depth},
            {"gbt_min_samples_leaf", h.gbt_min_samples_leaf}}},
          {"seed", spec.seed}};
}

ModelSpec SpecFromJson(const Json& j) {
  return Guard("spec", [&] {
    ModelSpec spec;
    if (j.contains("algorithm")) {
      const auto algo = ParseAlgorithm(j.at("algorithm").get<std::string>());
      if (!algo) throw Error(ErrorCode::kMalformedModel, "unknown algorithm");
      spec.algorithm = *algo;
    }
    if (j.contains("hyperparameters")) {
      const Json& h = j.at("hyperparameters");
      Hyperparameters& p = spec.hyper;
      p.lr_l2 = h.value("lr_l2", p.lr_l2);
      p.lr_learning_rate = h.value("lr_learning_rate", p.lr_learning_rate);
      p.lr_iterations = h.value("lr_iterations", p.lr_iterations);
      p.max_depth = h.value("max_depth", p.max_depth);
      p.min_samples_leaf = h.value("min_samples_leaf", p.min_samples_leaf);
      p.num_trees = h.value("num_trees", p.num_trees);
      p.bootstrap = h.value("bootstrap", p.bootstrap);
      p.features_per_split = h.value("features_per_split", p.features_per_split);
      p.gbt_stages = h.value("gbt_stages", p.gbt_stages);
      p.gbt_learning_rate = h.value("gbt_learning_rate", p.gbt_learning_rate);
      p.gbt_max_depth = h.value("gbt_max_depth", p.gbt_max_depth);
      p.gbt_min_samples_leaf = h.value("gbt_min_samples_leaf", p.gbt_min_samples_leaf);
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    return spec;
  });
}

Json ToJson(const TrainedModel& model, const std::optional<ReducedBasis>& reduction) {
  Json classes = Json::array();
  for (SleepStage s : model.class_list) classes.push_back(StageToken(s));
  Json params = std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NbParams>) {
          return {{"log_prior", p.log_prior},
                  {"mean", MatrixToJson(p.mean)},
                  {"variance", MatrixToJson(p.variance)}};
        } else if constexpr (std::is_same_v<T, LrParams>) {
          return {{"feature_mean", p.feature_mean},
                  {"feature_scale", p.feature_scale},
                  {"weights", MatrixToJson(p.weights)}};
        } else if constexpr (std::is_same_v<T, Tree>) {
          return TreeToJson(p);
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          Json trees = Json::array();
          for (const Tree& t : p.trees) trees.push_back(TreeToJson(t));
          return {{"trees", trees}, {"tree_seeds", p.tree_seeds}};
        } else {
          Json stages = Json::array();
          for (const auto& ensemble : p.stages) {
            Json e = Json::array();
            for (const Tree& t : ensemble) e.push_back(TreeToJson(t));
            stages.push_back(e);
          }
          return {{"initial_score", p.initial_score},
                  {"learning_rate", p.learning_rate},
                  {"stages", stages}};
        }
      },
      model.params);
  Json j = {{"spec", ToJson(model.spec)},
            {"class_list", classes},
            {"dim", model.dim},
            {"parameters", params}};
  if (reduction) j["reduction"] = ToJson(*reduction);
  return j;
}

TrainedModel ModelFromJson(const Json& j) {
  TrainedModel model = Guard("model", [&] {
    TrainedModel m;
    m.spec = SpecFromJson(j.at("spec"));
    for (const Json& c : j.at("class_list")) m.class_list.push_back(StageFromJson(c));
    m.dim = j.at("dim").get<std::size_t>();
    const Json& p = j.at("parameters");
    switch (m.spec.algorithm) {
      case Algorithm::kNb: {
        NbParams nb;
        nb.log_prior = p.at("log_prior").get<std::vector<double>>();
        nb.mean = MatrixFromJson(p.at("mean"), m.dim);
        nb.variance = MatrixFromJson(p.at("variance"), m.dim);
        m.params = std::move(nb);
        break;
      }
      case Algorithm::kLr: {
        LrParams lr;
        lr.feature_mean = p.at("feature_mean").get<std::vector<double>>();
        lr.feature_scale = p.at("feature_scale").get<std::vector<double>>();
        lr.weights = MatrixFromJson(p.at("weights"), m.dim + 1);
        m.params = std::move(lr);
        break;
      }
      case Algorithm::kDt:
        m.params = TreeFromJson(p);
        break;
      case Algorithm::kRf: {
        ForestParams f;
        for (const Json& t : p.at("trees")) f.trees.push_back(TreeFromJson(t));
        f.tree_seeds = p.at("tree_seeds").get<std::vector<std::uint64_t>>();
        m.params = std::move(f);
        break;
      }
      case Algorithm::kGbt: {
        GbtParams g;
        g.initial_score = p.at("initial_score").get<std::vector<double>>();
        g.learning_rate = p.at("learning_rate").get<double>();
        for (const Json& e : p.at("stages")) {
          std::vector<Tree> ensemble;
          for (const Json& t : e) ensemble.push_back(TreeFromJson(t));
          g.stages.push_back(std::move(ensemble));
        }
        m.params = std::move(g);
        break;
      }
    }
    return m;
  });
  ValidateModel(model);
  return model;
}

std::optional<ReducedBasis> ReductionFromModelJson(const Json& j) {
  if (!j.contains("reduction") || j.at("reduction").is_null()) return std::nullopt;
  return BasisFromJson(j.at("reduction"));
}

Json ToJson(const MetricsReport& report) {
  Json per_class = Json::array();
  for (const PrecisionRecall& pr : report.per_class) {
    per_class.push_back({{"precision", pr.precision},
                         {"recall", pr.recall},
                         {"precision_defined", pr.precision_defined},
                         {"recall_defined", pr.recall_defined}});
  }
  return {{"accuracy", report.accuracy},
          {"macro_precision", report.macro_precision},
          {"macro_recall", report.macro_recall},
          {"micro_precision", report.micro_precision},
          {"micro_recall", report.micro_recall},
          {"per_class", per_class}};
}

Json ToJson(const ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (std::size_t t = 0; t < cm.num_classes(); ++t) {
    Json row = Json::array();
    for (std::size_t p = 0; p < cm.num_classes(); ++p) row.push_back(cm.count(t, p));
    rows.push_back(row);
  }
  return rows;
}

Json ToJson(const BenchReport& report) {
  Json rows = Json::array();
  for (const BenchRow& r : report.rows) {
    rows.push_back({{"algo", r.algorithm},
                    {"reduce", r.reduction},
                    {"workers", r.workers},
                    {"A", r.accuracy},
                    {"P", r.precision},
                    {"R", r.recall},
                    {"ingest_s", r.times.ingest_s},
                    {"featurize_s", r.times.featurize_s},
                    {"reduce_s", r.times.reduce_s},
                    {"train_s", r.times.train_s},
                    {"eval_s", r.times.eval_s},
                    {"total_s", r.total_s}});
  }
  return {{"environment", report.environment}, {"rows", rows}};
}

BenchReport BenchReportFromJson(const Json& j) {
  return Guard("report", [&] {
    BenchReport report;
    report.environment = j.value("environment", std::string());
    for (const Json& r : j.at("rows")) {
      BenchRow row;
      row.algorithm = r.at("algo").get<std::string>();
      row.reduction = r.at("reduce").get<std::string>();
      row.workers = r.at("workers").get<int>();
      row.accuracy = r.at("A").get<double>();
      row.precision = r.at("P").get<double>();
      row.recall = r.at("R").get<double>();
      row.times.ingest_s = r.value("ingest_s", 0.0);
      row.times.featurize_s = r.at("featurize_s").get<double>();
      row.times.reduce_s = r.at("reduce_s").get<double>();
      row.times.train_s = r.at("train_s").get<double>();
      row.times.eval_s = r.at("eval_s").get<double>();
      row.total_s = r.at("total_s").get<double>();
      report.rows.push_back(std::move(row));
    }
    return report;
  });
}

PipelineConfig ConfigFromJson(const Json& j, PipelineConfig base) {
  try {
    if (j.contains("data")) base.source = ParseDataSource(j.at("data").get<std::string>());
    if (j.contains("edf")) {
      EdfSource edf;
      edf.edf_paths = j.at("edf").get<std::vector<std::string>>();
      edf.hypnogram_paths = j.value("hypnogram", std::vector<std::string>{});
      if (j.contains("channel")) edf.channel = j.at("channel").get<std::string>();
      base.source = std::move(edf);
    }
    if (j.contains("algo")) {
      const auto algo = ParseAlgorithm(j.at("algo").get<std::string>());
      if (!algo) throw Error(ErrorCode::kInvalidArgument, "unknown algo");
      base.model.algorithm = *algo;
    }
    if (j.contains("hyperparameters")) {
      const Algorithm keep = base.model.algorithm;
      const std::uint64_t seed = base.model.seed;
      base.model = SpecFromJson({{"hyperparameters", j.at("hyperparameters")}});
      base.model.algorithm = keep;
      base.model.seed = seed;
    }
    if (j.contains("seed")) base.model.seed = j.at("seed").get<std::uint64_t>();
    const std::size_t k = j.value("k", kDefaultReducedDim);
    if (j.contains("reduce")) {
      base.reductions.clear();
      for (const Json& r : j.at("reduce")) {
        const auto red = ParseReduction(r.get<std::string>(), k);
        if (!red) throw Error(ErrorCode::kInvalidArgument, "unknown reduction");
        base.reductions.push_back(*red);
      }
    } else if (j.contains("k")) {
      for (Reduction& r : base.reductions) r.k = k;
    }
    base.train_fraction = j.value("train_fraction", base.train_fraction);
    base.split_seed = j.value("split_seed", base.split_seed);
    if (j.contains("workers")) base.worker_counts = j.at("workers").get<std::vector<int>>();
    if (j.contains("averaging")) {
      const auto avg = ParseAveraging(j.at("averaging").get<std::string>());
      if (!avg) throw Error(ErrorCode::kInvalidArgument, "unknown averaging");
      base.averaging = *avg;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  return base;
}

}  // namespace sleepstage
