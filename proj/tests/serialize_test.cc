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

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "sleepstage/serialize.h"
#include "support/errors.h"

namespace sleepstage {
namespace {

using ::sleepstage::testing::ThrownCode;

Dataset Blobs(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % kNumStages;
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = g(rng) + (j % kNumStages == c ? 2.5 : 0.0);
    out.x.AppendRow(row);
    out.y.push_back(kAllStages[c]);
  }
  out.feature_names = DefaultFeatureNames(d);
  return out;
}

TEST(SerializeTest, BasisRoundTrip) {
  const Dataset d = Blobs(60, 8, 1);
  for (const ReducedBasis& b : {PcaFit(d.x, 5), SvdReduceFit(d.x, 3)}) {
    const Json j = ToJson(b);
    EXPECT_TRUE(j.contains("kind"));
    EXPECT_TRUE(j.contains("components"));
    EXPECT_EQ(BasisFromJson(Json::parse(j.dump())), b);
  }
}

TEST(SerializeTest, ModelRoundTripEveryAlgorithm) {
  const Dataset d = Blobs(60, 6, 2);
  for (Algorithm a : {Algorithm::kNb, Algorithm::kLr, Algorithm::kDt,
                      Algorithm::kRf, Algorithm::kGbt}) {
    ModelSpec spec;
    spec.algorithm = a;
    spec.seed = 99;
    spec.hyper.num_trees = 7;
    spec.hyper.gbt_stages = 4;
    const TrainedModel m = Fit(d, spec);
    const std::string text = ToJson(m).dump();
    const TrainedModel back = ModelFromJson(Json::parse(text));
    EXPECT_EQ(back, m) << AlgorithmName(a);
    EXPECT_EQ(PredictBatch(back, d.x), PredictBatch(m, d.x));
  }
}

TEST(SerializeTest, ModelCarriesOptionalReduction) {
  const Dataset d = Blobs(40, 6, 3);
  const ReducedBasis basis = PcaFit(d.x, 3);
  Dataset reduced = d;
  reduced.x = Transform(basis, d.x);
  reduced.feature_names = DefaultFeatureNames(3);
  const TrainedModel m = NbFit(reduced);
  const Json j = ToJson(m, basis);
  EXPECT_EQ(ReductionFromModelJson(j), basis);
  EXPECT_EQ(ReductionFromModelJson(ToJson(m)), std::nullopt);
}

TEST(SerializeTest, MalformedModelRejected) {
  const Dataset d = Blobs(30, 4, 4);
  ModelSpec spec;
  spec.algorithm = Algorithm::kDt;
  Json j = ToJson(DtFit(d, spec));
  Json bad = j;
  bad["parameters"]["nodes"][0]["left"] = 0;
  if (bad["parameters"]["nodes"][0]["feature"] != -1) {
    EXPECT_EQ(ThrownCode([&] { ModelFromJson(bad); }), ErrorCode::kMalformedModel);
  }
  Json missing = j;
  missing.erase("class_list");
  EXPECT_EQ(ThrownCode([&] { ModelFromJson(missing); }), ErrorCode::kMalformedModel);
  Json wrong = j;
  wrong["spec"]["algorithm"] = "svm";
  EXPECT_EQ(ThrownCode([&] { ModelFromJson(wrong); }), ErrorCode::kMalformedModel);
}

TEST(SerializeTest, SpecRoundTrip) {
  ModelSpec spec;
  spec.algorithm = Algorithm::kGbt;
  spec.seed = 0xfedcba9876543210ull;
  spec.hyper.gbt_learning_rate = 0.3;
  spec.hyper.bootstrap = false;
  EXPECT_EQ(SpecFromJson(ToJson(spec)), spec);
}

TEST(SerializeTest, ConfigOverridesBase) {
  PipelineConfig base;
  base.worker_counts = {1, 2};
  const Json j = Json::parse(R"({
    "data": "synth:120:5",
    "algo": "rf",
    "seed": 3,
    "hyperparameters": {"num_trees": 9},
    "reduce": ["none", "pca"],
    "k": 10,
    "train_fraction": 0.75
  })");
  const PipelineConfig c = ConfigFromJson(j, base);
  ASSERT_TRUE(std::holds_alternative<SyntheticSource>(c.source));
  EXPECT_EQ(std::get<SyntheticSource>(c.source).num_epochs, 120u);
  EXPECT_EQ(std::get<SyntheticSource>(c.source).seed, 5u);
  EXPECT_EQ(c.model.algorithm, Algorithm::kRf);
  EXPECT_EQ(c.model.hyper.num_trees, 9);
  EXPECT_EQ(c.model.seed, 3u);
  ASSERT_EQ(c.reductions.size(), 2u);
  EXPECT_EQ(c.reductions[1].kind, ReductionKind::kPca);
  EXPECT_EQ(c.reductions[1].k, 10u);
  EXPECT_EQ(c.train_fraction, 0.75);
  EXPECT_EQ(c.worker_counts, (std::vector<int>{1, 2}));
}

}  // namespace
}  // namespace sleepstage
