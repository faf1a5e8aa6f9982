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

#ifndef SLEEPSTAGE_SERIALIZE_H_
#define SLEEPSTAGE_SERIALIZE_H_

#include <optional>

#include "json.hpp"
#include "sleepstage/bench.h"
#include "sleepstage/classify.h"
#include "sleepstage/evaluate.h"
#include "sleepstage/reduce.h"

namespace sleepstage {

using Json = nlohmann::ordered_json;

// {kind, k, mean[], components[][], explained[]}
Json ToJson(const ReducedBasis& basis);
ReducedBasis BasisFromJson(const Json& j);

Json ToJson(const ModelSpec& spec);
ModelSpec SpecFromJson(const Json& j);

// {spec, class_list, dim, parameters}; an optional "reduction" basis is
// stored alongside so a model can be applied to raw feature files.
Json ToJson(const TrainedModel& model,
            const std::optional<ReducedBasis>& reduction = std::nullopt);
TrainedModel ModelFromJson(const Json& j);
std::optional<ReducedBasis> ReductionFromModelJson(const Json& j);

Json ToJson(const MetricsReport& report);
Json ToJson(const ConfusionMatrix& cm);

Json ToJson(const BenchReport& report);
BenchReport BenchReportFromJson(const Json& j);

// Fields present in `j` override `base`. Keys mirror PipelineConfig:
// data ("synth:N[:seed[:fs]]" or a CSV path) or edf/hypnogram arrays,
// algo, hyperparameters, seed, reduce (array of names), k, train_fraction,
// split_seed, workers, averaging.
PipelineConfig ConfigFromJson(const Json& j, PipelineConfig base = {});

}  // namespace sleepstage

#endif  // SLEEPSTAGE_SERIALIZE_H_
