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

// Python bindings. Arrays cross as float64 numpy arrays; labels as the
// stage tokens "W", "1", "2", "3", "4", "R".

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "sleepstage/bench.h"
#include "sleepstage/classify.h"
#include "sleepstage/error.h"
#include "sleepstage/evaluate.h"
#include "sleepstage/features.h"
#include "sleepstage/ingest.h"
#include "sleepstage/reduce.h"
#include "sleepstage/serialize.h"

namespace py = pybind11;

namespace sleepstage {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix ToMatrix(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kInvalidArgument, "expected a 2-D array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

Array FromMatrix(const Matrix& m) {
  Array a({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), a.mutable_data());
  return a;
}

std::vector<SleepStage> ToStages(const std::vector<std::string>& tokens) {
  std::vector<SleepStage> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    const auto s = ParseStageToken(t);
    if (!s || !IsClassifierStage(*s)) {
      throw Error(ErrorCode::kBadStageToken, "bad stage label '" + t + "'");
    }
    out.push_back(*s);
  }
  return out;
}

std::vector<std::string> ToTokens(const std::vector<SleepStage>& stages) {
  std::vector<std::string> out;
  out.reserve(stages.size());
  for (SleepStage s : stages) out.emplace_back(StageToken(s));
  return out;
}

py::object ToPython(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json FromPython(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Dataset MakeDataset(const Array& x, const std::vector<std::string>& y) {
  Dataset d{ToMatrix(x), ToStages(y), {}};
  d.feature_names = DefaultFeatureNames(d.dim());
  return d;
}

ModelSpec MakeSpec(const std::string& algo, std::uint64_t seed, const py::dict& hyper) {
  Json j = {{"algorithm", algo}, {"seed", seed}, {"hyperparameters", FromPython(hyper)}};
  const ModelSpec spec = SpecFromJson(j);
  ValidateSpec(spec);
  return spec;
}

// Features and labels for a balanced synthetic recording of n epochs.
py::tuple Synthesize(std::size_t n, std::uint64_t seed, double fs, int workers) {
  const EpochSet e = LoadEpochs(SyntheticSource{n, seed, fs});
  const Dataset d = BuildDataset(e.epochs, e.sample_rate_hz, workers);
  return py::make_tuple(FromMatrix(d.x), ToTokens(d.y));
}

}  // namespace
}  // namespace sleepstage

PYBIND11_MODULE(_core, m) {
  using namespace sleepstage;
  m.doc() = "EEG sleep-stage features, reduction, classifiers and metrics";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&] {
    return py::object(py::exception<Error>(m, "SleepstageError", PyExc_ValueError));
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("code") = ErrorCodeName(e.code());
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.attr("NUM_FEATURES") = kFeatureDim;
  m.attr("STAGES") = std::vector<std::string>{"W", "1", "2", "3", "4", "R"};

  m.def(
      "featurize",
      [](const std::vector<double>& samples, double fs) {
        const FeatureVector f = Featurize(samples, fs);
        return std::vector<double>(f.begin(), f.end());
      },
      py::arg("samples"), py::arg("sample_rate_hz"),
      "75 features of one epoch: 15 per frequency band.");
  m.def("feature_names", [] {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < kFeatureDim; ++i) names.push_back(FeatureSlotName(i));
    return names;
  });
  m.def("synthesize", &Synthesize, py::arg("n"), py::arg("seed") = 42,
        py::arg("sample_rate_hz") = 100.0, py::arg("workers") = 1,
        "Returns (features, labels) for a balanced synthetic recording.");
  m.def(
      "read_dataset",
      [](const std::string& path) {
        const Dataset d = ReadDatasetCsv(ReadFile(path));
        return py::make_tuple(FromMatrix(d.x), ToTokens(d.y));
      },
      py::arg("path"));

  py::class_<ReducedBasis>(m, "Basis")
      .def_property_readonly("kind",
                             [](const ReducedBasis& b) { return ReductionKindName(b.kind); })
      .def_readonly("k", &ReducedBasis::k)
      .def_readonly("mean", &ReducedBasis::mean)
      .def_readonly("explained", &ReducedBasis::explained)
      .def_property_readonly("components",
                             [](const ReducedBasis& b) { return FromMatrix(b.components); })
      .def(
          "transform",
          [](const ReducedBasis& b, const Array& x, int workers) {
            return FromMatrix(Transform(b, ToMatrix(x), workers));
          },
          py::arg("x"), py::arg("workers") = 1)
      .def("reconstruct", [](const ReducedBasis& b, const Array& z) {
        return FromMatrix(Reconstruct(b, ToMatrix(z)));
      });
  m.def(
      "pca", [](const Array& x, std::size_t k) { return PcaFit(ToMatrix(x), k); },
      py::arg("x"), py::arg("k"));
  m.def(
      "svd", [](const Array& x, std::size_t k) { return SvdReduceFit(ToMatrix(x), k); },
      py::arg("x"), py::arg("k"));

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly(
          "algorithm", [](const TrainedModel& t) { return AlgorithmName(t.spec.algorithm); })
      .def(
          "predict",
          [](const TrainedModel& t, const Array& x, int workers) {
            return ToTokens(PredictBatch(t, ToMatrix(x), workers));
          },
          py::arg("x"), py::arg("workers") = 1)
      .def("to_json", [](const TrainedModel& t) { return ToJson(t, std::nullopt).dump(); })
      .def_static("from_json", [](const std::string& text) {
        try {
          return ModelFromJson(Json::parse(text));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kMalformedModel, e.what());
        }
      });
  m.def(
      "fit",
      [](const Array& x, const std::vector<std::string>& y, const std::string& algo,
         std::uint64_t seed, const py::dict& hyper, int workers) {
        return Fit(MakeDataset(x, y), MakeSpec(algo, seed, hyper), workers);
      },
      py::arg("x"), py::arg("y"), py::arg("algo") = "nb", py::arg("seed") = 0,
      py::arg("hyperparameters") = py::dict(), py::arg("workers") = 1);

  m.def(
      "split",
      [](const std::vector<std::string>& y, double train_fraction, std::uint64_t seed) {
        const SplitIndices s = SplitRows(ToStages(y), train_fraction, seed);
        return py::make_tuple(s.train, s.test);
      },
      py::arg("labels"), py::arg("train_fraction") = 0.8, py::arg("seed") = 42);

  m.def(
      "metrics",
      [](const std::vector<std::string>& truth, const std::vector<std::string>& predicted) {
        const ConfusionMatrix cm = Confusion(ToStages(truth), ToStages(predicted));
        py::dict d = ToPython(ToJson(Report(cm)));
        d["confusion"] = ToPython(ToJson(cm));
        return d;
      },
      py::arg("truth"), py::arg("predicted"),
      "Accuracy, macro and micro precision/recall, per-class scores.");

  m.def(
      "bench",
      [](const py::dict& config) {
        return ToPython(ToJson(Sweep(ConfigFromJson(FromPython(config)))));
      },
      py::arg("config"),
      "Worker sweep; config uses the same keys as the CLI's --config file.");
}
