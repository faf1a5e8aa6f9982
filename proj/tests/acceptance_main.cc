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

// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit
// status is non-zero when any selected criterion fails.
//
//   sleepstage_acceptance                 # all criteria
//   sleepstage_acceptance --criterion 6   # one criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sleepstage/bench.h"
#include "sleepstage/classify.h"
#include "sleepstage/evaluate.h"
#include "sleepstage/features.h"
#include "sleepstage/ingest.h"
#include "sleepstage/reduce.h"
#include "support/edf_writer.h"

namespace sleepstage {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double Median3(const std::function<double()>& run) {
  double t[3] = {run(), run(), run()};
  std::sort(t, t + 3);
  return t[1];
}

std::vector<LabeledEpoch> SyntheticEpochs(std::size_t n, std::uint64_t seed,
                                          double fs = 100.0) {
  const std::vector<SleepStage> stages = BalancedStageSequence(n, seed);
  const auto [rec, hyp] = SynthesizeRecording(stages, fs, seed);
  return EpochSplit(rec, hyp);
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Direct evaluation of the 15 statistics, sharing nothing with the library:
// quantiles by rank counting, central moments by two passes.
std::vector<double> BruteForceFeatures(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> s = x;
  for (std::size_t i = 0; i < n; ++i)  // selection sort
    for (std::size_t j = i + 1; j < n; ++j)
      if (s[j] < s[i]) std::swap(s[i], s[j]);
  auto q = [&](double p) {
    const double h = (n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, n - 1);
    return s[lo] + (h - lo) * (s[hi] - s[lo]);
  };
  double sum = 0, inv = 0, energy = 0;
  for (double v : x) {
    sum += v;
    inv += 1.0 / std::max(std::fabs(v), 1e-12);
    energy += v * v;
  }
  const double mean = sum / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    m2 += std::pow(v - mean, 2);
    m3 += std::pow(v - mean, 3);
    m4 += std::pow(v - mean, 4);
  }
  const double std_dev = std::sqrt(m2 / (n - 1));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double q25 = q(0.25), q75 = q(0.75), iqr = q75 - q25;
  double kept_sum = 0;
  int kept = 0;
  for (double v : x) {
    if (v >= q25 - 1.5 * iqr && v <= q75 + 1.5 * iqr) {
      kept_sum += v;
      ++kept;
    }
  }
  double entropy = 0;
  if (s.back() > s.front()) {
    std::vector<int> bins(100, 0);
    for (double v : x) {
      int b = static_cast<int>((v - s.front()) / (s.back() - s.front()) * 100);
      ++bins[std::min(b, 99)];
    }
    for (int c : bins) {
      if (c) entropy -= (double(c) / n) * std::log(double(c) / n);
    }
  }
  const bool flat = m2 < 1e-12;
  const double skew = flat ? 0 : m3 / std::pow(m2, 1.5);
  const double kurt = flat ? 0 : m4 / (m2 * m2) - 3;
  return {mean, n / inv, kept ? kept_sum / kept : mean, energy, entropy,
          s.front(), q(0.5), s.back(), std_dev, skew, q25, q75, iqr, skew, kurt};
}

double RelErr(double got, double want) {
  if (want == 0.0) return std::fabs(got);
  return std::fabs(got - want) / std::fabs(want);
}

Outcome FeatureOracle() {
  const auto start = Clock::now();
  std::ifstream in(std::string(SLEEPSTAGE_TEST_DATA_DIR) + "/feature_oracle.json");
  if (!in) return {false, "oracle file missing"};
  const nlohmann::json oracle = nlohmann::json::parse(in);
  double worst_script = 0.0, worst_brute = 0.0;
  std::size_t cases = 0;
  for (const auto& c : oracle["random"]) {
    const auto x = c["input"].get<std::vector<double>>();
    const auto want = c["expected"].get<std::vector<double>>();
    const BandFeatures got = ComputeBandFeatures(x);
    const std::vector<double> brute = BruteForceFeatures(x);
    for (std::size_t i = 0; i < kFeaturesPerBand; ++i) {
      worst_script = std::max(worst_script, RelErr(got[i], want[i]));
      worst_brute = std::max(worst_brute, RelErr(got[i], brute[i]));
    }
    ++cases;
  }
  const std::vector<double> ramp = {1, 2, 3, 4};
  const BandFeatures r = ComputeBandFeatures(ramp);
  const auto ramp_want = oracle["hand"]["ramp"]["expected"].get<std::vector<double>>();
  bool ramp_exact = true;
  for (std::size_t i = 0; i < kFeaturesPerBand; ++i) ramp_exact &= r[i] == ramp_want[i];
  // Spot values written out by hand.
  ramp_exact &= r[0] == 2.5 && r[3] == 30.0 && r[5] == 1.0 && r[6] == 2.5 &&
                r[7] == 4.0 && r[9] == 0.0 && r[10] == 1.75 && r[11] == 3.25 &&
                r[12] == 1.5 && std::fabs(r[1] - 1.92) < 1e-15 &&
                std::fabs(r[8] - 1.2909944487358056) < 1e-15;
  const double t = Seconds(start);
  const bool pass = cases == 100 && worst_script <= 1e-9 && worst_brute <= 1e-9 &&
                    ramp_exact && t < 1.0;
  return {pass, Fmt("%zu vectors, max rel err %.2e (scripted) %.2e (brute force), "
                    "ramp exact=%s, %.3f s",
                    cases, worst_script, worst_brute, ramp_exact ? "yes" : "no", t)};
}

Outcome DimensionContract() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  std::size_t ok = 0;
  std::size_t epochs = 0;
  // Half generator epochs, half white noise at assorted rates.
  for (const LabeledEpoch& e : SyntheticEpochs(500, 77)) {
    const FeatureVector v = Featurize(e, 100.0);
    bool good = v.size() == 75;
    for (std::size_t b = 0; b < kNumBands; ++b) good &= v[b * 15 + 9] == v[b * 15 + 13];
    for (double x : v) good &= std::isfinite(x);
    ok += good;
    ++epochs;
  }
  std::normal_distribution<double> g(0.0, 40.0);
  const double rates[] = {64.0, 100.0, 128.0, 200.0};
  for (int i = 0; i < 500; ++i) {
    const double fs = rates[i % 4];
    std::vector<double> x(EpochLength(fs));
    for (double& v : x) v = g(rng);
    const FeatureVector v = Featurize(x, fs);
    bool good = v.size() == 75;
    for (std::size_t b = 0; b < kNumBands; ++b) good &= v[b * 15 + 9] == v[b * 15 + 13];
    ok += good;
    ++epochs;
  }
  const double t = Seconds(start);
  return {ok == 1000 && epochs == 1000 && t < 10.0,
          Fmt("%zu/%zu epochs length 75 with slot 14 == slot 10, %.2f s", ok, epochs, t)};
}

Outcome BandCorrectness() {
  std::vector<double> x(3000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * 6.0 * static_cast<double>(i) / 100.0);
  }
  const auto bands = BandDecompose(x, 100.0);
  double total = 0.0;
  for (const auto& b : bands) total += Energy(b);
  const double theta_share = Energy(bands[1]) / total;

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 25.0);
  double worst = -INFINITY;  // max of (sum of bands / original) - 1
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> e(3000);
    for (double& v : e) v = g(rng);
    double sum = 0.0;
    for (const auto& b : BandDecompose(e, 100.0)) sum += Energy(b);
    worst = std::max(worst, sum / Energy(e) - 1.0);
  }
  return {theta_share >= 0.99 && worst <= 1e-6,
          Fmt("theta share %.6f; band energy / total energy - 1 at most %.3e "
              "over 100 epochs", theta_share, worst)};
}

Outcome MetricsOracle() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::int64_t> count(0, 1000);
  int binary_ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::int64_t tp, tn, fp, fn;
    do {
      tp = count(rng), tn = count(rng), fp = count(rng), fn = count(rng);
    } while (tp + fp == 0 || tp + fn == 0);
    ConfusionMatrix cm(2);
    cm.Add(0, 0, tp);
    cm.Add(1, 1, tn);
    cm.Add(1, 0, fp);
    cm.Add(0, 1, fn);
    const PrecisionRecall pr = ComputePrecisionRecall(cm, 0);
    // IEEE division is correctly rounded, so each metric must be the double
    // nearest to its exact rational value.
    const bool ok =
        cm.trace() == tp + tn && cm.total() == tp + tn + fp + fn &&
        cm.TruePositives(0) == tp && cm.FalsePositives(0) == fp &&
        cm.FalseNegatives(0) == fn && cm.TrueNegatives(0) == tn &&
        Accuracy(cm) == double(tp + tn) / double(tp + tn + fp + fn) &&
        pr.precision == double(tp) / double(tp + fp) &&
        pr.recall == double(tp) / double(tp + fn);
    binary_ok += ok;
  }
  std::uniform_int_distribution<int> cls(0, 5);
  std::uniform_int_distribution<int> len(1, 500);
  int multi_ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<SleepStage> t(static_cast<std::size_t>(len(rng))), p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = kAllStages[static_cast<std::size_t>(cls(rng))];
      p[i] = (rng() & 1) ? t[i] : kAllStages[static_cast<std::size_t>(cls(rng))];
    }
    const ConfusionMatrix cm = Confusion(t, p);
    const MetricsReport r = Report(cm);
    // Pooled TP = trace and pooled TP + FP = total, as exact integers.
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t c = 0; c < kNumStages; ++c) {
      tp += cm.TruePositives(c);
      fp += cm.FalsePositives(c);
      fn += cm.FalseNegatives(c);
    }
    multi_ok += tp == cm.trace() && tp + fp == cm.total() && tp + fn == cm.total() &&
                r.micro_precision == r.accuracy && r.micro_recall == r.accuracy;
  }
  return {binary_ok == 1000 && multi_ok == 1000,
          Fmt("binary tallies %d/1000 exact, multiclass micro identity %d/1000",
              binary_ok, multi_ok)};
}

double Orthonormality(const Matrix& c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.rows(); ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < c.cols(); ++t) dot += c(i, t) * c(j, t);
      worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double ReconstructionError(const ReducedBasis& b, const Matrix& x) {
  const Matrix back = Reconstruct(b, Transform(b, x));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    num += std::pow(back.data()[i] - x.data()[i], 2);
    den += x.data()[i] * x.data()[i];
  }
  return std::sqrt(num / den);
}

Outcome Reduction() {
  double ortho = 0.0, recon = 0.0;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(120, 20);
    for (std::size_t r = 0; r < 120; ++r)
      for (std::size_t c = 0; c < 20; ++c) x(r, c) = g(rng) * (1.0 + c);
    for (const ReducedBasis& b : {PcaFit(x, 20), SvdReduceFit(x, 20)}) {
      ortho = std::max(ortho, Orthonormality(b.components));
      recon = std::max(recon, ReconstructionError(b, x));
    }
  }
  // The real 75-column feature matrix: wildly different column scales and a
  // duplicated column.
  const Dataset feats = BuildDataset(SyntheticEpochs(300, 9), 100.0);
  for (const ReducedBasis& b : {PcaFit(feats.x, 75), SvdReduceFit(feats.x, 75)}) {
    ortho = std::max(ortho, Orthonormality(b.components));
    recon = std::max(recon, ReconstructionError(b, feats.x));
  }
  Matrix line;
  for (double v : {1.0, 2.0, 3.0}) line.AppendRow(std::vector<double>{v, v});
  const ReducedBasis l = PcaFit(line, 1);
  const double s = 1.0 / std::sqrt(2.0);
  const double dev = std::max(std::fabs(l.components(0, 0) - s),
                              std::fabs(l.components(0, 1) - s));
  return {ortho <= 1e-10 && recon <= 1e-8 && dev <= 1e-12,
          Fmt("orthonormality err %.2e, full-rank reconstruction err %.2e, "
              "diagonal-line component off by %.1e", ortho, recon, dev)};
}

PipelineConfig AcceptanceConfig(Algorithm algo) {
  PipelineConfig c;
  c.source = SyntheticSource{600, 42, 100.0};
  c.model.algorithm = algo;
  c.model.seed = 42;
  c.train_fraction = 0.8;
  c.split_seed = 42;
  return c;
}

Outcome ClassifierSanity() {
  const auto start = Clock::now();
  const EpochSet epochs = LoadEpochs(SyntheticSource{600, 42, 100.0});
  const Dataset data = BuildDataset(epochs.epochs, epochs.sample_rate_hz);
  std::size_t per_stage[kNumStages] = {};
  for (SleepStage s : data.y) ++per_stage[StageIndex(s)];
  const auto [train, test] = Split(data, 0.8, 42);
  struct Target { Algorithm algo; double min_accuracy; };
  const Target targets[] = {{Algorithm::kDt, 0.95}, {Algorithm::kRf, 0.95},
                            {Algorithm::kNb, 0.90}, {Algorithm::kLr, 0.90},
                            {Algorithm::kGbt, 0.90}};
  bool pass = true;
  std::string detail;
  for (const Target& t : targets) {
    ModelSpec spec;
    spec.algorithm = t.algo;
    spec.seed = 42;
    const TrainedModel m = Fit(train, spec);
    const double acc = Accuracy(Confusion(test.y, PredictBatch(m, test.x)));
    pass &= acc >= t.min_accuracy;
    detail += Fmt("%s %.3f (>= %.2f%s) ", std::string(AlgorithmName(t.algo)).c_str(),
                  acc, t.min_accuracy, acc >= t.min_accuracy ? "" : " MISSED");
  }
  bool balanced = true;
  for (std::size_t c : per_stage) balanced &= c == 100;
  const double secs = Seconds(start);
  pass &= balanced && train.size() == 480 && test.size() == 120 && secs < 120.0;
  return {pass, detail + Fmt("| 480/120 split, %.1f s", secs)};
}

Outcome Determinism() {
  const auto start = Clock::now();
  int configs = 0, identical = 0;
  for (Algorithm algo : {Algorithm::kNb, Algorithm::kLr, Algorithm::kDt,
                         Algorithm::kRf, Algorithm::kGbt}) {
    for (const char* red : {"none", "pca", "svd"}) {
      PipelineConfig c = AcceptanceConfig(algo);
      const sleepstage::Reduction r = *ParseReduction(red);
      const PipelineResult base = RunPipeline(c, r, 1);
      bool same = true;
      for (int w : {2, 4, 8}) {
        const PipelineResult other = RunPipeline(c, r, w);
        same &= other.predictions == base.predictions &&
                other.metrics == base.metrics && other.confusion == base.confusion;
      }
      ++configs;
      identical += same;
      if (!same) {
        std::printf("  differs: %s/%s\n", std::string(AlgorithmName(algo)).c_str(), red);
      }
    }
  }
  return {identical == configs,
          Fmt("%d/%d (algorithm, reduction) configs bit-identical across workers "
              "{1,2,4,8}, %.1f s", identical, configs, Seconds(start))};
}

Outcome Scalability() {
  const unsigned cores = std::thread::hardware_concurrency();
  const std::vector<LabeledEpoch> epochs = SyntheticEpochs(2000, 8);
  auto featurize = [&](int w) {
    return Median3([&] {
      const auto t = Clock::now();
      const Dataset d = BuildDataset(epochs, 100.0, w);
      return Seconds(t) + 0.0 * static_cast<double>(d.size());
    });
  };
  const double f1 = featurize(1), f4 = featurize(4);

  const Dataset data = BuildDataset(epochs, 100.0, 4);
  ModelSpec spec;
  spec.algorithm = Algorithm::kRf;
  spec.seed = 8;
  auto rf = [&](int w) {
    return Median3([&] {
      const auto t = Clock::now();
      const TrainedModel m = RfFit(data, spec, w);
      return Seconds(t) + 0.0 * static_cast<double>(m.dim);
    });
  };
  const double r1 = rf(1), r4 = rf(4);
  const double fr = f4 / f1, rr = r4 / r1;
  const bool ratios_ok = fr <= 0.6 && rr <= 0.7;
  std::string detail = Fmt("featurize 4w/1w = %.3f (%.2fs/%.2fs, need <= 0.6); "
                           "rf train 4w/1w = %.3f (%.2fs/%.2fs, need <= 0.7); cores=%u",
                           fr, f4, f1, rr, r4, r1, cores);
  if (cores < 4) detail += " -- needs >= 4 cores, this machine cannot show a speedup";
  return {ratios_ok && cores >= 4, detail};
}

Outcome EdfRoundTrip() {
  const auto start = Clock::now();
  testing::WriterFile file;
  file.num_records = 2;
  file.record_duration_s = 1.0;
  testing::WriterSignal sig;
  sig.samples_per_record = 100;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> code(-32768, 32767);
  for (int i = 0; i < 200; ++i) sig.digital.push_back(static_cast<std::int16_t>(code(rng)));
  file.signals.push_back(sig);
  const EdfFile parsed = ParseEdfFile(testing::WriteEdf(file));
  bool digital_ok = parsed.digital.size() == 1 && parsed.digital[0] == sig.digital;

  // Synthetic recording through the writer: physical within half a step.
  const std::vector<SleepStage> stages = BalancedStageSequence(12, 9);
  const auto [rec, hyp] = SynthesizeRecording(stages, 100.0, 9);
  const testing::WriterFile synth = testing::EdfForSamples(rec.samples, 100.0, -200, 200);
  const std::string bytes = testing::WriteEdf(synth);
  const EdfFile back = ParseEdfFile(bytes);
  digital_ok &= back.digital[0] == synth.signals[0].digital;
  const Recording r = ParseEdf(bytes).front();
  double worst = 0.0;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    worst = std::max(worst, std::fabs(r.samples[i] - rec.samples[i]));
  }
  const double half_step = 0.5 * 400.0 / 65535.0;

  const std::string tal = std::string("+30\x15") + "60\x14Sleep stage 2\x14" +
                          std::string(1, '\0');
  const Hypnogram h = ParseTalAnnotations(tal);
  const bool tal_ok =
      h.entries() == std::vector<HypnogramEntry>{{1, SleepStage::kS2}, {2, SleepStage::kS2}};
  const double t = Seconds(start);
  return {digital_ok && worst <= half_step * (1 + 1e-9) && tal_ok && t < 1.0,
          Fmt("digital exact=%s, physical err %.3e (half step %.3e), TAL example=%s, %.3f s",
              digital_ok ? "yes" : "no", worst, half_step, tal_ok ? "yes" : "no", t)};
}

Outcome ForestReducesToTree() {
  const Dataset data = BuildDataset(SyntheticEpochs(300, 10), 100.0);
  ModelSpec dt;
  dt.algorithm = Algorithm::kDt;
  ModelSpec rf = dt;
  rf.algorithm = Algorithm::kRf;
  rf.hyper.num_trees = 1;
  rf.hyper.bootstrap = false;
  rf.hyper.features_per_split = static_cast<int>(data.dim());
  const TrainedModel tree = DtFit(data, dt);
  const TrainedModel forest = RfFit(data, rf);

  // Rows drawn uniformly inside each column's training range.
  std::mt19937_64 rng(10);
  Matrix probe(500, data.dim());
  for (std::size_t c = 0; c < data.dim(); ++c) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < data.size(); ++r) {
      lo = std::min(lo, data.x(r, c));
      hi = std::max(hi, data.x(r, c));
    }
    std::uniform_real_distribution<double> u(lo, std::nextafter(hi, INFINITY));
    for (std::size_t r = 0; r < 500; ++r) probe(r, c) = u(rng);
  }
  const auto a = PredictBatch(tree, probe), b = PredictBatch(forest, probe);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) equal += a[i] == b[i];
  const bool train_equal = PredictBatch(tree, data.x) == PredictBatch(forest, data.x);
  return {equal == 500 && train_equal,
          Fmt("%zu/500 random rows agree, training rows agree=%s", equal,
              train_equal ? "yes" : "no")};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"feature oracle", FeatureOracle},
    {"75-dimension contract", DimensionContract},
    {"band correctness", BandCorrectness},
    {"metrics oracle", MetricsOracle},
    {"PCA/SVD", Reduction},
    {"classifier sanity", ClassifierSanity},
    {"determinism", Determinism},
    {"scalability pattern", Scalability},
    {"EDF round-trip", EdfRoundTrip},
    {"reduction to baseline", ForestReducesToTree},
};

}  // namespace
}  // namespace sleepstage

int main(int argc, char** argv) {
  using sleepstage::kCriteria;
  constexpr int kCount = static_cast<int>(std::size(kCriteria));
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 1;
    }
  }
  if (selected.empty()) {
    for (int i = 1; i <= kCount; ++i) selected.push_back(i);
  }
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > kCount) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 1;
    }
    sleepstage::Outcome o;
    try {
      o = kCriteria[n - 1].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %-22s %s  %s\n", n, kCriteria[n - 1].name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all &= o.pass;
  }
  return all ? 0 : 1;
}
