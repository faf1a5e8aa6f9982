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

#ifndef SLEEPSTAGE_FEATURES_H_
#define SLEEPSTAGE_FEATURES_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sleepstage/ingest.h"
#include "sleepstage/matrix.h"
#include "sleepstage/stage.h"

namespace sleepstage {

enum class BandId { kDelta = 0, kTheta, kAlpha, kSigma, kBeta };

struct Band {
  BandId id;
  std::string_view name;
  double lo_hz;  // inclusive
  double hi_hz;  // exclusive
};

inline constexpr std::size_t kNumBands = 5;
inline constexpr std::array<Band, kNumBands> kBands = {{
    {BandId::kDelta, "delta", 0.5, 4.0},
    {BandId::kTheta, "theta", 4.0, 8.0},
    {BandId::kAlpha, "alpha", 8.0, 12.0},
    {BandId::kSigma, "sigma", 12.0, 16.0},
    {BandId::kBeta, "beta", 16.0, 32.0},
}};

// Per-band statistics, in storage order.
enum class FeatureSlot {
  kMean = 0,
  kHarmonicMean,
  kTrimmedMean,
  kEnergy,
  kEntropy,
  kMin,
  kMedian,
  kMax,
  kStdDev,
  kSkewness,
  kQ25,
  kQ75,
  kIqr,
  kSkewnessRepeat,  // same value as kSkewness; keeps the 15-slot layout
  kKurtosis,
};

inline constexpr std::size_t kFeaturesPerBand = 15;
inline constexpr std::size_t kFeatureDim = kNumBands * kFeaturesPerBand;

using BandFeatures = std::array<double, kFeaturesPerBand>;
// Band-major: 15 statistics of delta, then theta, alpha, sigma, beta.
using FeatureVector = std::array<double, kFeatureDim>;

inline constexpr double kHarmonicFloor = 1e-12;
inline constexpr double kDegenerateVariance = 1e-12;
inline constexpr std::size_t kEntropyBins = 100;

// Brick-wall spectral filter: forward real DFT, zero every bin outside the
// band, inverse. Outputs have the input's length.
// Errors: kTooShort (length < 2), kBandAboveNyquist (fs < 64).
std::array<std::vector<double>, kNumBands> BandDecompose(
    std::span<const double> samples, double sample_rate_hz);

// The 15 per-band statistics. Errors: kTooShort (length < 4),
// kNonFiniteInput.
BandFeatures ComputeBandFeatures(std::span<const double> signal);

// Quantile by linear interpolation at rank (n - 1) * p of sorted data.
double SortedQuantile(std::span<const double> sorted, double p);

FeatureVector Featurize(std::span<const double> epoch_samples,
                        double sample_rate_hz);
FeatureVector Featurize(const LabeledEpoch& epoch, double sample_rate_hz);

// Human-readable name for column i of a raw feature vector, e.g.
// "theta_energy".
std::string FeatureSlotName(std::size_t column);

// ---------------------------------------------------------------------------

// N x D features with one stage label per row.
struct Dataset {
  Matrix x;
  std::vector<SleepStage> y;
  std::vector<std::string> feature_names;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return x.cols(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// "f0", "f1", ... for d columns.
std::vector<std::string> DefaultFeatureNames(std::size_t d);

// Throws kInvalidArgument on a row/label count mismatch, excluded labels or
// non-finite entries.
void ValidateDataset(const Dataset& data);

// Row i is Featurize(epochs[i]). Rows are partitioned across `workers`
// threads; the result does not depend on the worker count.
Dataset BuildDataset(std::span<const LabeledEpoch> epochs,
                     double sample_rate_hz, int workers = 1);

// Rows selected by index, in the given order.
Dataset Subset(const Dataset& data, std::span<const std::size_t> rows);

// CSV with header "label,f0,...,f{D-1}"; labels W,1,2,3,4,R; values in
// shortest round-trip decimal.
std::string WriteDatasetCsv(const Dataset& data);
// Errors: kMalformedCsv, kBadStageToken.
Dataset ReadDatasetCsv(std::string_view text);

// Shortest decimal that parses back to exactly `value`.
std::string FormatDouble(double value);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_FEATURES_H_
