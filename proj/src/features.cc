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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/features.h"

namespace sleepstage {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n), bins_(n / 2 + 1) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    time_ = fftw_alloc_real(n_);
    freq_ = fftw_alloc_complex(bins_);
    scratch_ = fftw_alloc_complex(bins_);
    const int len = static_cast<int>(n_);
    forward_ = fftw_plan_dft_r2c_1d(len, time_, freq_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(len, scratch_, time_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(time_);
    fftw_free(freq_);
    fftw_free(scratch_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t bins() const { return bins_; }

  void Forward(std::span<const double> samples) {
    std::copy(samples.begin(), samples.end(), time_);
    fftw_execute(forward_);
  }

  // Inverse of the forward spectrum restricted to bins [first, last).
  void InverseBandInto(std::size_t first, std::size_t last,
                       std::vector<double>& out) {
    std::fill_n(&scratch_[0][0], 2 * bins_, 0.0);
    for (std::size_t k = first; k < last; ++k) {
      scratch_[k][0] = freq_[k][0];
      scratch_[k][1] = freq_[k][1];
    }
    fftw_execute(inverse_);
    const double scale = 1.0 / static_cast<double>(n_);
    out.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = time_[i] * scale;
  }

 private:
  std::size_t n_;
  std::size_t bins_;
  double* time_ = nullptr;
  fftw_complex* freq_ = nullptr;
  fftw_complex* scratch_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

RealFft& FftFor(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

double Mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::array<std::vector<double>, kNumBands> BandDecompose(
    std::span<const double> samples, double sample_rate_hz) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kTooShort, "band decomposition needs >= 2 samples");
  }
  if (!(sample_rate_hz >= 2.0 * kBands.back().hi_hz)) {
    throw Error(ErrorCode::kBandAboveNyquist,
                "sample rate " + std::to_string(sample_rate_hz) +
                    " Hz puts the beta band above Nyquist");
  }
  const std::size_t n = samples.size();
  RealFft& fft = FftFor(n);
  fft.Forward(samples);

  // Bin k sits at k * fs / n Hz; keep lo <= f < hi.
  const double bin_hz = sample_rate_hz / static_cast<double>(n);
  auto first_bin_at_or_above = [&](double hz) {
    auto k = static_cast<std::size_t>(std::ceil(hz / bin_hz));
    while (k > 0 && static_cast<double>(k - 1) * bin_hz >= hz) --k;
    while (static_cast<double>(k) * bin_hz < hz) ++k;
    return std::min(k, fft.bins());
  };

  std::array<std::vector<double>, kNumBands> out;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    fft.InverseBandInto(first_bin_at_or_above(kBands[b].lo_hz),
                        first_bin_at_or_above(kBands[b].hi_hz), out[b]);
  }
  return out;
}

double SortedQuantile(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BandFeatures ComputeBandFeatures(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 4) {
    throw Error(ErrorCode::kTooShort, "band statistics need >= 4 samples");
  }
  for (double v : signal) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteInput, "non-finite sample");
    }
  }
  const double count = static_cast<double>(n);

  std::vector<double> sorted(signal.begin(), signal.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double median = SortedQuantile(sorted, 0.5);
  const double q25 = SortedQuantile(sorted, 0.25);
  const double q75 = SortedQuantile(sorted, 0.75);
  const double iqr = q75 - q25;

  const double mean = Mean(signal);

  double inv_sum = 0.0;
  double energy = 0.0;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : signal) {
    inv_sum += 1.0 / std::max(std::abs(x), kHarmonicFloor);
    energy += x * x;
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double sum_sq_dev = m2;
  m2 /= count;
  m3 /= count;
  m4 /= count;

  // Tukey fences, inclusive.
  const double fence_lo = q25 - 1.5 * iqr;
  const double fence_hi = q75 + 1.5 * iqr;
  double kept_sum = 0.0;
  std::size_t kept = 0;
  for (double x : signal) {
    if (x >= fence_lo && x <= fence_hi) {
      kept_sum += x;
      ++kept;
    }
  }
  const double trimmed = kept > 0 ? kept_sum / static_cast<double>(kept) : mean;

  double entropy = 0.0;
  if (hi > lo) {
    std::array<std::size_t, kEntropyBins> hist{};
    const double width = hi - lo;
    for (double x : signal) {
      auto bin = static_cast<std::size_t>((x - lo) / width *
                                          static_cast<double>(kEntropyBins));
      hist[std::min(bin, kEntropyBins - 1)]++;
    }
    for (std::size_t c : hist) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / count;
      entropy -= p * std::log(p);
    }
  }

  const bool flat = m2 < kDegenerateVariance;
  const double skew = flat ? 0.0 : m3 / std::pow(m2, 1.5);
  const double kurt = flat ? 0.0 : m4 / (m2 * m2) - 3.0;

  BandFeatures f{};
  f[static_cast<std::size_t>(FeatureSlot::kMean)] = mean;
  f[static_cast<std::size_t>(FeatureSlot::kHarmonicMean)] = count / inv_sum;
  f[static_cast<std::size_t>(FeatureSlot::kTrimmedMean)] = trimmed;
  f[static_cast<std::size_t>(FeatureSlot::kEnergy)] = energy;
  f[static_cast<std::size_t>(FeatureSlot::kEntropy)] = entropy;
  f[static_cast<std::size_t>(FeatureSlot::kMin)] = lo;
  f[static_cast<std::size_t>(FeatureSlot::kMedian)] = median;
  f[static_cast<std::size_t>(FeatureSlot::kMax)] = hi;
  f[static_cast<std::size_t>(FeatureSlot::kStdDev)] =
      std::sqrt(sum_sq_dev / (count - 1.0));
  f[static_cast<std::size_t>(FeatureSlot::kSkewness)] = skew;
  f[static_cast<std::size_t>(FeatureSlot::kQ25)] = q25;
  f[static_cast<std::size_t>(FeatureSlot::kQ75)] = q75;
  f[static_cast<std::size_t>(FeatureSlot::kIqr)] = iqr;
  f[static_cast<std::size_t>(FeatureSlot::kSkewnessRepeat)] = skew;
  f[static_cast<std::size_t>(FeatureSlot::kKurtosis)] = kurt;
  return f;
}

FeatureVector Featurize(std::span<const double> epoch_samples,
                        double sample_rate_hz) {
  const auto bands = BandDecompose(epoch_samples, sample_rate_hz);
  FeatureVector out{};
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const BandFeatures f = ComputeBandFeatures(bands[b]);
    std::copy(f.begin(), f.end(), out.begin() + b * kFeaturesPerBand);
  }
  return out;
}

FeatureVector Featurize(const LabeledEpoch& epoch, double sample_rate_hz) {
  return Featurize(epoch.samples, sample_rate_hz);
}

std::string FeatureSlotName(std::size_t column) {
  static constexpr std::array<std::string_view, kFeaturesPerBand> kSlotNames = {
      "mean", "harmonic_mean", "trimmed_mean", "energy", "entropy",
      "min",  "median",        "max",          "std",    "skewness",
      "q25",  "q75",           "iqr",          "skewness_2", "kurtosis"};
  if (column >= kFeatureDim) return "f" + std::to_string(column);
  return std::string(kBands[column / kFeaturesPerBand].name) + "_" +
         std::string(kSlotNames[column % kFeaturesPerBand]);
}

}  // namespace sleepstage
