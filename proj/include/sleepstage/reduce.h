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

#ifndef SLEEPSTAGE_REDUCE_H_
#define SLEEPSTAGE_REDUCE_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "sleepstage/matrix.h"

namespace sleepstage {

enum class ReductionKind { kPca, kSvd };

std::string_view ReductionKindName(ReductionKind kind);

// A fitted linear projection onto k orthonormal directions.
struct ReducedBasis {
  ReductionKind kind = ReductionKind::kPca;
  std::size_t k = 0;
  std::vector<double> mean;       // D entries; all zero for kSvd
  Matrix components;              // k x D, orthonormal rows
  std::vector<double> explained;  // k entries, non-increasing

  std::size_t dim() const { return components.cols(); }

  friend bool operator==(const ReducedBasis&, const ReducedBasis&) = default;
};

// Right singular vectors and singular values of an arbitrary matrix,
// sorted by descending singular value. Computed by Householder QR (when
// rows > cols) followed by cyclic one-sided Jacobi rotations.
struct RightSingularSystem {
  std::vector<double> singular_values;  // D entries
  Matrix vectors;                       // D x D, row i is the i-th vector
};

inline constexpr int kJacobiMaxSweeps = 60;
inline constexpr double kJacobiTolerance = 1e-15;

RightSingularSystem RightSingular(const Matrix& x);

// Top-k principal axes of the sample covariance of x. Each axis has its
// largest-magnitude entry positive. explained holds the covariance
// eigenvalues. Requires 2 <= N and 1 <= k <= min(N - 1, D) (kBadK).
ReducedBasis PcaFit(const Matrix& x, std::size_t k);

// Top-k right singular vectors of the uncentered x; explained holds squared
// singular values. Requires 1 <= k <= min(N, D) (kBadK).
ReducedBasis SvdReduceFit(const Matrix& x, std::size_t k);

// (x - mean) * components^T, rows computed independently across `workers`.
// Errors: kDimensionMismatch.
Matrix Transform(const ReducedBasis& basis, const Matrix& x, int workers = 1);

// projected * components + mean.
Matrix Reconstruct(const ReducedBasis& basis, const Matrix& projected);

}  // namespace sleepstage

#endif  // SLEEPSTAGE_REDUCE_H_
