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

#include "sleepstage/reduce.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sleepstage/error.h"
#include "sleepstage/parallel.h"

namespace sleepstage {

namespace {

using Column = std::vector<double>;

double Dot(const Column& a, const Column& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<Column> ToColumns(const Matrix& x) {
  std::vector<Column> cols(x.cols(), Column(x.rows()));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) cols[j][i] = x(i, j);
  }
  return cols;
}

// Replaces the m x d column set (m > d) with the d x d triangular factor R of
// its QR decomposition. Right singular vectors of R equal those of the input.
std::vector<Column> HouseholderR(std::vector<Column> a) {
  const std::size_t m = a.empty() ? 0 : a[0].size();
  const std::size_t d = a.size();
  Column v(m);
  for (std::size_t j = 0; j < d && j < m; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += a[j][i] * a[j][i];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = a[j][j] > 0.0 ? -norm : norm;
    for (std::size_t i = j; i < m; ++i) v[i] = a[j][i];
    v[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = j; c < d; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < m; ++i) proj += v[i] * a[c][i];
      const double f = 2.0 * proj / vnorm2;
      for (std::size_t i = j; i < m; ++i) a[c][i] -= f * v[i];
    }
  }
  for (auto& col : a) col.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = c + 1; i < d; ++i) a[c][i] = 0.0;
  }
  return a;
}

void NormalizeSign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

ReducedBasis BasisFrom(const RightSingularSystem& sys, ReductionKind kind,
                       std::size_t k, std::vector<double> mean,
                       double explained_scale) {
  const std::size_t d = sys.vectors.cols();
  ReducedBasis basis;
  basis.kind = kind;
  basis.k = k;
  basis.mean = std::move(mean);
  basis.components = Matrix(k, d);
  basis.explained.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    auto row = basis.components.row(c);
    const auto src = sys.vectors.row(c);
    std::copy(src.begin(), src.end(), row.begin());
    NormalizeSign(row);
    const double s = sys.singular_values[c];
    basis.explained[c] = s * s * explained_scale;
  }
  return basis;
}

}  // namespace

std::string_view ReductionKindName(ReductionKind kind) {
  return kind == ReductionKind::kPca ? "pca" : "svd";
}

RightSingularSystem RightSingular(const Matrix& x) {
  const std::size_t d = x.cols();
  std::vector<Column> a = ToColumns(x);
  if (x.rows() > d) a = HouseholderR(std::move(a));

  std::vector<Column> v(d, Column(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) v[j][j] = 1.0;

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double alpha = Dot(a[p], a[p]);
        const double beta = Dot(a[q], a[q]);
        const double gamma = Dot(a[p], a[q]);
        if (gamma == 0.0 ||
            std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < a[p].size(); ++i) {
          const double ap = a[p][i];
          const double aq = a[q][i];
          a[p][i] = c * ap - s * aq;
          a[q][i] = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vp = v[p][i];
          const double vq = v[q][i];
          v[p][i] = c * vp - s * vq;
          v[q][i] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(d);
  for (std::size_t j = 0; j < d; ++j) sigma[j] = std::sqrt(Dot(a[j], a[j]));
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return sigma[l] > sigma[r];
  });

  RightSingularSystem out;
  out.singular_values.resize(d);
  out.vectors = Matrix(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    out.singular_values[r] = sigma[order[r]];
    std::copy(v[order[r]].begin(), v[order[r]].end(), out.vectors.row(r).begin());
  }
  return out;
}

ReducedBasis PcaFit(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw Error(ErrorCode::kBadK, "PCA needs at least 2 rows");
  if (k < 1 || k > std::min(n - 1, d)) {
    throw Error(ErrorCode::kBadK, "k=" + std::to_string(k) +
                                      " outside [1, min(N-1, D)=" +
                                      std::to_string(std::min(n - 1, d)) + "]");
  }
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(n);
  Matrix centered = x;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered(i, j) -= mean[j];
  }
  return BasisFrom(RightSingular(centered), ReductionKind::kPca, k,
                   std::move(mean), 1.0 / static_cast<double>(n - 1));
}

ReducedBasis SvdReduceFit(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (k < 1 || k > std::min(n, d)) {
    throw Error(ErrorCode::kBadK, "k=" + std::to_string(k) +
                                      " outside [1, min(N, D)=" +
                                      std::to_string(std::min(n, d)) + "]");
  }
  return BasisFrom(RightSingular(x), ReductionKind::kSvd, k,
                   std::vector<double>(d, 0.0), 1.0);
}

Matrix Transform(const ReducedBasis& basis, const Matrix& x, int workers) {
  const std::size_t d = basis.dim();
  if (x.cols() != d && !(x.rows() == 0)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(d) + " columns, got " +
                    std::to_string(x.cols()));
  }
  Matrix out(x.rows(), basis.k);
  ParallelFor(
      x.rows(), workers,
      [&](std::size_t i) {
        const auto row = x.row(i);
        for (std::size_t c = 0; c < basis.k; ++c) {
          const auto comp = basis.components.row(c);
          double s = 0.0;
          for (std::size_t j = 0; j < d; ++j) s += (row[j] - basis.mean[j]) * comp[j];
          out(i, c) = s;
        }
      },
      /*block=*/64);
  return out;
}

Matrix Reconstruct(const ReducedBasis& basis, const Matrix& projected) {
  if (projected.cols() != basis.k && projected.rows() != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "projection width differs from k");
  }
  const std::size_t d = basis.dim();
  Matrix out(projected.rows(), d);
  for (std::size_t i = 0; i < projected.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = basis.mean[j];
      for (std::size_t c = 0; c < basis.k; ++c) {
        s += projected(i, c) * basis.components(c, j);
      }
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace sleepstage
