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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "sleepstage/reduce.h"
#include "support/errors.h"

namespace sleepstage {
namespace {

using ::sleepstage::testing::ThrownCode;

Matrix FromRows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.AppendRow(r);
  return m;
}

Matrix RandomMatrix(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (double& v : m.data()) v = g(rng);
  // Uneven column scales make the spectrum non-degenerate.
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) m(r, c) *= 1.0 + static_cast<double>(c);
  }
  return m;
}

// Low-rank matrix A * B with A: n x r, B: r x d.
Matrix LowRank(std::size_t n, std::size_t d, std::size_t r, std::mt19937_64& rng) {
  const Matrix a = RandomMatrix(n, r, rng);
  const Matrix b = RandomMatrix(r, d, rng);
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t t = 0; t < r; ++t) out(i, j) += a(i, t) * b(t, j);
    }
  }
  return out;
}

double Frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double RelativeError(const Matrix& got, const Matrix& want) {
  Matrix diff = got;
  for (std::size_t i = 0; i < diff.data().size(); ++i) diff.data()[i] -= want.data()[i];
  return Frobenius(diff) / std::max(Frobenius(want), 1e-300);
}

double MaxOrthonormalityError(const Matrix& c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.rows(); ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < c.cols(); ++t) dot += c(i, t) * c(j, t);
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

void ExpectSignConvention(const Matrix& c) {
  for (std::size_t i = 0; i < c.rows(); ++i) {
    std::size_t arg = 0;
    for (std::size_t t = 1; t < c.cols(); ++t) {
      if (std::abs(c(i, t)) > std::abs(c(i, arg))) arg = t;
    }
    EXPECT_GT(c(i, arg), 0.0) << "row " << i;
  }
}

TEST(PcaTest, DiagonalLineExample) {
  const Matrix x = FromRows({{1, 1}, {2, 2}, {3, 3}});
  const ReducedBasis b = PcaFit(x, 1);
  EXPECT_EQ(b.kind, ReductionKind::kPca);
  EXPECT_NEAR(b.components(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(b.components(0, 1), 1.0 / std::sqrt(2.0), 1e-12);
  // Total variance is 1 + 1 = 2, all of it on the first component.
  EXPECT_NEAR(b.explained[0], 2.0, 1e-12);
  EXPECT_EQ(b.mean, (std::vector<double>{2.0, 2.0}));
}

TEST(PcaTest, AxisAlignedVariance) {
  const Matrix x = FromRows({{-3, 7, 1}, {0, 7, 1}, {5, 7, 1}, {9, 7, 1}});
  const ReducedBasis b = PcaFit(x, 1);
  EXPECT_NEAR(b.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(b.components(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(b.components(0, 2), 0.0, 1e-12);
  // Zero-variance columns contribute nothing to any projection.
  const Matrix p = Transform(b, x);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    EXPECT_NEAR(p(r, 0), x(r, 0) - b.mean[0], 1e-12);
  }
}

TEST(PcaTest, MatchesCovarianceEigenOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30 + trial * 7, d = 4 + trial;
    const Matrix x = RandomMatrix(n, d, rng);
    const std::size_t k = d - 1;
    const ReducedBasis b = PcaFit(x, k);

    Eigen::MatrixXd e(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) e(i, j) = x(i, j);
    const Eigen::RowVectorXd mean = e.colwise().mean();
    const Eigen::MatrixXd centered = e.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t idx = d - 1 - c;  // ascending order from Eigen
      EXPECT_NEAR(b.explained[c], solver.eigenvalues()(idx),
                  1e-9 * solver.eigenvalues()(d - 1));
      Eigen::VectorXd v = solver.eigenvectors().col(idx);
      double dot = 0.0;
      for (std::size_t t = 0; t < d; ++t) dot += v(t) * b.components(c, t);
      EXPECT_NEAR(std::abs(dot), 1.0, 1e-9);
    }
    for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(b.mean[j], mean(j), 1e-12);
  }
}

TEST(PcaTest, OrthonormalSortedAndSigned) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = RandomMatrix(50, 12, rng);
    for (const ReducedBasis& b : {PcaFit(x, 12), SvdReduceFit(x, 12)}) {
      EXPECT_LE(MaxOrthonormalityError(b.components), 1e-10);
      EXPECT_TRUE(std::is_sorted(b.explained.rbegin(), b.explained.rend()));
      for (double e : b.explained) EXPECT_GE(e, 0.0);
      ExpectSignConvention(b.components);
    }
  }
}

TEST(PcaTest, FullRankReconstruction) {
  std::mt19937_64 rng(3);
  const Matrix x = RandomMatrix(40, 10, rng);
  const ReducedBasis b = PcaFit(x, 10);
  EXPECT_LE(RelativeError(Reconstruct(b, Transform(b, x)), x), 1e-8);
}

TEST(PcaTest, ReconstructionErrorNonIncreasingAndZeroAtRank) {
  std::mt19937_64 rng(4);
  const Matrix x = LowRank(60, 15, 5, rng);
  double previous = INFINITY;
  for (std::size_t k = 1; k <= 14; ++k) {
    const ReducedBasis b = PcaFit(x, k);
    const double err = RelativeError(Reconstruct(b, Transform(b, x)), x);
    EXPECT_LE(err, previous + 1e-12) << "k=" << k;
    previous = err;
    // Centering can add one to the rank.
    if (k >= 6) {
      EXPECT_LE(err, 1e-8) << "k=" << k;
    }
  }
}

TEST(PcaTest, MeanRowProjectsToZero) {
  std::mt19937_64 rng(5);
  const Matrix x = RandomMatrix(25, 6, rng);
  const ReducedBasis b = PcaFit(x, 4);
  Matrix mean_row;
  mean_row.AppendRow(b.mean);
  const Matrix p = Transform(b, mean_row);
  ASSERT_EQ(p.cols(), 4u);
  for (double v : p.data()) EXPECT_EQ(v, 0.0);
}

TEST(PcaTest, EqualsSvdOfCenteredMatrix) {
  std::mt19937_64 rng(6);
  const Matrix x = RandomMatrix(35, 8, rng);
  const ReducedBasis pca = PcaFit(x, 5);
  Matrix centered = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) centered(r, c) -= pca.mean[c];
  const ReducedBasis svd = SvdReduceFit(centered, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t t = 0; t < 8; ++t) {
      EXPECT_NEAR(pca.components(i, t), svd.components(i, t), 1e-9);
    }
    EXPECT_NEAR(pca.explained[i] * (35 - 1), svd.explained[i],
                1e-9 * svd.explained[0]);
  }
}

TEST(PcaTest, BadK) {
  const Matrix x = FromRows({{1, 2, 3}, {4, 5, 7}, {1, 0, 1}});
  EXPECT_EQ(ThrownCode([&] { PcaFit(x, 0); }), ErrorCode::kBadK);
  EXPECT_EQ(ThrownCode([&] { PcaFit(x, 3); }), ErrorCode::kBadK);
  EXPECT_EQ(ThrownCode([&] { PcaFit(FromRows({{1, 2}}), 1); }), ErrorCode::kBadK);
  EXPECT_EQ(ThrownCode([&] { SvdReduceFit(x, 4); }), ErrorCode::kBadK);
  EXPECT_NO_THROW(SvdReduceFit(x, 3));
}

TEST(PcaTest, RankDeficientIsAllowed) {
  const Matrix x = FromRows({{1, 1, 0}, {2, 2, 0}, {3, 3, 0}, {4, 4, 0}});
  const ReducedBasis b = PcaFit(x, 3);
  EXPECT_LE(MaxOrthonormalityError(b.components), 1e-10);
  EXPECT_NEAR(b.explained[1], 0.0, 1e-12);
  EXPECT_NEAR(b.explained[2], 0.0, 1e-12);
}

TEST(SvdTest, DiagonalExample) {
  const Matrix x = FromRows({{3, 0, 0}, {0, 2, 0}, {0, 0, 1}});
  const ReducedBasis b = SvdReduceFit(x, 2);
  EXPECT_EQ(b.kind, ReductionKind::kSvd);
  EXPECT_NEAR(b.explained[0], 9.0, 1e-12);
  EXPECT_NEAR(b.explained[1], 4.0, 1e-12);
  EXPECT_NEAR(b.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(b.components(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(b.components(0, 2), 0.0, 1e-12);
  EXPECT_NEAR(b.components(1, 2), 0.0, 1e-12);
  EXPECT_EQ(b.mean, (std::vector<double>{0, 0, 0}));
}

TEST(SvdTest, OrthonormalRowsReconstructExactly) {
  const double s = 1.0 / std::sqrt(2.0);
  const Matrix x = FromRows({{s, s, 0}, {s, -s, 0}, {0, 0, 1}});
  const ReducedBasis b = SvdReduceFit(x, 3);
  EXPECT_LE(RelativeError(Reconstruct(b, Transform(b, x)), x), 1e-8);
}

TEST(SvdTest, RankOneReconstructsExactly) {
  std::mt19937_64 rng(7);
  const Matrix x = LowRank(20, 9, 1, rng);
  const ReducedBasis b = SvdReduceFit(x, 1);
  EXPECT_LE(RelativeError(Reconstruct(b, Transform(b, x)), x), 1e-8);
}

TEST(SvdTest, WideMatrix) {
  std::mt19937_64 rng(8);
  const Matrix x = RandomMatrix(5, 20, rng);
  const ReducedBasis b = SvdReduceFit(x, 5);
  EXPECT_LE(MaxOrthonormalityError(b.components), 1e-10);
  EXPECT_LE(RelativeError(Reconstruct(b, Transform(b, x)), x), 1e-8);
}

TEST(TransformTest, ShapeWorkersAndMismatch) {
  std::mt19937_64 rng(9);
  const Matrix x = RandomMatrix(300, 75, rng);
  const ReducedBasis b = PcaFit(x, 30);
  const Matrix one = Transform(b, x, 1);
  EXPECT_EQ(one.cols(), 30u);
  EXPECT_EQ(one.rows(), 300u);
  for (int w : {2, 4, 8}) EXPECT_EQ(Transform(b, x, w), one);
  EXPECT_EQ(ThrownCode([&] { Transform(b, RandomMatrix(3, 74, rng)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(TransformTest, FitIsDeterministic) {
  std::mt19937_64 rng(10);
  const Matrix x = RandomMatrix(100, 20, rng);
  EXPECT_EQ(PcaFit(x, 10), PcaFit(x, 10));
  EXPECT_EQ(SvdReduceFit(x, 10), SvdReduceFit(x, 10));
}

}  // namespace
}  // namespace sleepstage
