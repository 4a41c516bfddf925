// Copyright 2026 The dlsvm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kernelgram.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "test_util.hpp"

namespace dlsvm::kernel {
namespace {

using testing::RandomMatrix;

KernelSpec Rbf(double sigma) { return {KernelKind::kRbf, sigma, 2, 1.0}; }
KernelSpec Linear() { return {KernelKind::kLinear, 0.0, 2, 1.0}; }
KernelSpec Poly(int degree, double coef) {
  return {KernelKind::kPolynomial, 0.0, degree, coef};
}

TEST(Gram, LinearIsInnerProducts) {
  std::mt19937_64 rng(1);
  const Matrix y = RandomMatrix(4, 9, rng);
  const GramPack g = Gram(y, Linear());
  EXPECT_LT((g.k - y.transpose() * y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gram, RbfHasUnitDiagonal) {
  std::mt19937_64 rng(2);
  const Matrix y = 5.0 * RandomMatrix(3, 12, rng);
  for (const double sigma : {0.1, 1.0, 30.0}) {
    const GramPack g = Gram(y, Rbf(sigma));
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
      EXPECT_EQ(g.k(i, i), 1.0);
    }
  }
}

TEST(Gram, EntriesMatchDirectFormulas) {
  std::mt19937_64 rng(3);
  const Matrix y = RandomMatrix(3, 6, rng);
  const GramPack rbf = Gram(y, Rbf(0.8));
  const GramPack poly = Gram(y, Poly(3, 0.5));
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      const double d2 = (y.col(i) - y.col(j)).squaredNorm();
      EXPECT_NEAR(rbf.k(i, j), std::exp(-d2 / (2.0 * 0.64)), 1e-14);
      EXPECT_NEAR(poly.k(i, j), std::pow(y.col(i).dot(y.col(j)) + 0.5, 3),
                  1e-12 * (1.0 + std::abs(poly.k(i, j))));
    }
  }
}

TEST(Gram, SymmetricPsdAndRootsProperty) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    const int m = 1 + trial % 5;
    const int n = 2 + trial % 13;
    const Matrix y = RandomMatrix(m, n, rng);
    const KernelSpec spec =
        trial % 3 == 0 ? Linear() : (trial % 3 == 1 ? Rbf(1.3) : Poly(2, 1.0));
    const GramPack g = Gram(y, spec);
    EXPECT_EQ(g.k, g.k.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> es(g.k);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
    const double scale = g.k.norm();
    EXPECT_LT((g.ksqrt * g.ksqrt - g.k).norm(), 1e-8 * scale);
    // Kinvsqrt Ksqrt is the projector onto range(K).
    const Matrix p = g.kinvsqrt * g.ksqrt;
    EXPECT_LT((p * p - p).norm(), 1e-6);
    EXPECT_LT((p * g.k - g.k).norm(), 1e-6 * scale);
    EXPECT_LT((g.k * g.kpinv * g.k - g.k).norm(), 1e-6 * scale);
  }
}

TEST(Gram, RejectsBadSpecs) {
  const Matrix y = Matrix::Ones(2, 3);
  try {
    Gram(y, Rbf(-1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
  EXPECT_THROW(Gram(y, Poly(0, 1.0)), Error);
  EXPECT_THROW(ParseKernel("sigmoid"), Error);
}

TEST(KernelNames, RoundTrip) {
  for (const KernelKind k :
       {KernelKind::kLinear, KernelKind::kRbf, KernelKind::kPolynomial}) {
    EXPECT_EQ(ParseKernel(KernelName(k)), k);
  }
}

TEST(CrossGram, SameInputsReproduceGram) {
  std::mt19937_64 rng(5);
  const Matrix y = RandomMatrix(4, 7, rng);
  for (const KernelSpec& spec : {Linear(), Rbf(2.0), Poly(2, 1.0)}) {
    EXPECT_LT((CrossGram(y, y, spec) - Gram(y, spec).k).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(CrossGram, SingleTrainingPointGivesGramColumn) {
  std::mt19937_64 rng(6);
  const Matrix y = RandomMatrix(3, 5, rng);
  const Matrix c = CrossGram(y, y.col(2), Linear());
  ASSERT_EQ(c.rows(), 5);
  ASSERT_EQ(c.cols(), 1);
  EXPECT_LT((c.col(0) - Gram(y, Linear()).k.col(2)).norm(), 1e-12);
}

TEST(CrossGram, FarPointVanishesUnderRbf) {
  std::mt19937_64 rng(7);
  const Matrix y = RandomMatrix(3, 6, rng);
  const Matrix far = Vector::Constant(3, 100.0);
  // Distance >= 100 - max |y| > 90, so every entry is below exp(-90^2 / 2).
  const Matrix c = CrossGram(y, far, Rbf(1.0));
  EXPECT_LT(c.maxCoeff(), 1e-12);
  EXPECT_THROW(CrossGram(y, Matrix::Ones(2, 1), Linear()), Error);
}

TEST(MedianHeuristic, MatchesSortedDistances) {
  std::mt19937_64 rng(8);
  const Matrix y = RandomMatrix(2, 9, rng);
  std::vector<double> d;
  for (Eigen::Index i = 0; i < 9; ++i) {
    for (Eigen::Index j = i + 1; j < 9; ++j) {
      d.push_back((y.col(i) - y.col(j)).norm());
    }
  }
  std::sort(d.begin(), d.end());
  const double expect = d.size() % 2 == 1
                            ? d[d.size() / 2]
                            : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  EXPECT_NEAR(MedianPairwiseDistance(y), expect, 1e-14);
  EXPECT_NEAR(Resolve(Rbf(0.0), y).sigma, expect, 1e-14);
  EXPECT_EQ(Resolve(Rbf(3.0), y).sigma, 3.0);
}

}  // namespace
}  // namespace dlsvm::kernel
