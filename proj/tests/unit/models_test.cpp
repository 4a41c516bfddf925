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

#include "models.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

namespace dlsvm::model {
namespace {

using testing::RandomMatrix;

constexpr Variant kAll[] = {Variant::kDl, Variant::kDpl, Variant::kKdl,
                            Variant::kKdpl};

Hyperparams SmallHp(Variant v) {
  Hyperparams hp;
  hp.variant = v;
  hp.n_atoms = 12;
  hp.sparsity = 2;
  hp.beta = 0.1;
  hp.gamma = 0.05;
  hp.nu = 0.3;
  hp.outer_iters = 3;
  hp.seed = 5;
  hp.ocsvm_tol = 1e-8;
  return hp;
}

const Matrix& SmallData() {
  static const Matrix y = synthetic::SparsePositive(8, 12, 60, 2, 0.05, 3).y;
  return y;
}

TEST(Variants, NamesRoundTrip) {
  for (const Variant v : kAll) {
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  }
  EXPECT_EQ(VariantName(Variant::kKdpl), "kdpl-ocsvm");
  EXPECT_THROW(ParseVariant("svm"), Error);
  EXPECT_TRUE(IsKernel(Variant::kKdl));
  EXPECT_FALSE(IsKernel(Variant::kDpl));
  EXPECT_TRUE(IsPairModel(Variant::kKdpl));
  EXPECT_FALSE(IsPairModel(Variant::kDl));
}

TEST(Validate, RejectsOutOfRangeFields) {
  Hyperparams hp = SmallHp(Variant::kDl);
  EXPECT_NO_THROW(Validate(hp, 8));
  auto bad = [&](auto mutate) {
    Hyperparams h = SmallHp(Variant::kDl);
    mutate(h);
    EXPECT_THROW(Validate(h, 8), Error);
  };
  bad([](Hyperparams& h) { h.sparsity = 13; });
  bad([](Hyperparams& h) { h.sparsity = 0; });
  bad([](Hyperparams& h) { h.sparsity = 9; });  // more than m features
  bad([](Hyperparams& h) { h.beta = -1.0; });
  bad([](Hyperparams& h) { h.nu = 0.0; });
  bad([](Hyperparams& h) { h.nu = 1.1; });
  bad([](Hyperparams& h) { h.outer_iters = 0; });
  bad([](Hyperparams& h) { h.ocsvm_tol = 0.0; });
}

TEST(InitDictionary, UnitColumnsAndDeterminism) {
  const Matrix d = InitDictionary(7, 15, 42);
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    EXPECT_NEAR(d.col(j).norm(), 1.0, 1e-12);
  }
  EXPECT_EQ(d, InitDictionary(7, 15, 42));
  EXPECT_NE(d, InitDictionary(7, 15, 43));
}

TEST(InitKernelDictionary, IdentityKernelMatchesStandard) {
  const Matrix a = InitKernelDictionary(Matrix::Identity(9, 9), 5, 11);
  EXPECT_LT((a - InitDictionary(9, 5, 11)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InitKernelDictionary, UnitKernelNorm) {
  std::mt19937_64 rng(1);
  const Matrix base = RandomMatrix(3, 10, rng);
  const Matrix k = base.transpose() * base;
  const Matrix a = InitKernelDictionary(k, 6, 2);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    EXPECT_NEAR(a.col(j).dot(k * a.col(j)), 1.0, 1e-10);
  }
}

TEST(Train, ReconstructionImprovesOnInitialCodes) {
  const synthetic::SparseModelData s =
      synthetic::SparsePositive(10, 15, 120, 3, 0.0, 9);
  Hyperparams hp = SmallHp(Variant::kDl);
  hp.n_atoms = 15;
  hp.sparsity = 3;
  hp.beta = 0.0;
  hp.outer_iters = 4;
  TrainDiagnostics diag;
  const TrainedModel m = Train(s.y, hp, &diag);
  const Matrix d_init = InitDictionary(10, 15, hp.seed);
  const double before =
      (s.y - d_init * diag.initial_codes.x).norm() / s.y.norm();
  const double after = (s.y - m.dict * diag.codes).norm() / s.y.norm();
  EXPECT_LT(after, before);
}

TEST(Train, LossTraceNonIncreasingForEveryVariant) {
  for (const Variant v : kAll) {
    const Hyperparams hp = SmallHp(v);
    TrainDiagnostics diag;
    const TrainedModel m = Train(SmallData(), hp, &diag);
    ASSERT_FALSE(m.trace.empty());
    const double tol = IsPairModel(v) ? 1e-6 : 1e-8;
    for (size_t k = 1; k < m.trace.size(); ++k) {
      EXPECT_LE(m.trace[k].total, m.trace[k - 1].total + tol)
          << VariantName(v) << " record " << k;
      EXPECT_NEAR(m.trace[k].total, m.trace[k].f + m.trace[k].g, 1e-9);
    }
    EXPECT_EQ(m.trace.back().outer, hp.outer_iters);
    EXPECT_EQ(m.trace.back().inner, hp.n_atoms + 1);
  }
}

TEST(Train, SupportOnlyShrinks) {
  for (const Variant v : {Variant::kDl, Variant::kKdl}) {
    TrainDiagnostics diag;
    Train(SmallData(), SmallHp(v), &diag);
    const sparse::Mask& before = diag.initial_codes.support;
    ASSERT_EQ(before.rows(), diag.support.rows());
    EXPECT_FALSE((diag.support && !before).any()) << VariantName(v);
    for (Eigen::Index i = 0; i < diag.codes.rows(); ++i) {
      for (Eigen::Index j = 0; j < diag.codes.cols(); ++j) {
        if (!before(i, j)) {
          EXPECT_EQ(diag.codes(i, j), 0.0);
        }
      }
    }
  }
}

TEST(Train, ModelShapesAndKernelNormalization) {
  for (const Variant v : kAll) {
    const TrainedModel m = Train(SmallData(), SmallHp(v));
    EXPECT_EQ(m.features, 8);
    EXPECT_EQ(m.dict.cols(), 12);
    EXPECT_EQ(m.analysis.size() > 0, IsPairModel(v));
    EXPECT_EQ(m.alpha_weights.size() > 0, IsPairModel(v));
    if (IsKernel(v)) {
      EXPECT_EQ(m.y_train, SmallData());
      EXPECT_GT(m.hp.kernel.sigma, 0.0);  // median heuristic resolved
      const Matrix k = kernel::Gram(m.y_train, m.hp.kernel).k;
      for (Eigen::Index j = 0; j < m.dict.cols(); ++j) {
        if (m.trimmed[static_cast<size_t>(j)]) continue;
        EXPECT_NEAR(m.dict.col(j).dot(k * m.dict.col(j)), 1.0, 1e-6);
      }
    } else {
      for (Eigen::Index j = 0; j < m.dict.cols(); ++j) {
        EXPECT_NEAR(m.dict.col(j).norm(), 1.0, 1e-10);
      }
    }
  }
}

TEST(Train, DeterministicForFixedSeed) {
  for (const Variant v : kAll) {
    const TrainedModel a = Train(SmallData(), SmallHp(v));
    const TrainedModel b = Train(SmallData(), SmallHp(v));
    EXPECT_EQ(a.dict, b.dict) << VariantName(v);
    EXPECT_EQ(a.analysis, b.analysis);
    EXPECT_EQ(a.ocsvm.omega, b.ocsvm.omega);
    EXPECT_EQ(a.ocsvm.rho, b.ocsvm.rho);
  }
}

// Only kernel DL scores the same kind of codes it was trained on with a
// non-degenerate hyperplane here: DL codes straddle the origin (omega ~ 0) and
// the pair models train on PY / BK but detect on OMP codes.
TEST(Detect, TrainingAnomalyFractionNearNu) {
  for (const double beta : {0.0, 0.1}) {
    Hyperparams hp = SmallHp(Variant::kKdl);
    hp.beta = beta;
    const TrainedModel m = Train(SmallData(), hp);
    const Detection d = Detect(m, SmallData());
    const double frac = static_cast<double>(d.anomalies.size()) /
                        static_cast<double>(SmallData().cols());
    EXPECT_LE(frac, hp.nu + 0.1) << "beta " << beta;
    for (Eigen::Index j = 0; j < d.scores.size(); ++j) {
      const bool flagged = d.scores(j) <= 0.0;
      EXPECT_EQ(flagged, std::find(d.anomalies.begin(), d.anomalies.end(),
                                   static_cast<int>(j)) != d.anomalies.end());
    }
  }
}

TEST(Detect, ZeroSignalScoresMinusRho) {
  const TrainedModel m = Train(SmallData(), SmallHp(Variant::kDpl));
  const Detection d = Detect(m, Matrix::Zero(8, 1));
  EXPECT_EQ(d.codes.x.col(0).norm(), 0.0);
  EXPECT_DOUBLE_EQ(d.scores(0), -m.ocsvm.rho);
  if (m.ocsvm.rho > 0.0) {
    EXPECT_EQ(d.anomalies, std::vector<int>{0});
  }
  EXPECT_THROW(Detect(m, Matrix::Zero(7, 1)), Error);
}

TEST(Detect, LinearKernelMatchesStandardPath) {
  std::mt19937_64 rng(4);
  const Matrix y = SmallData();
  Hyperparams hp = SmallHp(Variant::kKdl);
  hp.kernel.kind = kernel::KernelKind::kLinear;
  TrainedModel kdl = Train(y, hp);
  const Matrix k = y.transpose() * y;
  for (Eigen::Index j = 0; j < kdl.dict.cols(); ++j) {
    kdl.dict.col(j) /= std::sqrt(kdl.dict.col(j).dot(k * kdl.dict.col(j)));
  }
  TrainedModel dl = kdl;
  dl.hp.variant = Variant::kDl;
  dl.dict = y * kdl.dict;
  dl.y_train.resize(0, 0);
  Matrix test = RandomMatrix(8, 40, rng).cwiseAbs();
  const Detection a = Detect(kdl, test);
  const Detection b = Detect(dl, test);
  EXPECT_LT((a.codes.x - b.codes.x).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(a.anomalies, b.anomalies);
}

// Naive loop-by-loop evaluation of F + G.
double NaiveTotal(const LossState& s) {
  const Matrix& x = *s.codes;
  const Matrix& d = *s.dict;
  double fit = 0.0;
  if (IsKernel(s.variant)) {
    const Matrix& k = *s.data;
    const Eigen::Index n = k.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          double ei = (i == c ? 1.0 : 0.0);
          double ej = (j == c ? 1.0 : 0.0);
          for (Eigen::Index a = 0; a < x.rows(); ++a) {
            ei -= d(i, a) * x(a, c);
            ej -= d(j, a) * x(a, c);
          }
          fit += 0.5 * ei * k(i, j) * ej;
        }
      }
    }
  } else {
    const Matrix& y = *s.data;
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        double e = y(i, c);
        for (Eigen::Index a = 0; a < x.rows(); ++a) e -= d(i, a) * x(a, c);
        fit += 0.5 * e * e;
      }
    }
  }
  double pen = 0.0;
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    double sq = 0.0;
    double l1 = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      sq += x(a, c) * x(a, c);
      l1 += std::abs(x(a, c));
    }
    pen += s.beta * std::sqrt(sq) + (s.l1.size() > 0 ? s.l1(a) * l1 : 0.0);
  }
  double slack = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double dot = 0.0;
    for (Eigen::Index a = 0; a < x.rows(); ++a) dot += s.omega(a) * x(a, c);
    slack += std::max(0.0, s.rho - dot);
  }
  const double g = 0.5 * s.omega.squaredNorm() +
                   slack / (s.nu * static_cast<double>(x.cols())) - s.rho;
  return fit + pen + g;
}

TEST(TotalLoss, PerfectFitSinglePoint) {
  Vector omega(2);
  omega << 1.0, 2.0;
  const Matrix d = Matrix::Identity(2, 2);
  const Matrix x = omega;
  const Matrix y = omega;
  LossState s;
  s.data = &y;
  s.dict = &d;
  s.codes = &x;
  s.omega = omega;
  s.rho = omega.squaredNorm();
  s.nu = 1.0;
  const LossParts p = TotalLoss(s);
  EXPECT_EQ(p.f, 0.0);
  EXPECT_NEAR(p.g, -0.5 * omega.squaredNorm(), 1e-14);
}

TEST(TotalLoss, LinearInBeta) {
  std::mt19937_64 rng(2);
  const Matrix y = RandomMatrix(4, 6, rng);
  const Matrix d = RandomMatrix(4, 5, rng);
  const Matrix x = RandomMatrix(5, 6, rng);
  LossState s;
  s.data = &y;
  s.dict = &d;
  s.codes = &x;
  s.omega = RandomMatrix(5, 1, rng);
  s.rho = 0.3;
  s.beta = 0.4;
  const double f1 = TotalLoss(s).f;
  s.beta = 0.8;
  const double f2 = TotalLoss(s).f;
  double rows = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) rows += x.row(i).norm();
  EXPECT_NEAR(f2 - f1, 0.4 * rows, 1e-12);
}

TEST(TotalLoss, MatchesNaiveEvaluatorProperty) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Variant v = kAll[trial % 4];
    const int big_n = 2 + trial % 7;
    const int n = 1 + trial % 5;
    const int m = 1 + trial % 4;
    Matrix data;
    Matrix dict;
    if (IsKernel(v)) {
      const Matrix base = RandomMatrix(m, big_n, rng);
      data = base.transpose() * base;
      dict = RandomMatrix(big_n, n, rng);
    } else {
      data = RandomMatrix(m, big_n, rng);
      dict = RandomMatrix(m, n, rng);
    }
    const Matrix x = RandomMatrix(n, big_n, rng);
    LossState s;
    s.variant = v;
    s.data = &data;
    s.dict = &dict;
    s.codes = &x;
    s.beta = 0.1 * (trial % 5);
    if (IsPairModel(v)) s.l1 = RandomMatrix(n, 1, rng).cwiseAbs();
    s.omega = RandomMatrix(n, 1, rng);
    s.rho = RandomMatrix(1, 1, rng)(0);
    s.nu = 0.2 + 0.1 * (trial % 8);
    const double naive = NaiveTotal(s);
    EXPECT_NEAR(TotalLoss(s).total, naive, 1e-10 * (1.0 + std::abs(naive)))
        << "trial " << trial;
  }
}

TEST(AlphaWeights, NormalizedSupportCounts) {
  sparse::Mask mask = sparse::Mask::Constant(3, 4, false);
  mask(0, 0) = mask(0, 1) = mask(0, 2) = true;  // 3
  mask(2, 3) = true;                            // 1, row 1 unused
  const Vector a = AlphaWeights(mask);
  const double nrm = std::sqrt(10.0);
  EXPECT_NEAR(a(0), 3.0 / nrm, 1e-15);
  EXPECT_EQ(a(1), 0.0);
  EXPECT_NEAR(a(2), 1.0 / nrm, 1e-15);
  EXPECT_NEAR(a.norm(), 1.0, 1e-15);
}

}  // namespace
}  // namespace dlsvm::model
