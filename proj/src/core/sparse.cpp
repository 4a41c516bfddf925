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

#include "sparse.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dlsvm::sparse {
namespace {

using Vector = Eigen::VectorXd;

constexpr double kStopCorrelation = 1e-12;
constexpr double kCholeskyJitter = 1e-12;

// Index of the largest |c_j| among atoms not yet used or banned, or -1.
Eigen::Index PickAtom(const Vector& c, const std::vector<char>& blocked) {
  Eigen::Index best = -1;
  double best_abs = -1.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (blocked[static_cast<size_t>(j)]) continue;
    const double a = std::abs(c(j));
    if (a > best_abs) {
      best_abs = a;
      best = j;
    }
  }
  if (best >= 0 && best_abs < kStopCorrelation) return -1;
  return best;
}

// Solves G_SS z = rhs_S by Cholesky, retrying once with jitter.
bool SolveOnSupport(const Matrix& gram, const std::vector<Eigen::Index>& supp,
                    const Vector& rhs, Vector* z) {
  const auto k = static_cast<Eigen::Index>(supp.size());
  Matrix g(k, k);
  Vector b(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    b(a) = rhs(supp[a]);
    for (Eigen::Index c = 0; c < k; ++c) g(a, c) = gram(supp[a], supp[c]);
  }
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) {
    g.diagonal().array() += kCholeskyJitter;
    llt.compute(g);
    if (llt.info() != Eigen::Success) return false;
  }
  *z = llt.solve(b);
  // Reject numerically rank-deficient refits (an atom nearly in the span of
  // the others produces a blown-up coefficient vector).
  return z->allFinite() && (g * *z - b).norm() <= 1e-6 * std::max(1.0, b.norm());
}

// Shared greedy loop. `correlations` returns the current residual
// correlations given the support and coefficients.
template <typename CorrFn>
void EncodeColumn(const Matrix& gram, const Vector& rhs, int s, Eigen::Index col,
                  CorrFn correlations, SparseCodes* out) {
  const Eigen::Index n = gram.rows();
  std::vector<char> blocked(static_cast<size_t>(n), 0);
  std::vector<Eigen::Index> supp;
  Vector z;
  Vector c = correlations(supp, z);
  while (static_cast<int>(supp.size()) < s) {
    const Eigen::Index j = PickAtom(c, blocked);
    if (j < 0) break;
    blocked[static_cast<size_t>(j)] = 1;
    supp.push_back(j);
    Vector znew;
    if (!SolveOnSupport(gram, supp, rhs, &znew)) {
      supp.pop_back();
      Warn("omp: singular least-squares system on support, dropping atom " +
           std::to_string(j) + " for sample " + std::to_string(col));
      continue;
    }
    z = std::move(znew);
    c = correlations(supp, z);
  }
  for (size_t a = 0; a < supp.size(); ++a) {
    out->x(supp[a], col) = z(static_cast<Eigen::Index>(a));
    out->support(supp[a], col) = true;
  }
}

SparseCodes EmptyCodes(Eigen::Index n, Eigen::Index cols, int s) {
  SparseCodes out;
  out.x = Matrix::Zero(n, cols);
  out.support = Mask::Constant(n, cols, false);
  out.sparsity = s;
  return out;
}

}  // namespace

SparseCodes Omp(const Matrix& y, const Matrix& d, int s) {
  const Eigen::Index m = d.rows();
  const Eigen::Index n = d.cols();
  Require(y.rows() == m, ErrorKind::kDimension,
          "omp: signal dimension " + std::to_string(y.rows()) +
              " does not match dictionary rows " + std::to_string(m));
  Require(s >= 1 && s <= std::min(m, n), ErrorKind::kInvalidArgument,
          "omp: sparsity " + std::to_string(s) + " outside [1, min(m, n)]");
  for (Eigen::Index j = 0; j < n; ++j) {
    Require(std::abs(d.col(j).norm() - 1.0) <= 1e-8, ErrorKind::kInvalidArgument,
            "omp: dictionary column " + std::to_string(j) + " is not unit norm");
  }

  SparseCodes out = EmptyCodes(n, y.cols(), s);
  const Matrix gram = d.transpose() * d;
  for (Eigen::Index col = 0; col < y.cols(); ++col) {
    const Vector yj = y.col(col);
    const Vector rhs = d.transpose() * yj;
    auto corr = [&](const std::vector<Eigen::Index>& supp, const Vector& z) {
      Vector r = yj;
      for (size_t a = 0; a < supp.size(); ++a) {
        r -= z(static_cast<Eigen::Index>(a)) * d.col(supp[a]);
      }
      return Vector(d.transpose() * r);
    };
    EncodeColumn(gram, rhs, s, col, corr, &out);
  }
  return out;
}

SparseCodes OmpGram(const Matrix& dty, const Matrix& dtd, int s) {
  const Eigen::Index n = dtd.rows();
  Require(dtd.cols() == n && dty.rows() == n, ErrorKind::kDimension,
          "omp_gram: expected D^T Y with " + std::to_string(n) +
              " rows and a square D^T D");
  Require(s >= 1 && s <= n, ErrorKind::kInvalidArgument,
          "omp_gram: sparsity " + std::to_string(s) + " outside [1, n]");
  for (Eigen::Index j = 0; j < n; ++j) {
    Require(std::abs(dtd(j, j) - 1.0) <= 1e-6, ErrorKind::kInvalidArgument,
            "omp_gram: D^T D diagonal entry " + std::to_string(j) +
                " is not 1 within 1e-6");
  }

  SparseCodes out = EmptyCodes(n, dty.cols(), s);
  for (Eigen::Index col = 0; col < dty.cols(); ++col) {
    const Vector c0 = dty.col(col);
    auto corr = [&](const std::vector<Eigen::Index>& supp, const Vector& z) {
      Vector c = c0;
      for (size_t a = 0; a < supp.size(); ++a) {
        c -= z(static_cast<Eigen::Index>(a)) * dtd.col(supp[a]);
      }
      return c;
    };
    EncodeColumn(dtd, c0, s, col, corr, &out);
  }
  return out;
}

}  // namespace dlsvm::sparse
