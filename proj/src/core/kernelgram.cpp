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

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace dlsvm::kernel {
namespace {

constexpr double kRankFloor = 1e-10;

void CheckSpec(const KernelSpec& spec) {
  if (spec.kind == KernelKind::kRbf) {
    Require(spec.sigma > 0.0, ErrorKind::kInvalidArgument,
            "rbf kernel needs sigma > 0, got " + std::to_string(spec.sigma));
  }
  if (spec.kind == KernelKind::kPolynomial) {
    Require(spec.degree >= 1, ErrorKind::kInvalidArgument,
            "polynomial kernel needs degree >= 1");
  }
}

}  // namespace

std::string KernelName(KernelKind kind) {
  switch (kind) {
    case KernelKind::kLinear:
      return "linear";
    case KernelKind::kRbf:
      return "rbf";
    case KernelKind::kPolynomial:
      return "polynomial";
  }
  return "unknown";
}

KernelKind ParseKernel(const std::string& name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "polynomial" || name == "poly") return KernelKind::kPolynomial;
  Fail(ErrorKind::kInvalidArgument,
       "unknown kernel '" + name + "' (expected linear, rbf or polynomial)");
}

double Evaluate(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                const Eigen::Ref<const Vector>& b) {
  switch (spec.kind) {
    case KernelKind::kLinear:
      return a.dot(b);
    case KernelKind::kRbf:
      return std::exp(-(a - b).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
    case KernelKind::kPolynomial:
      return std::pow(a.dot(b) + spec.coef, spec.degree);
  }
  return 0.0;
}

double MedianPairwiseDistance(const Matrix& y) {
  const Eigen::Index n = y.cols();
  if (n < 2) return 1.0;
  std::vector<double> dist;
  dist.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      dist.push_back((y.col(i) - y.col(j)).norm());
    }
  }
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  double med = *mid;
  if (dist.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(dist.begin(), mid));
  }
  return med;
}

KernelSpec Resolve(const KernelSpec& spec, const Matrix& y) {
  KernelSpec out = spec;
  if (out.kind == KernelKind::kRbf && !(out.sigma > 0.0)) {
    out.sigma = MedianPairwiseDistance(y);
    if (!(out.sigma > 0.0)) out.sigma = 1.0;
  }
  return out;
}

GramPack Gram(const Matrix& y, const KernelSpec& spec) {
  CheckSpec(spec);
  const Eigen::Index n = y.cols();
  Require(n >= 1 && y.rows() >= 1, ErrorKind::kDimension,
          "gram: empty data matrix");
  GramPack out;
  out.spec = spec;
  out.k.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = Evaluate(spec, y.col(i), y.col(j));
      out.k(i, j) = v;
      out.k(j, i) = v;
    }
  }

  const numerics::SymEig eig = numerics::SymmetricEigen(out.k);
  const double top = std::max(eig.eigenvalues(0), 0.0);
  const double cut = kRankFloor * top;
  Vector root(n);
  Vector inv_root(n);
  Vector inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = eig.eigenvalues(i);
    if (w > cut && w > 0.0) {
      root(i) = std::sqrt(w);
      inv_root(i) = 1.0 / root(i);
      inv(i) = 1.0 / w;
    } else {
      root(i) = inv_root(i) = inv(i) = 0.0;
    }
  }
  const Matrix& v = eig.eigenvectors;
  auto rebuild = [&v](const Vector& diag) {
    Matrix m = v * diag.asDiagonal() * v.transpose();
    return Matrix(0.5 * (m + m.transpose()));
  };
  out.ksqrt = rebuild(root);
  out.kinvsqrt = rebuild(inv_root);
  out.kpinv = rebuild(inv);
  return out;
}

Matrix CrossGram(const Matrix& y_train, const Matrix& y_test,
                 const KernelSpec& spec) {
  CheckSpec(spec);
  Require(y_train.rows() == y_test.rows(), ErrorKind::kDimension,
          "cross_gram: training data has " + std::to_string(y_train.rows()) +
              " features, test data has " + std::to_string(y_test.rows()));
  Matrix out(y_train.cols(), y_test.cols());
  for (Eigen::Index j = 0; j < y_test.cols(); ++j) {
    for (Eigen::Index i = 0; i < y_train.cols(); ++i) {
      out(i, j) = Evaluate(spec, y_train.col(i), y_test.col(j));
    }
  }
  return out;
}

}  // namespace dlsvm::kernel
