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

#pragma once

#include <string>

#include <Eigen/Dense>

namespace dlsvm::kernel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelKind { kLinear, kRbf, kPolynomial };

std::string KernelName(KernelKind kind);
KernelKind ParseKernel(const std::string& name);

/// rbf: exp(-||a - b||^2 / (2 sigma^2)); sigma <= 0 means "not chosen yet"
/// and is resolved by the median heuristic before any Gram matrix is built.
/// polynomial: (a^T b + coef)^degree.
struct KernelSpec {
  KernelKind kind = KernelKind::kRbf;
  double sigma = 0.0;
  int degree = 2;
  double coef = 1.0;
};

double Evaluate(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                const Eigen::Ref<const Vector>& b);

/// Median of pairwise Euclidean distances between the columns of y.
double MedianPairwiseDistance(const Matrix& y);

/// Fills in the median-heuristic sigma for an rbf spec left unset.
KernelSpec Resolve(const KernelSpec& spec, const Matrix& y);

struct GramPack {
  Matrix k;
  Matrix ksqrt;
  Matrix kinvsqrt;  // pseudo-inverse square root
  Matrix kpinv;
  KernelSpec spec;
};

/// K(i, j) = kappa(y_i, y_j) plus its derived square roots and pseudoinverse,
/// all from one eigendecomposition. Eigenvalues below 1e-10 * lambda_max count
/// as zero. Throws kInvalidArgument for an rbf spec with sigma <= 0.
GramPack Gram(const Matrix& y, const KernelSpec& spec);

/// Entry (i, j) = kappa(y_train_i, y_test_j), N x N_test.
Matrix CrossGram(const Matrix& y_train, const Matrix& y_test,
                 const KernelSpec& spec);

}  // namespace dlsvm::kernel
