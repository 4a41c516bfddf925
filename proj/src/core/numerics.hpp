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

#include <Eigen/Dense>

namespace dlsvm::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
struct SymEig {
  Vector eigenvalues;
  Matrix eigenvectors;  // column j pairs with eigenvalues(j)
};

/// Throws kDimension for non-square input or asymmetry beyond 1e-10 relative.
SymEig SymmetricEigen(const Matrix& s);

/// Principal square root of a PSD matrix. Eigenvalues in [-floor, 0) are
/// clamped to zero; anything below -floor throws kNotPsd.
Matrix PsdSqrt(const Matrix& k, double floor = 1e-10);

/// Moore-Penrose pseudoinverse. Singular values below rank_tol * sigma_max
/// are treated as zero.
Matrix PseudoInverse(const Matrix& m, double rank_tol = 1e-10);

struct SingularTriple {
  double sigma = 0.0;
  Vector u;  // left, unit
  Vector v;  // right, unit
  bool converged = true;
  int iterations = 0;
};

/// Dominant singular triple by power iteration on the smaller Gram matrix.
/// Stops when ||M v - sigma u|| <= tol * sigma (the other residual is exact
/// by construction). Hitting max_iter logs a warning and returns the last
/// iterate with converged = false. A zero matrix yields sigma = 0.
SingularTriple TopSingularTriple(const Matrix& m, double tol = 1e-8,
                                 int max_iter = 1000);

/// Frobenius norm of (a - b) relative to ||b||, with a floor on the divisor.
double RelativeError(const Matrix& a, const Matrix& b);

}  // namespace dlsvm::numerics
