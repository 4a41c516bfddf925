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

namespace dlsvm::sparse {

using Matrix = Eigen::MatrixXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Codes X (n x N) and the support mask they were computed on. A row may be
/// entirely zero once it has been trimmed.
struct SparseCodes {
  Matrix x;
  Mask support;
  int sparsity = 0;
};

/// Orthogonal matching pursuit against an explicit dictionary with unit
/// columns. Greedy selection by largest |d_j^T r| (lowest index on ties),
/// least-squares refit on the support after every selection. A column stops
/// early once all residual correlations drop below 1e-12.
SparseCodes Omp(const Matrix& y, const Matrix& d, int s);

/// Same pursuit driven only by correlations: dty = D^T Y (n x N) and
/// dtd = D^T D (n x n, unit diagonal). Residuals are never formed; the
/// working correlations are dty_j - dtd * x_j.
SparseCodes OmpGram(const Matrix& dty, const Matrix& dtd, int s);

}  // namespace dlsvm::sparse
