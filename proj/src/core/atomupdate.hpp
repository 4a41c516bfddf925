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

namespace dlsvm::atoms {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Coupling data for one atom: w is omega_i, lambda the OC-SVM multipliers
/// restricted to the signals that use the atom.
struct CoupledRow {
  double w = 0.0;
  Vector lambda;
  double beta = 0.0;
  double alpha = 0.0;  // l1 weight, DPL variants only
};

enum class TrsMethod { kPower, kBidual };

struct TrsOptions {
  TrsMethod method = TrsMethod::kPower;
  int max_iter = 200;
  double step_tol = 1e-9;
  double bisection_tol = 1e-10;
};

/// 1/2 ||R^T d + w lambda||^2.
double TrsObjective(const Matrix& r, double w, const Vector& lambda,
                    const Vector& d);

/// Maximizer of TrsObjective over the unit sphere. The power method starts
/// from d_prev and from the dominant left singular vector of R and keeps the
/// better endpoint. With R = 0 and w lambda = 0 returns d_prev.
Vector TrsMax(const Matrix& r, double w, const Vector& lambda,
              const Vector& d_prev, const TrsOptions& opts = {});

struct PairUpdate {
  Vector atom;     // d+ (or a+ in kernel form)
  RowVector row;   // x+ over the restricted columns
  bool zeroed = false;
  bool renormalized = false;  // kernel forms only
};

/// 1/2 ||R - d x||^2 + beta ||x||_2 - w x lambda.
double DlPairObjective(const Matrix& r, const CoupledRow& coup,
                       const Vector& d, const RowVector& x);

/// Closed-form atom/row update with soft thresholding. The row is nonzero
/// only when ||R^T d* + w lambda|| > beta.
PairUpdate UpdatePairDl(const Matrix& r, const CoupledRow& coup,
                        const Vector& d_prev, const TrsOptions& trs = {});

struct SaddleConfig {
  double step_scale = 0.9;
  int max_iter = 300;
  double tol = 1e-7;
};

struct SaddleState {
  Vector d;     // unit
  Vector tau1;  // ||.||_inf <= 1
  Vector tau2;  // ||.||_2 <= 1
  double step = 0.0;
  int iterations = 0;
};

struct DplUpdate {
  Vector atom;         // d+
  RowVector analysis;  // p+, length m (or N in kernel form)
  RowVector row;       // x+ = p+ Y_sub
  SaddleState state;
  bool converged = false;
  bool kept_previous = false;
  bool renormalized = false;  // kernel form only
};

/// 1/2 ||R - d x||^2 + beta ||x||_2 + alpha ||x||_1 - w x lambda.
double DplPairObjective(const Matrix& r, const CoupledRow& coup,
                        const Vector& d, const RowVector& x);

/// Projection H = Y^+ Y onto the row space of Y.
Matrix RowSpaceProjector(const Matrix& y);

/// Y^+ and H = Y^+ Y, for callers that reuse one Y_sub across updates.
struct RowSpace {
  Matrix pinv;
  Matrix h;
};
RowSpace MakeRowSpace(const Matrix& y);

/// Projected gradient descent/ascent on the saddle problem
///   min_{||d|| = 1} max_{||tau1||_inf <= 1, ||tau2|| <= 1}
///     -1/2 ||R^T d + w lambda - alpha tau1 - beta tau2||_H^2,
/// warm-started from the trust-region solution of the unregularized problem.
/// Returns the iterate with the smallest DplPairObjective. When p_prev is
/// given, (d_prev, p_prev) competes as a candidate, so the result never
/// increases the pair objective. `space`, when given, must be
/// MakeRowSpace(y_sub).
DplUpdate UpdatePairDpl(const Matrix& r, const Matrix& y_sub,
                        const CoupledRow& coup, const Vector& d_prev,
                        const SaddleConfig& cfg = {},
                        const TrsOptions& trs = {},
                        const RowVector* p_prev = nullptr,
                        const RowSpace* space = nullptr);

/// 1/2 tr((R - a x)^T K (R - a x)) + beta ||x||_2 - w x lambda.
double KdlPairObjective(const Matrix& r, const Matrix& k,
                        const CoupledRow& coup, const Vector& a,
                        const RowVector& x);

/// Kernel DL update: trust-region step in f = K^1/2 a coordinates.
PairUpdate UpdatePairKdl(const Matrix& r, const Matrix& k, const Matrix& ksqrt,
                         const Matrix& kinvsqrt, const CoupledRow& coup,
                         const Vector& a_prev, const TrsOptions& trs = {});

/// Kernel DPL update: the DPL saddle solve with R <- K^1/2 R,
/// Y_sub <- K(:, cols) and d <- K^1/2 a. `atom` holds a+, `analysis` b+.
DplUpdate UpdatePairKdpl(const Matrix& r, const Matrix& k_cols,
                         const Matrix& ksqrt, const Matrix& kinvsqrt,
                         const CoupledRow& coup, const Vector& a_prev,
                         const SaddleConfig& cfg = {},
                         const TrsOptions& trs = {},
                         const RowVector* b_prev = nullptr,
                         const RowSpace* space = nullptr);

}  // namespace dlsvm::atoms
