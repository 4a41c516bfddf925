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

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dlsvm::svm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One-class SVM in code space, nu-parameterized dual:
///   min 1/2 lambda^T Q lambda,  0 <= lambda_i <= 1/(nu N),  sum lambda = 1,
/// with Q = X^T X. omega = X lambda.
struct OcsvmModel {
  Vector omega;
  double rho = 0.0;
  Vector lambda;
  Vector xi;
  double nu = 0.5;
  std::vector<int> support;  // indices with lambda > 0
  double kkt_violation = 0.0;
  long iterations = 0;
  bool converged = true;
};

struct FitOptions {
  double tol = 1e-6;
  long max_iter = 100000;  // pair updates
};

/// x: n x N codes (column per sample). warm: previous multipliers, projected
/// onto the feasible set before use.
OcsvmModel Fit(const Matrix& x, double nu,
               const std::optional<Vector>& warm = std::nullopt,
               const FitOptions& opts = {});

double Decision(const OcsvmModel& model, const Eigen::Ref<const Vector>& x);
/// True when the point is flagged as an anomaly (decision <= 0).
bool Predict(const OcsvmModel& model, const Eigen::Ref<const Vector>& x);
/// Decision values for every column of x.
Vector DecisionBatch(const OcsvmModel& model, const Matrix& x);

/// 1/2 lambda^T X^T X lambda.
double DualObjective(const Matrix& x, const Vector& lambda);

/// Max over coordinates of the projected-gradient magnitude, expressed as the
/// gap max_{lambda_i > 0} G_i - min_{lambda_i < C} G_i with G = X^T X lambda.
/// Zero exactly at a KKT point.
double KktViolation(const Matrix& x, const Vector& lambda, double nu);

/// Euclidean projection onto {0 <= v_i <= c, sum v = 1}.
Vector ProjectBoxSimplex(const Vector& v, double c);

/// 1/2 ||omega||^2 + 1/(nu N) sum xi_i - rho, xi_i = max(0, rho - omega^T x_i).
double PrimalObjective(const Matrix& x, const Vector& omega, double rho,
                       double nu);

}  // namespace dlsvm::svm
