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

#include "ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace dlsvm::svm {
namespace {

constexpr double kBoundSlack = 1e-8;
constexpr double kMinCurvature = 1e-12;

double BoxBound(double nu, Eigen::Index n) {
  return 1.0 / (nu * static_cast<double>(n));
}

Vector ColdStart(Eigen::Index n, double c) {
  Vector lambda = Vector::Zero(n);
  double left = 1.0;
  for (Eigen::Index i = 0; i < n && left > 0.0; ++i) {
    lambda(i) = std::min(c, left);
    left -= lambda(i);
  }
  return lambda;
}

// rho from the KKT conditions: margin SVs sit exactly on the hyperplane; with
// none available, take the midpoint of the feasible interval.
double ComputeRho(const Vector& g, const Vector& lambda, double c) {
  double sum = 0.0;
  int count = 0;
  double lo = -std::numeric_limits<double>::infinity();  // max G over at-bound
  double hi = std::numeric_limits<double>::infinity();   // min G over zero
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (lambda(i) > kBoundSlack && lambda(i) < c - kBoundSlack) {
      sum += g(i);
      ++count;
    } else if (lambda(i) >= c - kBoundSlack) {
      lo = std::max(lo, g(i));
    } else {
      hi = std::min(hi, g(i));
    }
  }
  if (count > 0) return sum / count;
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  return std::isfinite(lo) ? lo : hi;
}

double Gap(const Vector& g, const Vector& lambda, double c) {
  double up = std::numeric_limits<double>::infinity();
  double low = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (lambda(i) < c) up = std::min(up, g(i));
    if (lambda(i) > 0.0) low = std::max(low, g(i));
  }
  if (!std::isfinite(up) || !std::isfinite(low)) return 0.0;
  return std::max(0.0, low - up);
}

}  // namespace

Vector ProjectBoxSimplex(const Vector& v, double c) {
  const Eigen::Index n = v.size();
  Require(n >= 1 && c * static_cast<double>(n) >= 1.0 - 1e-12,
          ErrorKind::kInvalidArgument, "box-simplex projection is infeasible");
  auto mass = [&](double shift) {
    return (v.array() - shift).max(0.0).min(c).sum();
  };
  double lo = v.minCoeff() - c - 1.0;  // mass(lo) = n c >= 1
  double hi = v.maxCoeff();            // mass(hi) = 0
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (mass(mid) >= 1.0 ? lo : hi) = mid;
  }
  Vector out = (v.array() - lo).max(0.0).min(c);
  // Push the leftover rounding mass onto a coordinate with room for it.
  double left = 1.0 - out.sum();
  for (Eigen::Index i = 0; i < n && left != 0.0; ++i) {
    const double next = std::clamp(out(i) + left, 0.0, c);
    left -= next - out(i);
    out(i) = next;
  }
  return out;
}

OcsvmModel Fit(const Matrix& x, double nu, const std::optional<Vector>& warm,
               const FitOptions& opts) {
  const Eigen::Index n_samples = x.cols();
  Require(n_samples >= 1, ErrorKind::kInvalidArgument,
          "ocsvm: need at least one sample");
  Require(nu > 0.0 && nu <= 1.0, ErrorKind::kInvalidArgument,
          "ocsvm: nu must lie in (0, 1], got " + std::to_string(nu));
  Require(nu * static_cast<double>(n_samples) >= 1.0 - 1e-12,
          ErrorKind::kInvalidArgument,
          "ocsvm: nu * N = " + std::to_string(nu * n_samples) +
              " is below 1; raise nu or use more samples");
  const double c = BoxBound(nu, n_samples);

  Vector lambda;
  if (warm) {
    Require(warm->size() == n_samples, ErrorKind::kDimension,
            "ocsvm: warm start has length " + std::to_string(warm->size()) +
                ", expected " + std::to_string(n_samples));
    lambda = ProjectBoxSimplex(*warm, c);
  } else {
    lambda = ColdStart(n_samples, c);
  }

  Vector omega = x * lambda;
  Vector g = x.transpose() * omega;
  const Vector sqnorm = x.colwise().squaredNorm().transpose();

  OcsvmModel model;
  model.nu = nu;
  long it = 0;
  bool converged = false;
  for (; it < opts.max_iter; ++it) {
    // i: most room to grow (smallest gradient among lambda < C).
    Eigen::Index i = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n_samples; ++t) {
      if (lambda(t) < c && g(t) < g_min) {
        g_min = g(t);
        i = t;
      }
      if (lambda(t) > 0.0) g_max = std::max(g_max, g(t));
    }
    if (i < 0 || g_max - g_min < opts.tol) {
      converged = true;
      break;
    }
    // j: second-order choice among lambda > 0 with G_j > G_i.
    Eigen::Index j = -1;
    double best = -1.0;
    double best_a = 0.0;
    for (Eigen::Index t = 0; t < n_samples; ++t) {
      if (!(lambda(t) > 0.0) || g(t) <= g_min) continue;
      const double b = g(t) - g_min;
      double a = sqnorm(i) + sqnorm(t) - 2.0 * x.col(i).dot(x.col(t));
      if (a <= kMinCurvature) a = kMinCurvature;
      const double score = b * b / a;
      if (score > best) {
        best = score;
        j = t;
        best_a = a;
      }
    }
    if (j < 0) {
      converged = true;
      break;
    }
    double delta = (g(j) - g(i)) / best_a;
    delta = std::min({delta, c - lambda(i), lambda(j)});
    if (!(delta > 0.0)) {
      converged = true;
      break;
    }
    lambda(i) += delta;
    lambda(j) -= delta;
    if (c - lambda(i) <= 1e-15 * c) lambda(i) = c;
    if (lambda(j) <= 1e-15 * c) lambda(j) = 0.0;
    const Vector step = delta * (x.col(i) - x.col(j));
    omega += step;
    g.noalias() += x.transpose() * step;
  }

  // Refresh from scratch to shed accumulated round-off.
  omega = x * lambda;
  g = x.transpose() * omega;
  model.iterations = it;
  model.converged = converged;
  if (!converged) {
    Warn("ocsvm: SMO stopped at the cap of " + std::to_string(opts.max_iter) +
         " pair updates");
  }
  model.lambda = lambda;
  model.omega = omega;
  model.rho = ComputeRho(g, lambda, c);
  model.xi = (model.rho - g.array()).max(0.0).matrix();
  model.kkt_violation = Gap(g, lambda, c);
  for (Eigen::Index t = 0; t < n_samples; ++t) {
    if (lambda(t) > 0.0) model.support.push_back(static_cast<int>(t));
  }
  return model;
}

double Decision(const OcsvmModel& model, const Eigen::Ref<const Vector>& x) {
  Require(x.size() == model.omega.size(), ErrorKind::kDimension,
          "ocsvm: code length " + std::to_string(x.size()) +
              " does not match omega length " +
              std::to_string(model.omega.size()));
  return model.omega.dot(x) - model.rho;
}

bool Predict(const OcsvmModel& model, const Eigen::Ref<const Vector>& x) {
  return Decision(model, x) <= 0.0;
}

Vector DecisionBatch(const OcsvmModel& model, const Matrix& x) {
  Require(x.rows() == model.omega.size(), ErrorKind::kDimension,
          "ocsvm: code length " + std::to_string(x.rows()) +
              " does not match omega length " +
              std::to_string(model.omega.size()));
  return (x.transpose() * model.omega).array() - model.rho;
}

double DualObjective(const Matrix& x, const Vector& lambda) {
  return 0.5 * (x * lambda).squaredNorm();
}

double KktViolation(const Matrix& x, const Vector& lambda, double nu) {
  const Vector g = x.transpose() * (x * lambda);
  return Gap(g, lambda, BoxBound(nu, x.cols()));
}

double PrimalObjective(const Matrix& x, const Vector& omega, double rho,
                       double nu) {
  const Vector margin = x.transpose() * omega;
  const double slack = (rho - margin.array()).max(0.0).sum();
  return 0.5 * omega.squaredNorm() + BoxBound(nu, x.cols()) * slack - rho;
}

}  // namespace dlsvm::svm
