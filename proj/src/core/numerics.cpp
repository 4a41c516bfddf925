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

#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace dlsvm::numerics {

double RelativeError(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

SymEig SymmetricEigen(const Matrix& s) {
  Require(s.rows() == s.cols() && s.rows() > 0, ErrorKind::kDimension,
          "symmetric eigendecomposition needs a non-empty square matrix, got " +
              std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
  const double scale = std::max(s.norm(), std::numeric_limits<double>::min());
  Require((s - s.transpose()).norm() <= 1e-10 * scale, ErrorKind::kDimension,
          "matrix is not symmetric within 1e-10 relative tolerance");

  // Symmetrize exactly so round-off asymmetry cannot leak into the solver.
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  Require(solver.info() == Eigen::Success, ErrorKind::kNumeric,
          "symmetric eigensolver failed to converge");

  SymEig out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Matrix PsdSqrt(const Matrix& k, double floor) {
  SymEig eig = SymmetricEigen(k);
  Vector w = eig.eigenvalues;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -floor) {
      Fail(ErrorKind::kNotPsd, "matrix is not PSD: eigenvalue " +
                                   std::to_string(w(i)) + " below -" +
                                   std::to_string(floor));
    }
    w(i) = w(i) > 0.0 ? std::sqrt(w(i)) : 0.0;
  }
  const Matrix& v = eig.eigenvectors;
  Matrix out = v * w.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix PseudoInverse(const Matrix& m, double rank_tol) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rank_tol * sv(0) : 0.0;
  Vector inv(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    inv(i) = (sv(i) > cutoff && sv(i) > 0.0) ? 1.0 / sv(i) : 0.0;
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SingularTriple TopSingularTriple(const Matrix& m, double tol, int max_iter) {
  SingularTriple out;
  out.u = Vector::Zero(m.rows());
  out.v = Vector::Zero(m.cols());
  if (m.rows() > 0) out.u(0) = 1.0;
  if (m.cols() > 0) out.v(0) = 1.0;
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return out;

  // Iterate in the smaller of the two spaces.
  const bool left = m.rows() <= m.cols();
  const Matrix gram = left ? Matrix(m * m.transpose())
                           : Matrix(m.transpose() * m);
  const Eigen::Index dim = gram.rows();
  const double gram_norm = gram.norm();

  Vector x = Vector::Ones(dim).normalized();
  Vector y = gram * x;
  if (y.norm() <= 1e-14 * gram_norm) {
    // Start vector orthogonal to the dominant subspace.
    x(0) += 1e-3;
    x.normalize();
    y = gram * x;
    for (Eigen::Index j = 0; j < dim && y.norm() <= 1e-14 * gram_norm; ++j) {
      x = Vector::Unit(dim, j);
      y = gram * x;
    }
  }

  double lambda = x.dot(y);
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    lambda = x.dot(y);
    if ((y - lambda * x).norm() <= tol * lambda) {
      converged = true;
      break;
    }
    x = y.normalized();
    y = gram * x;
  }
  lambda = x.dot(y);

  out.iterations = it;
  out.converged = converged;
  if (!converged) {
    Warn("top singular triple: no convergence after " +
         std::to_string(max_iter) + " iterations");
  }
  if (left) {
    out.u = x;
    Vector mt_u = m.transpose() * x;
    out.sigma = mt_u.norm();
    out.v = out.sigma > 0.0 ? Vector(mt_u / out.sigma) : out.v;
  } else {
    out.v = x;
    Vector mv = m * x;
    out.sigma = mv.norm();
    out.u = out.sigma > 0.0 ? Vector(mv / out.sigma) : out.u;
  }
  return out;
}

}  // namespace dlsvm::numerics
