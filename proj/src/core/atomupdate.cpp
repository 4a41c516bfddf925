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

#include "atomupdate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"

namespace dlsvm::atoms {
namespace {

// Nonzero part of the left spectrum of R: R R^T = U diag(s2) U^T restricted
// to s2 > 0, eigenvalues descending. Works in the smaller Gram space.
struct LeftSpectrum {
  Vector s2;
  Matrix u;
};

LeftSpectrum ComputeLeftSpectrum(const Matrix& r) {
  LeftSpectrum out;
  if (r.size() == 0 || r.cwiseAbs().maxCoeff() == 0.0) {
    out.s2 = Vector(0);
    out.u = Matrix(r.rows(), 0);
    return out;
  }
  Vector s2;
  Matrix u;
  if (r.rows() <= r.cols()) {
    numerics::SymEig eig = numerics::SymmetricEigen(r * r.transpose());
    s2 = eig.eigenvalues;
    u = eig.eigenvectors;
  } else {
    numerics::SymEig eig = numerics::SymmetricEigen(r.transpose() * r);
    s2 = eig.eigenvalues;
    u = r * eig.eigenvectors;
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      const double nrm = u.col(i).norm();
      if (nrm > 0.0) u.col(i) /= nrm;
    }
  }
  const double cut = 1e-12 * std::max(s2(0), 0.0);
  Eigen::Index rank = 0;
  while (rank < s2.size() && s2(rank) > cut) ++rank;
  out.s2 = s2.head(rank);
  out.u = u.leftCols(rank);
  return out;
}

Vector PowerAscent(const Matrix& r, const Vector& b, Vector d,
                   const TrsOptions& opts) {
  for (int it = 0; it < opts.max_iter; ++it) {
    Vector grad = r * (r.transpose() * d) + b;
    const double gn = grad.norm();
    if (gn == 0.0) break;
    grad /= gn;
    const double change = (grad - d).norm();
    d = std::move(grad);
    if (change < opts.step_tol) break;
  }
  return d;
}

Vector Bidual(const LeftSpectrum& spec, const Vector& b, double tol) {
  const Vector q = spec.u.transpose() * b;
  const Vector& s2 = spec.s2;
  const double smax = s2(0);
  const Eigen::Index r = s2.size();
  const double tie = 1e-12 * smax;

  double q_top = 0.0;
  for (Eigen::Index i = 0; i < r && s2(i) >= smax - tie; ++i) q_top += q(i) * q(i);
  Vector dbar = Vector::Zero(r);

  if (std::sqrt(q_top) <= 1e-14 * std::max(1.0, q.norm())) {
    // Possible hard case: the linear term misses the top eigenspace.
    double rest = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (s2(i) >= smax - tie) continue;
      dbar(i) = q(i) / (smax - s2(i));
      rest += dbar(i) * dbar(i);
    }
    if (rest <= 1.0) {
      dbar(0) = std::sqrt(1.0 - rest);
      return spec.u * dbar;
    }
    dbar.setZero();
  }

  auto phi = [&](double eta) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
      const double t = q(i) / (eta - s2(i));
      acc += t * t;
    }
    return acc;
  };
  double lo = smax;
  double hi = smax + q.norm();
  for (int it = 0; it < 2000 && hi - lo > tol * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) > 1.0 ? lo : hi) = mid;
  }
  for (Eigen::Index i = 0; i < r; ++i) dbar(i) = q(i) / (hi - s2(i));
  const double nrm = dbar.norm();
  if (nrm > 0.0) dbar /= nrm;
  return spec.u * dbar;
}

void CheckRow(const Matrix& r, const CoupledRow& coup, const char* who) {
  Require(coup.lambda.size() == r.cols(), ErrorKind::kDimension,
          std::string(who) + ": lambda has " +
              std::to_string(coup.lambda.size()) + " entries but R has " +
              std::to_string(r.cols()) + " columns");
  Require(coup.beta >= 0.0 && coup.alpha >= 0.0, ErrorKind::kInvalidArgument,
          std::string(who) + ": beta and alpha must be nonnegative");
}

// Soft threshold on the row: x = (1 - beta/||g||) g when ||g|| > beta.
bool Shrink(const Vector& g, double beta, RowVector* x) {
  const double gn = g.norm();
  if (!(gn > beta)) return false;
  *x = ((1.0 - beta / gn) * g).transpose();
  return true;
}

}  // namespace

double TrsObjective(const Matrix& r, double w, const Vector& lambda,
                    const Vector& d) {
  return 0.5 * (r.transpose() * d + w * lambda).squaredNorm();
}

Vector TrsMax(const Matrix& r, double w, const Vector& lambda,
              const Vector& d_prev, const TrsOptions& opts) {
  Require(lambda.size() == r.cols(), ErrorKind::kDimension,
          "trs_max: lambda has " + std::to_string(lambda.size()) +
              " entries but R has " + std::to_string(r.cols()) + " columns");
  Require(d_prev.size() == r.rows(), ErrorKind::kDimension,
          "trs_max: previous atom has length " + std::to_string(d_prev.size()) +
              ", expected " + std::to_string(r.rows()));
  const LeftSpectrum spec = ComputeLeftSpectrum(r);
  if (spec.s2.size() == 0) return d_prev;  // R = 0: objective is constant
  const Vector b = w * (r * lambda);

  if (opts.method == TrsMethod::kBidual) {
    return Bidual(spec, b, opts.bisection_tol);
  }

  Vector start = spec.u.col(0);
  if (start.dot(b) < 0.0) start = -start;
  Vector best = PowerAscent(r, b, start, opts);
  double best_val = TrsObjective(r, w, lambda, best);
  const double prev_norm = d_prev.norm();
  if (prev_norm > 0.0) {
    Vector other = PowerAscent(r, b, d_prev / prev_norm, opts);
    const double val = TrsObjective(r, w, lambda, other);
    if (val > best_val) best = std::move(other);
  }
  return best;
}

double DlPairObjective(const Matrix& r, const CoupledRow& coup,
                       const Vector& d, const RowVector& x) {
  return 0.5 * (r - d * x).squaredNorm() + coup.beta * x.norm() -
         coup.w * x.dot(coup.lambda.transpose());
}

PairUpdate UpdatePairDl(const Matrix& r, const CoupledRow& coup,
                        const Vector& d_prev, const TrsOptions& trs) {
  CheckRow(r, coup, "update_pair_dl");
  PairUpdate out;
  const Vector d = TrsMax(r, coup.w, coup.lambda, d_prev, trs);
  const Vector g = r.transpose() * d + coup.w * coup.lambda;
  if (Shrink(g, coup.beta, &out.row)) {
    out.atom = d;
  } else {
    out.atom = d_prev;
    out.row = RowVector::Zero(r.cols());
    out.zeroed = true;
  }
  return out;
}

double DplPairObjective(const Matrix& r, const CoupledRow& coup,
                        const Vector& d, const RowVector& x) {
  return DlPairObjective(r, coup, d, x) + coup.alpha * x.lpNorm<1>();
}

Matrix RowSpaceProjector(const Matrix& y) { return MakeRowSpace(y).h; }

RowSpace MakeRowSpace(const Matrix& y) {
  RowSpace out;
  out.pinv = numerics::PseudoInverse(y);
  const Matrix h = out.pinv * y;
  out.h = 0.5 * (h + h.transpose());
  return out;
}

DplUpdate UpdatePairDpl(const Matrix& r, const Matrix& y_sub,
                        const CoupledRow& coup, const Vector& d_prev,
                        const SaddleConfig& cfg, const TrsOptions& trs,
                        const RowVector* p_prev, const RowSpace* space) {
  CheckRow(r, coup, "update_pair_dpl");
  Require(y_sub.cols() == r.cols(), ErrorKind::kDimension,
          "update_pair_dpl: Y_sub has " + std::to_string(y_sub.cols()) +
              " columns but R has " + std::to_string(r.cols()));
  Require(p_prev == nullptr || p_prev->size() == y_sub.rows(),
          ErrorKind::kDimension, "update_pair_dpl: previous analysis row "
                                 "does not match Y_sub rows");
  const Eigen::Index k = r.cols();
  RowSpace local;
  if (space == nullptr) {
    local = MakeRowSpace(y_sub);
    space = &local;
  }
  Require(space->h.rows() == k && space->pinv.rows() == k &&
              space->pinv.cols() == y_sub.rows(),
          ErrorKind::kDimension, "update_pair_dpl: row space does not match "
                                 "Y_sub");
  const Matrix& ypinv = space->pinv;
  const Matrix& h = space->h;
  const double alpha = coup.alpha;
  const double beta = coup.beta;
  const Vector wl = coup.w * coup.lambda;

  SaddleState st;
  st.d = TrsMax(r * h, coup.w, h * coup.lambda, d_prev, trs);
  st.tau1 = Vector::Zero(k);
  st.tau2 = Vector::Zero(k);

  // Inner maximizer for the first iterate under H = I, by block coordinates.
  {
    const Vector g = r.transpose() * st.d + wl;
    for (int sweep = 0; sweep < 50 && (alpha > 0.0 || beta > 0.0); ++sweep) {
      if (alpha > 0.0) {
        st.tau1 = ((g - beta * st.tau2) / alpha).cwiseMax(-1.0).cwiseMin(1.0);
      }
      if (beta > 0.0) {
        const Vector t = (g - alpha * st.tau1) / beta;
        const double tn = t.norm();
        st.tau2 = tn > 1.0 ? Vector(t / tn) : t;
      }
    }
  }

  const double sigma1 = numerics::TopSingularTriple(r).sigma;
  double lip = sigma1 * sigma1 + alpha * alpha + beta * beta +
               std::abs(coup.w) * coup.lambda.norm();
  if (!(lip > 0.0)) lip = 1.0;
  st.step = cfg.step_scale / lip;

  auto residual = [&](const SaddleState& s) {
    return Vector(r.transpose() * s.d + wl - alpha * s.tau1 - beta * s.tau2);
  };

  DplUpdate out;
  auto consider = [&](const SaddleState& s) {
    const Vector z = residual(s);
    RowVector p = z.transpose() * ypinv;
    RowVector x = p * y_sub;
    const double val = DplPairObjective(r, coup, s.d, x);
    return std::make_tuple(val, std::move(p), std::move(x));
  };

  auto [best_val, best_p, best_x] = consider(st);
  out.state = st;
  out.atom = st.d;
  out.analysis = best_p;
  out.row = best_x;

  bool converged = false;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    const Vector hz = h * residual(st);
    Vector d_new = st.d + st.step * (r * hz);
    const double dn = d_new.norm();
    d_new = dn > 0.0 ? Vector(d_new / dn) : st.d;
    Vector t1_new =
        (st.tau1 + st.step * alpha * hz).cwiseMax(-1.0).cwiseMin(1.0);
    Vector t2_new = st.tau2 + st.step * beta * hz;
    const double t2n = t2_new.norm();
    if (t2n > 1.0) t2_new /= t2n;

    const double change = (d_new - st.d).norm() + (t1_new - st.tau1).norm() +
                          (t2_new - st.tau2).norm();
    st.d = std::move(d_new);
    st.tau1 = std::move(t1_new);
    st.tau2 = std::move(t2_new);
    st.iterations = it + 1;

    auto [val, p, x] = consider(st);
    if (val < best_val) {
      best_val = val;
      out.state = st;
      out.atom = st.d;
      out.analysis = std::move(p);
      out.row = std::move(x);
    }
    if (change < cfg.tol) {
      converged = true;
      break;
    }
  }
  out.state.iterations = it;
  out.converged = converged;

  if (p_prev != nullptr) {
    const RowVector x_prev = *p_prev * y_sub;
    if (DplPairObjective(r, coup, d_prev, x_prev) < best_val) {
      out.atom = d_prev;
      out.analysis = *p_prev;
      out.row = x_prev;
      out.kept_previous = true;
    }
  }
  return out;
}

double KdlPairObjective(const Matrix& r, const Matrix& k,
                        const CoupledRow& coup, const Vector& a,
                        const RowVector& x) {
  const Matrix e = r - a * x;
  return 0.5 * (e.cwiseProduct(k * e)).sum() + coup.beta * x.norm() -
         coup.w * x.dot(coup.lambda.transpose());
}

namespace {

// a = K^-1/2 f, rescaled onto {a : a^T K a = 1} if the range projection
// shortened it.
Vector BackToCoefficients(const Matrix& ksqrt, const Matrix& kinvsqrt,
                          const Vector& f, bool* renormalized) {
  Vector a = kinvsqrt * f;
  const double nrm = (ksqrt * a).norm();
  *renormalized = false;
  if (std::abs(nrm - 1.0) > 1e-4) {
    Require(nrm > 0.0, ErrorKind::kNumeric,
            "kernel atom update: direction lies in the null space of K");
    Warn("kernel atom update: ||K^1/2 a|| = " + std::to_string(nrm) +
         ", renormalizing");
    a /= nrm;
    *renormalized = true;
  }
  return a;
}

void CheckKernel(const Matrix& r, const Matrix& ksqrt, const Matrix& kinvsqrt,
                 const Vector& a_prev, const char* who) {
  const Eigen::Index n = ksqrt.rows();
  Require(ksqrt.cols() == n && kinvsqrt.rows() == n && kinvsqrt.cols() == n &&
              r.rows() == n && a_prev.size() == n,
          ErrorKind::kDimension,
          std::string(who) + ": kernel matrices, R and a_prev must share the "
                             "sample dimension");
}

}  // namespace

PairUpdate UpdatePairKdl(const Matrix& r, const Matrix& k, const Matrix& ksqrt,
                         const Matrix& kinvsqrt, const CoupledRow& coup,
                         const Vector& a_prev, const TrsOptions& trs) {
  CheckRow(r, coup, "update_pair_kdl");
  CheckKernel(r, ksqrt, kinvsqrt, a_prev, "update_pair_kdl");
  Require(k.rows() == r.rows() && k.cols() == r.rows(), ErrorKind::kDimension,
          "update_pair_kdl: K does not match R");
  const Matrix m = ksqrt * r;
  const Vector f = TrsMax(m, coup.w, coup.lambda, ksqrt * a_prev, trs);
  PairUpdate out;
  const Vector a = BackToCoefficients(ksqrt, kinvsqrt, f, &out.renormalized);
  const Vector g = r.transpose() * (k * a) + coup.w * coup.lambda;
  if (Shrink(g, coup.beta, &out.row)) {
    out.atom = a;
  } else {
    out.atom = a_prev;
    out.row = RowVector::Zero(r.cols());
    out.zeroed = true;
    out.renormalized = false;
  }
  return out;
}

DplUpdate UpdatePairKdpl(const Matrix& r, const Matrix& k_cols,
                         const Matrix& ksqrt, const Matrix& kinvsqrt,
                         const CoupledRow& coup, const Vector& a_prev,
                         const SaddleConfig& cfg, const TrsOptions& trs,
                         const RowVector* b_prev, const RowSpace* space) {
  CheckRow(r, coup, "update_pair_kdpl");
  CheckKernel(r, ksqrt, kinvsqrt, a_prev, "update_pair_kdpl");
  DplUpdate out = UpdatePairDpl(ksqrt * r, k_cols, coup, ksqrt * a_prev, cfg,
                                trs, b_prev, space);
  if (out.kept_previous) {
    out.atom = a_prev;
  } else {
    out.atom = BackToCoefficients(ksqrt, kinvsqrt, out.atom, &out.renormalized);
  }
  return out;
}

}  // namespace dlsvm::atoms
