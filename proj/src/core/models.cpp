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

#include "models.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"
#include "rng.hpp"

namespace dlsvm::model {
namespace {

using RowVector = Eigen::RowVectorXd;

constexpr int kMaxRedraws = 100;

// Residual E together with M E for the metric of the representation space
// (identity for standard forms, K for kernel forms). The fit term is
// 1/2 sum_j e_j^T M e_j.
class Residual {
 public:
  Residual() = default;
  Residual(Matrix e, const Matrix* metric) : e_(std::move(e)), metric_(metric) {
    if (metric_ != nullptr) me_ = *metric_ * e_;
  }

  const Matrix& e() const { return e_; }

  double Fit() const {
    return metric_ != nullptr ? 0.5 * e_.cwiseProduct(me_).sum()
                              : 0.5 * e_.squaredNorm();
  }

  // Change of Fit() when every column j moves by a_old xo_j - a_new xn_j.
  double FitDelta(const Vector& a_old, const RowVector& xo, const Vector& a_new,
                  const RowVector& xn) const {
    const Matrix& me = metric_ != nullptr ? me_ : e_;
    const Vector u = me.transpose() * a_old;
    const Vector v = me.transpose() * a_new;
    const Vector ma_old = Apply(a_old);
    const double koo = a_old.dot(ma_old);
    const double kon = a_new.dot(ma_old);
    const double knn = a_new.dot(Apply(a_new));
    double cross = 0.0;
    double quad = 0.0;
    for (Eigen::Index j = 0; j < xo.size(); ++j) {
      const double o = xo(j);
      const double n = xn(j);
      if (o == 0.0 && n == 0.0) continue;
      cross += o * u(j) - n * v(j);
      quad += o * o * koo - 2.0 * o * n * kon + n * n * knn;
    }
    return cross + 0.5 * quad;
  }

  void Commit(const Vector& a_old, const RowVector& xo, const Vector& a_new,
              const RowVector& xn) {
    e_.noalias() += a_old * xo;
    e_.noalias() -= a_new * xn;
    if (metric_ != nullptr) {
      me_.noalias() += Apply(a_old) * xo;
      me_.noalias() -= Apply(a_new) * xn;
    }
  }

 private:
  Vector Apply(const Vector& a) const {
    return metric_ != nullptr ? Vector(*metric_ * a) : a;
  }

  Matrix e_;
  Matrix me_;
  const Matrix* metric_ = nullptr;
};

double OcsvmTerm(const svm::OcsvmModel& svm, const Vector& t) {
  const double c = 1.0 / (svm.nu * static_cast<double>(t.size()));
  return 0.5 * svm.omega.squaredNorm() +
         c * (svm.rho - t.array()).max(0.0).sum() - svm.rho;
}

std::vector<Eigen::Index> SupportColumns(const sparse::Mask& support,
                                         Eigen::Index row) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < support.cols(); ++j) {
    if (support(row, j)) cols.push_back(j);
  }
  return cols;
}

Matrix Columns(const Matrix& m, const std::vector<Eigen::Index>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = m.col(cols[c]);
  }
  return out;
}

class Trainer {
 public:
  Trainer(const Matrix& y, const Hyperparams& hp) : y_(y), hp_(hp) {
    kernel_ = IsKernel(hp_.variant);
    pair_ = IsPairModel(hp_.variant);
  }

  TrainedModel Run(TrainDiagnostics* diag) {
    Initialize(diag);
    Record(0, 0);
    const int n = hp_.n_atoms;
    for (int outer = 1; outer <= hp_.outer_iters; ++outer) {
      for (int i = 0; i < n; ++i) {
        UpdateAtom(i);
        Record(outer, i + 1);
      }
      Refit();
      Record(outer, n + 1);
      int trimmed = 0;
      for (const char t : trimmed_) trimmed += t;
      Info("outer " + std::to_string(outer) + ": total " +
           std::to_string(trace_.back().total) + ", trimmed rows " +
           std::to_string(trimmed));
    }

    const double code_scale =
        x_.cols() > 0 ? x_.colwise().norm().maxCoeff() : 0.0;
    if (svm_.omega.norm() <= 1e-4 * code_scale) {
      Warn("OC-SVM normal vector vanished (the origin lies inside the hull "
           "of the codes); detection scores carry no information");
    }

    TrainedModel out;
    out.hp = hp_;
    out.features = y_.rows();
    out.dict = dict_;
    out.analysis = analysis_;
    if (kernel_) out.y_train = y_;
    out.ocsvm = svm_;
    out.alpha_weights = alpha_;
    out.trimmed = trimmed_;
    out.trace = trace_;
    if (diag != nullptr) {
      diag->codes = x_;
      diag->support = support_;
      diag->rejected_updates = rejected_;
      diag->saddle_unconverged = unconverged_;
    }
    return out;
  }

 private:
  void Initialize(TrainDiagnostics* diag) {
    const int n = hp_.n_atoms;
    const Eigen::Index big_n = y_.cols();
    sparse::SparseCodes codes;
    if (kernel_) {
      gram_ = kernel::Gram(y_, hp_.kernel);
      dict_ = InitKernelDictionary(gram_.k, n, hp_.seed);
      const Matrix ak = dict_.transpose() * gram_.k;
      codes = sparse::OmpGram(ak, ak * dict_, hp_.sparsity);
    } else {
      dict_ = InitDictionary(y_.rows(), n, hp_.seed);
      codes = sparse::Omp(y_, dict_, hp_.sparsity);
    }
    support_ = codes.support;
    x_ = codes.x;
    if (diag != nullptr) diag->initial_codes = codes;

    const Matrix& basis = kernel_ ? gram_.k : y_;
    if (pair_) {
      alpha_ = AlphaWeights(support_);
      l1_ = hp_.gamma * alpha_;
      analysis_ = kernel_ ? Matrix(x_ * gram_.kpinv)
                          : Matrix(x_ * numerics::PseudoInverse(y_));
      x_ = analysis_ * basis;
    } else {
      l1_ = Vector::Zero(n);
    }

    trimmed_.assign(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      const bool unused = !support_.row(i).any();
      if (unused || (pair_ && x_.row(i).norm() < hp_.trim_tol)) {
        if (pair_) {
          analysis_.row(i).setZero();
          x_.row(i).setZero();
        }
        if (unused) trimmed_[static_cast<size_t>(i)] = 1;
      }
    }

    if (kernel_) {
      residual_ = Residual(Matrix::Identity(big_n, big_n) - dict_ * x_, &gram_.k);
    } else {
      residual_ = Residual(y_ - dict_ * x_, nullptr);
    }
    fit_ = residual_.Fit();
    svm_ = svm::Fit(x_, hp_.nu, std::nullopt, SvmOptions());
    t_ = x_.transpose() * svm_.omega;
  }

  svm::FitOptions SvmOptions() const {
    svm::FitOptions o;
    o.tol = hp_.ocsvm_tol;
    return o;
  }

  double Penalty() const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
      acc += hp_.beta * x_.row(i).norm() + l1_(i) * x_.row(i).lpNorm<1>();
    }
    return acc;
  }

  void Record(int outer, int inner) {
    LossRecord rec;
    rec.outer = outer;
    rec.inner = inner;
    rec.f = fit_ + Penalty();
    rec.g = OcsvmTerm(svm_, t_);
    rec.total = rec.f + rec.g;
    trace_.push_back(rec);
  }

  void Refit() {
    svm_ = svm::Fit(x_, hp_.nu, svm_.lambda, SvmOptions());
    t_ = x_.transpose() * svm_.omega;
    fit_ = residual_.Fit();
  }

  void UpdateAtom(int i) {
    const auto iu = static_cast<size_t>(i);
    if (trimmed_[iu]) return;
    const Eigen::Index big_n = y_.cols();
    std::vector<Eigen::Index> cols = SupportColumns(support_, i);
    if (cols.empty()) return;
    // x = pY is dense, so a support-restricted pair update would change
    // codes on columns its objective never sees.
    if (pair_ && !hp_.restrict_pair_updates) {
      cols.resize(static_cast<size_t>(big_n));
      std::iota(cols.begin(), cols.end(), Eigen::Index{0});
    }
    const auto k = static_cast<Eigen::Index>(cols.size());

    const Vector atom_old = dict_.col(i);
    const RowVector x_old = x_.row(i);
    atoms::CoupledRow coup;
    coup.w = svm_.omega(i);
    coup.lambda.resize(k);
    coup.beta = hp_.beta;
    coup.alpha = l1_(i);
    Matrix r(residual_.e().rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
      coup.lambda(c) = svm_.lambda(cols[c]);
      r.col(c) = residual_.e().col(cols[c]) + atom_old * x_old(cols[c]);
    }
    atoms::TrsOptions trs;
    trs.method = hp_.trs;

    Vector atom_new;
    RowVector x_new = RowVector::Zero(big_n);
    RowVector analysis_new;
    bool zero = false;
    switch (hp_.variant) {
      case Variant::kDl:
      case Variant::kKdl: {
        const atoms::PairUpdate upd =
            hp_.variant == Variant::kDl
                ? atoms::UpdatePairDl(r, coup, atom_old, trs)
                : atoms::UpdatePairKdl(r, gram_.k, gram_.ksqrt, gram_.kinvsqrt,
                                       coup, atom_old, trs);
        atom_new = upd.atom;
        for (Eigen::Index c = 0; c < k; ++c) x_new(cols[c]) = upd.row(c);
        zero = upd.zeroed;
        break;
      }
      case Variant::kDpl:
      case Variant::kKdpl: {
        const RowVector prev = analysis_.row(i);
        const Matrix& basis = hp_.variant == Variant::kDpl ? y_ : gram_.k;
        const bool full = k == big_n;
        const Matrix sub = full ? basis : Columns(basis, cols);
        if (full && !row_space_) row_space_ = atoms::MakeRowSpace(basis);
        const atoms::RowSpace* space = full ? &*row_space_ : nullptr;
        const atoms::DplUpdate upd =
            hp_.variant == Variant::kDpl
                ? atoms::UpdatePairDpl(r, sub, coup, atom_old, {}, trs, &prev,
                                       space)
                : atoms::UpdatePairKdpl(r, sub, gram_.ksqrt, gram_.kinvsqrt,
                                        coup, atom_old, {}, trs, &prev, space);
        if (!upd.converged && !upd.kept_previous) ++unconverged_;
        atom_new = upd.atom;
        analysis_new = upd.analysis;
        x_new = analysis_new * basis;
        if (x_new.norm() < hp_.trim_tol) {
          zero = true;
          atom_new = atom_old;
          analysis_new.setZero();
          x_new.setZero();
        }
        break;
      }
    }

    const double d_fit = residual_.FitDelta(atom_old, x_old, atom_new, x_new);
    const double d_pen = hp_.beta * (x_new.norm() - x_old.norm()) +
                         l1_(i) * (x_new.lpNorm<1>() - x_old.lpNorm<1>());
    const Vector t_new = t_ + svm_.omega(i) * (x_new - x_old).transpose();
    const double d_g = OcsvmTerm(svm_, t_new) - OcsvmTerm(svm_, t_);
    if (hp_.descent_guard && d_fit + d_pen + d_g > 0.0) {
      ++rejected_;
      return;
    }

    residual_.Commit(atom_old, x_old, atom_new, x_new);
    fit_ += d_fit;
    t_ = t_new;
    dict_.col(i) = atom_new;
    x_.row(i) = x_new;
    if (pair_) analysis_.row(i) = analysis_new;
    if (zero) {
      trimmed_[iu] = 1;
      support_.row(i).setConstant(false);
    }
  }

  const Matrix& y_;
  Hyperparams hp_;
  bool kernel_ = false;
  bool pair_ = false;
  kernel::GramPack gram_;
  std::optional<atoms::RowSpace> row_space_;  // pinv of the full basis
  Matrix dict_;
  Matrix analysis_;
  Matrix x_;
  sparse::Mask support_;
  std::vector<char> trimmed_;
  Vector alpha_;
  Vector l1_;
  Residual residual_;
  double fit_ = 0.0;
  svm::OcsvmModel svm_;
  Vector t_;
  std::vector<LossRecord> trace_;
  long rejected_ = 0;
  long unconverged_ = 0;
};

Hyperparams Resolve(const Hyperparams& hp, const Matrix& y) {
  Hyperparams out = hp;
  if (out.n_atoms == 0) out.n_atoms = static_cast<int>(2 * y.rows());
  if (IsKernel(out.variant)) out.kernel = kernel::Resolve(out.kernel, y);
  return out;
}

}  // namespace

std::string VariantName(Variant v) {
  switch (v) {
    case Variant::kDl:
      return "dl-ocsvm";
    case Variant::kDpl:
      return "dpl-ocsvm";
    case Variant::kKdl:
      return "kdl-ocsvm";
    case Variant::kKdpl:
      return "kdpl-ocsvm";
  }
  return "unknown";
}

Variant ParseVariant(const std::string& name) {
  for (const Variant v :
       {Variant::kDl, Variant::kDpl, Variant::kKdl, Variant::kKdpl}) {
    if (name == VariantName(v)) return v;
  }
  Fail(ErrorKind::kInvalidArgument,
       "unknown model '" + name +
           "' (expected dl-ocsvm, dpl-ocsvm, kdl-ocsvm or kdpl-ocsvm)");
}

bool IsKernel(Variant v) { return v == Variant::kKdl || v == Variant::kKdpl; }

bool IsPairModel(Variant v) {
  return v == Variant::kDpl || v == Variant::kKdpl;
}

void Validate(const Hyperparams& hp, Eigen::Index m) {
  auto check = [](bool ok, const std::string& what) {
    Require(ok, ErrorKind::kInvalidArgument, what);
  };
  check(hp.n_atoms >= 0, "number of atoms must be positive");
  const long n = hp.n_atoms == 0 ? 2 * m : hp.n_atoms;
  check(hp.sparsity >= 1, "sparsity must be at least 1");
  check(hp.sparsity <= n, "sparsity " + std::to_string(hp.sparsity) +
                              " exceeds the number of atoms " +
                              std::to_string(n));
  if (!IsKernel(hp.variant)) {
    check(hp.sparsity <= m, "sparsity " + std::to_string(hp.sparsity) +
                                " exceeds the feature count " +
                                std::to_string(m));
  }
  check(hp.beta >= 0.0 && std::isfinite(hp.beta), "beta must be >= 0");
  check(hp.gamma >= 0.0 && std::isfinite(hp.gamma), "gamma must be >= 0");
  check(hp.nu > 0.0 && hp.nu <= 1.0, "nu must lie in (0, 1]");
  check(hp.outer_iters >= 1, "outer iterations must be at least 1");
  check(hp.trim_tol >= 0.0, "trim tolerance must be >= 0");
  check(hp.ocsvm_tol > 0.0, "OC-SVM tolerance must be > 0");
  if (hp.kernel.kind == kernel::KernelKind::kPolynomial) {
    check(hp.kernel.degree >= 1, "polynomial degree must be at least 1");
  }
}

Matrix InitDictionary(Eigen::Index m, int n, std::uint64_t seed) {
  Require(n >= 1 && m >= 1, ErrorKind::kInvalidArgument,
          "dictionary needs at least one atom and one feature");
  Rng rng = MakeRng(seed, "dictionary");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix d(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double nrm = 0.0;
    for (int tries = 0; nrm == 0.0; ++tries) {
      Require(tries < kMaxRedraws, ErrorKind::kNumeric,
              "dictionary init: could not draw a nonzero atom");
      for (Eigen::Index i = 0; i < m; ++i) d(i, j) = normal(rng);
      nrm = d.col(j).norm();
    }
    d.col(j) /= nrm;
  }
  return d;
}

Matrix InitKernelDictionary(const Matrix& k, int n, std::uint64_t seed) {
  Require(n >= 1 && k.rows() >= 1 && k.rows() == k.cols(),
          ErrorKind::kInvalidArgument,
          "kernel dictionary needs at least one atom and a square K");
  Rng rng = MakeRng(seed, "dictionary");
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index big_n = k.rows();
  Matrix a(big_n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double q = 0.0;
    for (int tries = 0; q <= 1e-14; ++tries) {
      Require(tries < kMaxRedraws, ErrorKind::kNumeric,
              "kernel dictionary init: a^T K a stayed below 1e-14 after " +
                  std::to_string(kMaxRedraws) + " draws");
      for (Eigen::Index i = 0; i < big_n; ++i) a(i, j) = normal(rng);
      q = a.col(j).dot(k * a.col(j));
    }
    a.col(j) /= std::sqrt(q);
  }
  return a;
}

Vector AlphaWeights(const sparse::Mask& support) {
  Vector counts(support.rows());
  for (Eigen::Index i = 0; i < support.rows(); ++i) {
    counts(i) = static_cast<double>(support.row(i).count());
  }
  const double nrm = counts.norm();
  return nrm > 0.0 ? Vector(counts / nrm) : counts;
}

TrainedModel Train(const Matrix& y, const Hyperparams& hp,
                   TrainDiagnostics* diag) {
  Require(y.rows() >= 1 && y.cols() >= 1, ErrorKind::kDimension,
          "training data is empty");
  Require(y.allFinite(), ErrorKind::kInvalidArgument,
          "training data has non-finite entries");
  Validate(hp, y.rows());
  const Hyperparams resolved = Resolve(hp, y);
  Trainer trainer(y, resolved);
  return trainer.Run(diag);
}

Detection Detect(const TrainedModel& model, const Matrix& y_test) {
  const Hyperparams& hp = model.hp;
  Require(y_test.rows() == model.features, ErrorKind::kDimension,
          "model expects " + std::to_string(model.features) +
              " features, data has " + std::to_string(y_test.rows()));
  Require(y_test.allFinite(), ErrorKind::kInvalidArgument,
          "test data has non-finite entries");
  const Eigen::Index n = model.dict.cols();
  Detection out;

  auto zero_row = [&out](Eigen::Index i) {
    out.codes.x.row(i).setZero();
    out.codes.support.row(i).setConstant(false);
  };

  if (!IsKernel(hp.variant)) {
    const Matrix& d = model.dict;
    out.codes = sparse::Omp(y_test, d, hp.sparsity);
    if (hp.variant == Variant::kDl) {
      Matrix e = y_test - d * out.codes.x;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto cols = SupportColumns(out.codes.support, i);
        if (cols.empty()) continue;
        Matrix r = Columns(e, cols);
        for (size_t c = 0; c < cols.size(); ++c) {
          r.col(static_cast<Eigen::Index>(c)) += d.col(i) * out.codes.x(i, cols[c]);
        }
        const double score = hp.fixed_atom_trim
                                 ? (r.transpose() * d.col(i)).norm()
                                 : numerics::TopSingularTriple(r).sigma;
        const bool trim = hp.fixed_atom_trim ? score <= hp.beta : score < hp.beta;
        if (trim) {
          for (size_t c = 0; c < cols.size(); ++c) {
            e.col(cols[c]) = r.col(static_cast<Eigen::Index>(c));
          }
          zero_row(i);
        }
      }
    } else {
      const Matrix py = model.analysis * y_test;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (py.row(i).norm() < hp.trim_tol) zero_row(i);
      }
    }
  } else {
    const kernel::GramPack gram = kernel::Gram(model.y_train, hp.kernel);
    const Matrix kt = kernel::CrossGram(model.y_train, y_test, hp.kernel);
    const Matrix& a = model.dict;
    out.codes = sparse::OmpGram(a.transpose() * kt,
                                a.transpose() * gram.k * a, hp.sparsity);
    if (hp.variant == Variant::kKdl) {
      Matrix e = gram.kpinv * kt - a * out.codes.x;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto cols = SupportColumns(out.codes.support, i);
        if (cols.empty()) continue;
        Matrix r = Columns(e, cols);
        for (size_t c = 0; c < cols.size(); ++c) {
          r.col(static_cast<Eigen::Index>(c)) += a.col(i) * out.codes.x(i, cols[c]);
        }
        const double score =
            hp.fixed_atom_trim
                ? (r.transpose() * (gram.k * a.col(i))).norm()
                : numerics::TopSingularTriple(gram.ksqrt * r).sigma;
        const bool trim = hp.fixed_atom_trim ? score <= hp.beta : score < hp.beta;
        if (trim) {
          for (size_t c = 0; c < cols.size(); ++c) {
            e.col(cols[c]) = r.col(static_cast<Eigen::Index>(c));
          }
          zero_row(i);
        }
      }
    } else {
      const Matrix bk = model.analysis * kt;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (bk.row(i).norm() < hp.trim_tol) zero_row(i);
      }
    }
  }

  out.scores = svm::DecisionBatch(model.ocsvm, out.codes.x);
  for (Eigen::Index j = 0; j < out.scores.size(); ++j) {
    if (out.scores(j) <= 0.0) out.anomalies.push_back(static_cast<int>(j));
  }
  return out;
}

LossParts TotalLoss(const LossState& s) {
  Require(s.data != nullptr && s.dict != nullptr && s.codes != nullptr,
          ErrorKind::kInvalidArgument, "total loss: incomplete state");
  const Matrix& x = *s.codes;
  double fit = 0.0;
  if (IsKernel(s.variant)) {
    const Matrix& k = *s.data;
    const Matrix e = Matrix::Identity(k.rows(), k.cols()) - *s.dict * x;
    fit = 0.5 * (e.cwiseProduct(k * e)).sum();
  } else {
    fit = 0.5 * (*s.data - *s.dict * x).squaredNorm();
  }
  double pen = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    pen += s.beta * x.row(i).norm();
    if (s.l1.size() > 0) pen += s.l1(i) * x.row(i).lpNorm<1>();
  }
  LossParts out;
  out.f = fit + pen;
  out.g = svm::PrimalObjective(x, s.omega, s.rho, s.nu);
  out.total = out.f + out.g;
  return out;
}

}  // namespace dlsvm::model
