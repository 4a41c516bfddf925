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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atomupdate.hpp"
#include "dataio.hpp"
#include "kernelgram.hpp"
#include "ocsvm.hpp"
#include "sparse.hpp"

namespace dlsvm::model {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Variant { kDl, kDpl, kKdl, kKdpl };

std::string VariantName(Variant v);
Variant ParseVariant(const std::string& name);
bool IsKernel(Variant v);
bool IsPairModel(Variant v);  // analysis operator present (DPL forms)

struct Hyperparams {
  Variant variant = Variant::kDl;
  int n_atoms = 0;  // 0: twice the feature count
  int sparsity = 3;
  double beta = 0.0;
  double gamma = 0.0;
  double nu = 0.5;
  kernel::KernelSpec kernel;
  int outer_iters = 6;
  double trim_tol = 1e-6;
  std::uint64_t seed = 0;
  double ocsvm_tol = 1e-6;
  atoms::TrsMethod trs = atoms::TrsMethod::kPower;
  // Detection-time trimming for DL: ||R^T d_i|| <= beta instead of the
  // sigma_1 test.
  bool fixed_atom_trim = false;
  // Reject an atom update when it would raise F + G.
  bool descent_guard = true;
  // DPL forms: update each pair on its initial support columns only.
  bool restrict_pair_updates = false;
};

/// Throws kInvalidArgument on out-of-range fields. m is the feature count.
void Validate(const Hyperparams& hp, Eigen::Index m);

struct LossRecord {
  int outer = 0;
  int inner = 0;  // 0: initial fit, 1..n: atom updates, n + 1: refit
  double f = 0.0;
  double g = 0.0;
  double total = 0.0;
};

struct TrainedModel {
  Hyperparams hp;  // resolved: n_atoms and rbf sigma filled in
  Eigen::Index features = 0;
  Matrix dict;      // D (m x n) or A (N x n)
  Matrix analysis;  // P (n x m) or B (n x N); empty for DL forms
  Matrix y_train;   // kernel forms only
  svm::OcsvmModel ocsvm;
  Vector alpha_weights;       // DPL forms
  std::vector<char> trimmed;  // per representation row
  std::vector<LossRecord> trace;
  // Preprocessing applied to the training data, if any. Detect does not apply
  // it; front ends do.
  std::optional<data::Standardizer> standardizer;
};

/// Optional by-products of training.
struct TrainDiagnostics {
  sparse::SparseCodes initial_codes;
  Matrix codes;          // final X
  sparse::Mask support;  // final support
  long rejected_updates = 0;
  long saddle_unconverged = 0;
};

/// Standard dictionary: i.i.d. normal entries, unit columns.
Matrix InitDictionary(Eigen::Index m, int n, std::uint64_t seed);
/// Kernel dictionary: normal coefficients rescaled to a^T K a = 1.
Matrix InitKernelDictionary(const Matrix& k, int n, std::uint64_t seed);

TrainedModel Train(const Matrix& y, const Hyperparams& hp,
                   TrainDiagnostics* diag = nullptr);

struct Detection {
  Vector scores;
  std::vector<int> anomalies;
  sparse::SparseCodes codes;
};

Detection Detect(const TrainedModel& model, const Matrix& y_test);

/// Inputs of the total loss F + G. `data` is Y (standard forms) or K (kernel
/// forms); `dict` is D or A. l1 holds per-row l1 weights (empty for none).
struct LossState {
  Variant variant = Variant::kDl;
  const Matrix* data = nullptr;
  const Matrix* dict = nullptr;
  const Matrix* codes = nullptr;
  double beta = 0.0;
  Vector l1;
  Vector omega;
  double rho = 0.0;
  double nu = 0.5;
};

struct LossParts {
  double f = 0.0;
  double g = 0.0;
  double total = 0.0;
};

LossParts TotalLoss(const LossState& s);

/// alpha_i = count_i / ||count||, count_i = nonzeros of support row i.
Vector AlphaWeights(const sparse::Mask& support);

}  // namespace dlsvm::model
