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
#include <string>
#include <vector>

#include "dataio.hpp"
#include "models.hpp"

namespace dlsvm::eval {

struct Confusion {
  long tp = 0;
  long fn = 0;
  long tn = 0;
  long fp = 0;
};

struct EvalReport {
  bool valid = true;  // false: training failed or BA undefined
  std::string error;
  double ba = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  Confusion confusion;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  model::Hyperparams config;
  int outliers_used = -1;  // contamination sweep only
};

/// labels and predicted hold 0 (inlier) / 1 (outlier). Throws when labels
/// contain a single class.
EvalReport BalancedAccuracy(const std::vector<int>& labels,
                            const std::vector<int>& predicted);

/// 0/1 prediction vector of length n from anomaly indices.
std::vector<int> ToPredictions(int n, const std::vector<int>& anomalies);

// Empty axes keep the base value.
struct GridSpec {
  std::vector<double> betas;
  std::vector<double> gammas;
  std::vector<double> nus;
  std::vector<kernel::KernelSpec> kernels;  // empty: keep the base kernel
  std::vector<std::uint64_t> seeds;
};

/// Default dictionary seeds: 20 values derived from a master seed.
std::vector<std::uint64_t> DefaultSeeds(std::uint64_t master, int count = 20);

/// Cartesian product in a fixed order: kernel, beta, gamma, nu, seed
/// (seed varies fastest).
std::vector<model::Hyperparams> Expand(const model::Hyperparams& base,
                                       const GridSpec& grid);

struct RunOptions {
  int jobs = 1;
  bool standardize = false;
};

/// Jobs from the DLSVM_JOBS environment variable, 1 when unset or invalid.
int DefaultJobs();

/// Train on `train`, detect on `test`, score against test labels. Training
/// errors are caught and reported as invalid.
EvalReport TrainAndEvaluate(const data::Dataset& train,
                            const data::Dataset& test,
                            const model::Hyperparams& hp, bool standardize);

struct GridResult {
  std::vector<EvalReport> all;  // one per expanded configuration
  int best = -1;                // earliest maximal BA, -1 if none valid
};

/// Full-data scenario: every configuration trains and detects on all data.
GridResult GridSearch(const data::Dataset& data, const model::Hyperparams& base,
                      const GridSpec& grid, const RunOptions& opts);

struct KFoldResult {
  EvalReport test;
  std::vector<double> mean_fold_ba;  // per configuration, NaN if no fold
  int chosen = -1;
  data::Split holdout;  // (validation, test) indices
};

/// Stratified holdout of test_frac, k-fold selection on the rest by mean BA,
/// retrain on the whole validation set, report on the test split.
KFoldResult KFoldEval(const data::Dataset& data, const model::Hyperparams& base,
                      const GridSpec& grid, int k, double test_frac,
                      std::uint64_t seed, const RunOptions& opts);

/// Train and detect on all inliers plus the first c outliers of a seeded
/// permutation, for every requested c.
std::vector<EvalReport> ContaminationSweep(const data::Dataset& data,
                                           const model::Hyperparams& hp,
                                           const std::vector<int>& counts,
                                           std::uint64_t seed,
                                           const RunOptions& opts);

/// One tab-separated key=value line per report.
std::string FormatLines(const std::vector<EvalReport>& reports);
/// Fixed-width table for humans.
std::string FormatTable(const std::vector<EvalReport>& reports);
/// Short description of the varied hyperparameters.
std::string DescribeConfig(const model::Hyperparams& hp);

}  // namespace dlsvm::eval
