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
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dlsvm::data {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column-per-sample data. labels, when present, has one 0/1 entry per sample
/// (1 = outlier).
struct Dataset {
  Matrix y;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  bool has_labels() const { return !labels.empty(); }
  Eigen::Index features() const { return y.rows(); }
  Eigen::Index samples() const { return y.cols(); }
};

/// Rows of the file are samples. An empty label_column keeps every column as
/// a feature; naming a column requires has_header.
Dataset LoadCsv(const std::string& path, const std::string& label_column,
                bool has_header);
Dataset ParseCsv(const std::string& text, const std::string& label_column,
                 bool has_header, const std::string& source = "<memory>");

/// Per-feature affine map. std 0 marks a constant feature (centered only).
struct Standardizer {
  Vector means;
  Vector stds;

  Matrix Apply(const Matrix& y) const;
  Matrix Invert(const Matrix& z) const;
};

/// Population moments over the samples. Needs N >= 2.
std::pair<Matrix, Standardizer> Standardize(const Matrix& y);

/// Column subset of a dataset, labels carried along.
Dataset Subset(const Dataset& d, const std::vector<int>& indices);

using Split = std::pair<std::vector<int>, std::vector<int>>;  // train, valid

/// Shuffled partition of 0..n-1 into k folds. The first n % k folds carry one
/// extra index. Each entry is (all other indices, fold indices), both sorted.
std::vector<Split> KFoldSplit(int n, int k, std::uint64_t seed);

/// Stratified holdout: test_frac of each label class (rounded, at least one
/// per class when the class has two or more members) goes to the second set.
Split StratifiedHoldout(const std::vector<int>& labels, double test_frac,
                        std::uint64_t seed);

}  // namespace dlsvm::data
