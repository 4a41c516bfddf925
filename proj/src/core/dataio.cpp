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

#include "dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace dlsvm::data {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    out.push_back(Trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string Where(const std::string& source, size_t line, size_t col) {
  return source + ": row " + std::to_string(line) + ", column " +
         std::to_string(col + 1);
}

double ParseCell(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  Require(!cell.empty() && res.ec == std::errc() && res.ptr == last &&
              std::isfinite(v),
          ErrorKind::kParse,
          where + ": cannot parse '" + cell + "' as a finite real");
  return v;
}

}  // namespace

Dataset ParseCsv(const std::string& text, const std::string& label_column,
                 bool has_header, const std::string& source) {
  Require(label_column.empty() || has_header, ErrorKind::kInvalidArgument,
          "a label column can only be selected by name when the file has a "
          "header");
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  std::vector<std::string> header;
  int label_idx = -1;
  size_t arity = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = SplitFields(line);
    if (has_header && header.empty()) {
      header = std::move(fields);
      arity = header.size();
      if (!label_column.empty()) {
        const auto it = std::find(header.begin(), header.end(), label_column);
        Require(it != header.end(), ErrorKind::kParse,
                source + ": label column '" + label_column +
                    "' not found in header");
        label_idx = static_cast<int>(it - header.begin());
      }
      continue;
    }
    if (arity == 0) arity = fields.size();
    Require(fields.size() == arity, ErrorKind::kParse,
            source + ": row " + std::to_string(line_no) + " has " +
                std::to_string(fields.size()) + " fields, expected " +
                std::to_string(arity));
    std::vector<double> row;
    row.reserve(arity);
    for (size_t c = 0; c < fields.size(); ++c) {
      const double v = ParseCell(fields[c], Where(source, line_no, c));
      if (static_cast<int>(c) == label_idx) {
        Require(v == 0.0 || v == 1.0, ErrorKind::kParse,
                Where(source, line_no, c) + ": label '" + fields[c] +
                    "' is not 0 or 1");
        labels.push_back(static_cast<int>(v));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }

  Require(!rows.empty(), ErrorKind::kParse, source + ": no data rows");
  const size_t m = rows.front().size();
  Require(m >= 1, ErrorKind::kParse, source + ": no feature columns");

  Dataset out;
  out.y.resize(static_cast<Eigen::Index>(m),
               static_cast<Eigen::Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j) {
    for (size_t i = 0; i < m; ++i) {
      out.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[j][i];
    }
  }
  out.labels = std::move(labels);
  for (size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) != label_idx) out.feature_names.push_back(header[c]);
  }
  return out;
}

Dataset LoadCsv(const std::string& path, const std::string& label_column,
                bool has_header) {
  std::ifstream file(path, std::ios::binary);
  Require(file.good(), ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return ParseCsv(buf.str(), label_column, has_header, path);
}

Matrix Standardizer::Apply(const Matrix& y) const {
  Require(y.rows() == means.size(), ErrorKind::kDimension,
          "standardizer fitted on " + std::to_string(means.size()) +
              " features applied to " + std::to_string(y.rows()));
  Matrix z = y.colwise() - means;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (stds(i) > 0.0) z.row(i) /= stds(i);
  }
  return z;
}

Matrix Standardizer::Invert(const Matrix& z) const {
  Require(z.rows() == means.size(), ErrorKind::kDimension,
          "standardizer fitted on " + std::to_string(means.size()) +
              " features inverted on " + std::to_string(z.rows()));
  Matrix y = z;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    if (stds(i) > 0.0) y.row(i) *= stds(i);
  }
  return y.colwise() + means;
}

std::pair<Matrix, Standardizer> Standardize(const Matrix& y) {
  Require(y.cols() >= 2, ErrorKind::kInvalidArgument,
          "standardize needs at least two samples");
  Standardizer s;
  s.means = y.rowwise().mean();
  const Matrix centered = y.colwise() - s.means;
  s.stds = (centered.rowwise().squaredNorm() / static_cast<double>(y.cols()))
               .cwiseSqrt();
  for (Eigen::Index i = 0; i < s.stds.size(); ++i) {
    if (s.stds(i) < 1e-12) s.stds(i) = 0.0;
  }
  Matrix z = s.Apply(y);
  return {std::move(z), std::move(s)};
}

Dataset Subset(const Dataset& d, const std::vector<int>& indices) {
  Dataset out;
  out.feature_names = d.feature_names;
  out.y.resize(d.y.rows(), static_cast<Eigen::Index>(indices.size()));
  for (size_t j = 0; j < indices.size(); ++j) {
    Require(indices[j] >= 0 && indices[j] < d.y.cols(),
            ErrorKind::kInvalidArgument, "subset index out of range");
    out.y.col(static_cast<Eigen::Index>(j)) = d.y.col(indices[j]);
    if (d.has_labels()) out.labels.push_back(d.labels[indices[j]]);
  }
  return out;
}

std::vector<Split> KFoldSplit(int n, int k, std::uint64_t seed) {
  Require(k >= 2 && k <= n, ErrorKind::kInvalidArgument,
          "kfold needs 2 <= k <= N, got k = " + std::to_string(k) +
              ", N = " + std::to_string(n));
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = MakeRng(seed, "kfold");
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<Split> folds;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = n / k + (f < n % k ? 1 : 0);
    std::vector<int> valid(perm.begin() + pos, perm.begin() + pos + size);
    std::vector<int> train;
    train.reserve(static_cast<size_t>(n - size));
    train.insert(train.end(), perm.begin(), perm.begin() + pos);
    train.insert(train.end(), perm.begin() + pos + size, perm.end());
    std::sort(valid.begin(), valid.end());
    std::sort(train.begin(), train.end());
    folds.emplace_back(std::move(train), std::move(valid));
    pos += size;
  }
  return folds;
}

Split StratifiedHoldout(const std::vector<int>& labels, double test_frac,
                        std::uint64_t seed) {
  Require(test_frac > 0.0 && test_frac < 1.0, ErrorKind::kInvalidArgument,
          "test fraction must lie in (0, 1)");
  Rng rng = MakeRng(seed, "holdout");
  Split out;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> members;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(static_cast<int>(i));
    }
    std::shuffle(members.begin(), members.end(), rng);
    size_t n_test = static_cast<size_t>(
        std::llround(test_frac * static_cast<double>(members.size())));
    if (members.size() >= 2) {
      n_test = std::clamp<size_t>(n_test, 1, members.size() - 1);
    }
    out.second.insert(out.second.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.first.insert(out.first.end(),
                     members.begin() + static_cast<std::ptrdiff_t>(n_test),
                     members.end());
  }
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

}  // namespace dlsvm::data
