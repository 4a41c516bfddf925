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

#include "eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"

namespace dlsvm::eval {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads. fn must not throw.
template <typename Fn>
void ParallelFor(int count, int jobs, Fn fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

bool BothClasses(const std::vector<int>& labels) {
  const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  return pos && neg;
}

int BestIndex(const std::vector<EvalReport>& reports) {
  int best = -1;
  for (size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].valid) continue;
    if (best < 0 || reports[i].ba > reports[static_cast<size_t>(best)].ba) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::string Num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

EvalReport BalancedAccuracy(const std::vector<int>& labels,
                            const std::vector<int>& predicted) {
  Require(labels.size() == predicted.size(), ErrorKind::kDimension,
          "balanced accuracy: " + std::to_string(labels.size()) +
              " labels but " + std::to_string(predicted.size()) +
              " predictions");
  EvalReport r;
  for (size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    const int p = predicted[i];
    Require((l == 0 || l == 1) && (p == 0 || p == 1),
            ErrorKind::kInvalidArgument,
            "balanced accuracy: labels and predictions must be 0 or 1");
    if (l == 1) {
      (p == 1 ? r.confusion.tp : r.confusion.fn)++;
    } else {
      (p == 0 ? r.confusion.tn : r.confusion.fp)++;
    }
  }
  const long pos = r.confusion.tp + r.confusion.fn;
  const long neg = r.confusion.tn + r.confusion.fp;
  Require(pos > 0 && neg > 0, ErrorKind::kInvalidArgument,
          "balanced accuracy is undefined: labels contain a single class");
  r.tpr = static_cast<double>(r.confusion.tp) / static_cast<double>(pos);
  r.tnr = static_cast<double>(r.confusion.tn) / static_cast<double>(neg);
  r.ba = 0.5 * (r.tpr + r.tnr);
  return r;
}

std::vector<int> ToPredictions(int n, const std::vector<int>& anomalies) {
  std::vector<int> out(static_cast<size_t>(n), 0);
  for (const int a : anomalies) {
    Require(a >= 0 && a < n, ErrorKind::kInvalidArgument,
            "anomaly index out of range");
    out[static_cast<size_t>(a)] = 1;
  }
  return out;
}

std::vector<std::uint64_t> DefaultSeeds(std::uint64_t master, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) {
    seeds.push_back(SubstreamSeed(master, "grid-seed-" + std::to_string(i)));
  }
  return seeds;
}

std::vector<model::Hyperparams> Expand(const model::Hyperparams& base,
                                       const GridSpec& grid) {
  const std::vector<kernel::KernelSpec> kernels =
      grid.kernels.empty() ? std::vector<kernel::KernelSpec>{base.kernel}
                           : grid.kernels;
  const std::vector<double> betas =
      grid.betas.empty() ? std::vector<double>{base.beta} : grid.betas;
  const std::vector<double> gammas =
      grid.gammas.empty() ? std::vector<double>{base.gamma} : grid.gammas;
  const std::vector<double> nus =
      grid.nus.empty() ? std::vector<double>{base.nu} : grid.nus;
  const std::vector<std::uint64_t> seeds =
      grid.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : grid.seeds;
  std::vector<model::Hyperparams> out;
  for (const auto& k : kernels) {
    for (const double b : betas) {
      for (const double g : gammas) {
        for (const double nu : nus) {
          for (const std::uint64_t s : seeds) {
            model::Hyperparams hp = base;
            hp.kernel = k;
            hp.beta = b;
            hp.gamma = g;
            hp.nu = nu;
            hp.seed = s;
            out.push_back(hp);
          }
        }
      }
    }
  }
  return out;
}

int DefaultJobs() {
  const char* env = std::getenv("DLSVM_JOBS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(std::min<long>(v, 1024));
}

EvalReport TrainAndEvaluate(const data::Dataset& train,
                            const data::Dataset& test,
                            const model::Hyperparams& hp, bool standardize) {
  EvalReport report;
  report.config = hp;
  try {
    Require(test.has_labels(), ErrorKind::kInvalidArgument,
            "evaluation needs labeled test data");
    Eigen::MatrixXd y_train = train.y;
    Eigen::MatrixXd y_test = test.y;
    if (standardize) {
      auto [z, s] = data::Standardize(train.y);
      y_train = std::move(z);
      y_test = s.Apply(test.y);
    }
    const auto t0 = Clock::now();
    const model::TrainedModel m = model::Train(y_train, hp);
    const auto t1 = Clock::now();
    const model::Detection det = model::Detect(m, y_test);
    const auto t2 = Clock::now();
    EvalReport scored = BalancedAccuracy(
        test.labels,
        ToPredictions(static_cast<int>(y_test.cols()), det.anomalies));
    scored.config = m.hp;
    scored.train_seconds = Seconds(t0, t1);
    scored.test_seconds = Seconds(t1, t2);
    report = scored;
  } catch (const std::exception& e) {
    report.valid = false;
    report.error = e.what();
  }
  return report;
}

GridResult GridSearch(const data::Dataset& data, const model::Hyperparams& base,
                      const GridSpec& grid, const RunOptions& opts) {
  Require(data.has_labels(), ErrorKind::kInvalidArgument,
          "grid search needs a labeled dataset");
  Require(BothClasses(data.labels), ErrorKind::kInvalidArgument,
          "grid search needs both inliers and outliers in the labels");
  const std::vector<model::Hyperparams> configs = Expand(base, grid);
  GridResult out;
  out.all.resize(configs.size());
  ParallelFor(static_cast<int>(configs.size()), opts.jobs, [&](int i) {
    out.all[static_cast<size_t>(i)] =
        TrainAndEvaluate(data, data, configs[static_cast<size_t>(i)],
                         opts.standardize);
  });
  for (const EvalReport& r : out.all) {
    if (!r.valid) Warn("grid cell failed: " + DescribeConfig(r.config) + ": " + r.error);
  }
  out.best = BestIndex(out.all);
  return out;
}

KFoldResult KFoldEval(const data::Dataset& data, const model::Hyperparams& base,
                      const GridSpec& grid, int k, double test_frac,
                      std::uint64_t seed, const RunOptions& opts) {
  Require(data.has_labels(), ErrorKind::kInvalidArgument,
          "kfold evaluation needs a labeled dataset");
  Require(k >= 2, ErrorKind::kInvalidArgument, "kfold needs k >= 2");
  KFoldResult out;
  out.holdout = data::StratifiedHoldout(data.labels, test_frac, seed);
  const data::Dataset valid = data::Subset(data, out.holdout.first);
  const data::Dataset test = data::Subset(data, out.holdout.second);
  const std::vector<data::Split> folds =
      data::KFoldSplit(static_cast<int>(valid.samples()), k, seed);

  std::vector<data::Dataset> fold_train;
  std::vector<data::Dataset> fold_valid;
  std::vector<char> fold_ok;
  for (size_t f = 0; f < folds.size(); ++f) {
    fold_train.push_back(data::Subset(valid, folds[f].first));
    fold_valid.push_back(data::Subset(valid, folds[f].second));
    const bool ok = BothClasses(fold_valid.back().labels);
    if (!ok) Warn("fold " + std::to_string(f) + " has a single class, skipped");
    fold_ok.push_back(ok ? 1 : 0);
  }

  const std::vector<model::Hyperparams> configs = Expand(base, grid);
  const int n_folds = static_cast<int>(folds.size());
  const int cells = static_cast<int>(configs.size()) * n_folds;
  std::vector<EvalReport> fold_reports(static_cast<size_t>(cells));
  ParallelFor(cells, opts.jobs, [&](int cell) {
    const auto c = static_cast<size_t>(cell / n_folds);
    const auto f = static_cast<size_t>(cell % n_folds);
    if (!fold_ok[f]) {
      fold_reports[static_cast<size_t>(cell)].valid = false;
      return;
    }
    fold_reports[static_cast<size_t>(cell)] = TrainAndEvaluate(
        fold_train[f], fold_valid[f], configs[c], opts.standardize);
  });

  out.mean_fold_ba.assign(configs.size(),
                          std::numeric_limits<double>::quiet_NaN());
  double best = -1.0;
  for (size_t c = 0; c < configs.size(); ++c) {
    double sum = 0.0;
    int count = 0;
    for (int f = 0; f < n_folds; ++f) {
      const EvalReport& r = fold_reports[c * static_cast<size_t>(n_folds) +
                                         static_cast<size_t>(f)];
      if (r.valid) {
        sum += r.ba;
        ++count;
      }
    }
    if (count == 0) continue;
    out.mean_fold_ba[c] = sum / count;
    if (out.mean_fold_ba[c] > best) {
      best = out.mean_fold_ba[c];
      out.chosen = static_cast<int>(c);
    }
  }
  Require(out.chosen >= 0, ErrorKind::kNumeric,
          "kfold evaluation: no configuration produced a valid fold score");
  out.test = TrainAndEvaluate(valid, test,
                              configs[static_cast<size_t>(out.chosen)],
                              opts.standardize);
  return out;
}

std::vector<EvalReport> ContaminationSweep(const data::Dataset& data,
                                           const model::Hyperparams& hp,
                                           const std::vector<int>& counts,
                                           std::uint64_t seed,
                                           const RunOptions& opts) {
  Require(data.has_labels(), ErrorKind::kInvalidArgument,
          "contamination sweep needs a labeled dataset");
  std::vector<int> inliers;
  std::vector<int> outliers;
  for (size_t i = 0; i < data.labels.size(); ++i) {
    (data.labels[i] == 1 ? outliers : inliers).push_back(static_cast<int>(i));
  }
  Rng rng = MakeRng(seed, "sweep");
  std::shuffle(outliers.begin(), outliers.end(), rng);

  std::vector<EvalReport> out(counts.size());
  ParallelFor(static_cast<int>(counts.size()), opts.jobs, [&](int idx) {
    int c = counts[static_cast<size_t>(idx)];
    EvalReport& r = out[static_cast<size_t>(idx)];
    if (c < 0 || c > static_cast<int>(outliers.size())) {
      const int clamped =
          std::clamp(c, 0, static_cast<int>(outliers.size()));
      Warn("sweep: outlier count " + std::to_string(c) + " clamped to " +
           std::to_string(clamped));
      c = clamped;
    }
    std::vector<int> members = inliers;
    members.insert(members.end(), outliers.begin(), outliers.begin() + c);
    std::sort(members.begin(), members.end());
    const data::Dataset subset = data::Subset(data, members);
    if (c == 0 || inliers.empty()) {
      r.valid = false;
      r.config = hp;
      r.error = "balanced accuracy undefined: single-class training set";
      Warn("sweep: outlier count " + std::to_string(c) +
           " leaves a single class, skipped");
    } else {
      r = TrainAndEvaluate(subset, subset, hp, opts.standardize);
    }
    r.outliers_used = c;
  });
  return out;
}

std::string DescribeConfig(const model::Hyperparams& hp) {
  std::ostringstream os;
  os << "model=" << model::VariantName(hp.variant) << "\tatoms=" << hp.n_atoms
     << "\tsparsity=" << hp.sparsity << "\tbeta=" << Num(hp.beta)
     << "\tgamma=" << Num(hp.gamma) << "\tnu=" << Num(hp.nu);
  if (model::IsKernel(hp.variant)) {
    os << "\tkernel=" << kernel::KernelName(hp.kernel.kind);
    if (hp.kernel.kind == kernel::KernelKind::kRbf) {
      os << "\tsigma=" << Num(hp.kernel.sigma);
    } else if (hp.kernel.kind == kernel::KernelKind::kPolynomial) {
      os << "\tdegree=" << hp.kernel.degree << "\tcoef=" << Num(hp.kernel.coef);
    }
  }
  os << "\tseed=" << hp.seed;
  return os.str();
}

std::string FormatLines(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  for (const EvalReport& r : reports) {
    os << DescribeConfig(r.config);
    if (r.outliers_used >= 0) os << "\toutliers=" << r.outliers_used;
    if (r.valid) {
      os << "\tba=" << Num(r.ba) << "\ttpr=" << Num(r.tpr)
         << "\ttnr=" << Num(r.tnr) << "\ttp=" << r.confusion.tp
         << "\tfn=" << r.confusion.fn << "\ttn=" << r.confusion.tn
         << "\tfp=" << r.confusion.fp << "\ttrain_s=" << Num(r.train_seconds)
         << "\ttest_s=" << Num(r.test_seconds);
    } else {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), '\t', ' ');
      std::replace(err.begin(), err.end(), '\n', ' ');
      os << "\tstatus=failed\terror=" << err;
    }
    os << '\n';
  }
  return os.str();
}

std::string FormatTable(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "model" << std::right << std::setw(8)
     << "beta" << std::setw(8) << "gamma" << std::setw(6) << "nu"
     << std::setw(22) << "seed" << std::setw(9) << "outl" << std::setw(8)
     << "BA" << std::setw(8) << "TPR" << std::setw(8) << "TNR"
     << std::setw(10) << "train_s" << std::setw(10) << "test_s" << '\n';
  os << std::fixed;
  for (const EvalReport& r : reports) {
    const model::Hyperparams& hp = r.config;
    os << std::left << std::setw(12) << model::VariantName(hp.variant)
       << std::right << std::setprecision(3) << std::setw(8) << hp.beta
       << std::setw(8) << hp.gamma << std::setprecision(2) << std::setw(6)
       << hp.nu << std::setw(22) << hp.seed << std::setw(9);
    if (r.outliers_used >= 0) {
      os << r.outliers_used;
    } else {
      os << "-";
    }
    if (r.valid) {
      os << std::setprecision(4) << std::setw(8) << r.ba << std::setw(8)
         << r.tpr << std::setw(8) << r.tnr << std::setprecision(3)
         << std::setw(10) << r.train_seconds << std::setw(10)
         << r.test_seconds << '\n';
    } else {
      os << "  failed: " << r.error << '\n';
    }
  }
  return os.str();
}

}  // namespace dlsvm::eval
