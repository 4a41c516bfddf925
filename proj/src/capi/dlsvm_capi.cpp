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

#include "dlsvm.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dataio.hpp"
#include "errors.hpp"
#include "eval.hpp"
#include "kernelgram.hpp"
#include "model_io.hpp"
#include "models.hpp"

struct dlsvm_dataset {
  dlsvm::data::Dataset data;
};

struct dlsvm_params {
  dlsvm::model::Hyperparams hp;
  dlsvm::eval::GridSpec grid;
  std::vector<double> sigmas;
};

struct dlsvm_model {
  dlsvm::model::TrainedModel model;
  std::string variant;
};

struct dlsvm_detection {
  dlsvm::model::Detection det;
};

struct dlsvm_results {
  std::vector<dlsvm::eval::EvalReport> reports;
  int best = -1;
  std::string lines;
  std::string table;
  std::vector<std::string> line;
};

namespace {

using dlsvm::Error;
using dlsvm::ErrorKind;

thread_local std::string g_last_error;

dlsvm_status StatusOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return DLSVM_INVALID_ARGUMENT;
    case ErrorKind::kDimension:
      return DLSVM_DIMENSION;
    case ErrorKind::kParse:
      return DLSVM_PARSE;
    case ErrorKind::kIo:
      return DLSVM_IO;
    case ErrorKind::kVersion:
      return DLSVM_VERSION;
    case ErrorKind::kNotPsd:
      return DLSVM_NOT_PSD;
    case ErrorKind::kNumeric:
      return DLSVM_NUMERIC;
  }
  return DLSVM_INTERNAL;
}

dlsvm_status Failed(dlsvm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes. Nothing escapes.
template <typename Fn>
dlsvm_status Guard(Fn&& fn) {
  try {
    fn();
    return DLSVM_OK;
  } catch (const Error& e) {
    return Failed(StatusOf(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return Failed(DLSVM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Failed(DLSVM_INTERNAL, e.what());
  } catch (...) {
    return Failed(DLSVM_INTERNAL, "unknown error");
  }
}

void NotNull(const void* p, const char* what) {
  dlsvm::Require(p != nullptr, ErrorKind::kInvalidArgument,
                 std::string(what) + " must not be NULL");
}

int Jobs(int jobs) { return jobs > 0 ? jobs : dlsvm::eval::DefaultJobs(); }

dlsvm::eval::GridSpec GridOf(const dlsvm_params& p) {
  dlsvm::eval::GridSpec g = p.grid;
  for (const double s : p.sigmas) {
    dlsvm::kernel::KernelSpec k;
    k.kind = dlsvm::kernel::KernelKind::kRbf;
    k.sigma = s;
    g.kernels.push_back(k);
  }
  return g;
}

dlsvm_results* MakeResults(std::vector<dlsvm::eval::EvalReport> reports,
                           int best) {
  auto* r = new dlsvm_results;
  r->reports = std::move(reports);
  r->best = best;
  r->lines = dlsvm::eval::FormatLines(r->reports);
  r->table = dlsvm::eval::FormatTable(r->reports);
  for (const auto& rep : r->reports) {
    std::string l = dlsvm::eval::FormatLines({rep});
    if (!l.empty() && l.back() == '\n') l.pop_back();
    r->line.push_back(std::move(l));
  }
  return r;
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  dlsvm::Require(out.good(), ErrorKind::kIo,
                 "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  dlsvm::Require(out.good(), ErrorKind::kIo, "failed writing '" + path + "'");
}

const dlsvm::eval::EvalReport* ReportAt(const dlsvm_results* r, size_t i) {
  if (r == nullptr || i >= r->reports.size()) return nullptr;
  return &r->reports[i];
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

extern "C" {

const char* dlsvm_version(void) { return "1.0.0"; }

const char* dlsvm_last_error(void) { return g_last_error.c_str(); }

const char* dlsvm_status_name(dlsvm_status status) {
  switch (status) {
    case DLSVM_OK:
      return "ok";
    case DLSVM_INVALID_ARGUMENT:
      return "invalid argument";
    case DLSVM_DIMENSION:
      return "dimension mismatch";
    case DLSVM_PARSE:
      return "parse error";
    case DLSVM_IO:
      return "i/o error";
    case DLSVM_VERSION:
      return "version mismatch";
    case DLSVM_NOT_PSD:
      return "matrix not positive semidefinite";
    case DLSVM_NUMERIC:
      return "numerical failure";
    case DLSVM_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void dlsvm_set_log_level(dlsvm_log_level level) {
  dlsvm::SetLogLevel(static_cast<dlsvm::LogLevel>(level));
}

dlsvm_status dlsvm_dataset_load_csv(const char* path, const char* label_column,
                                    int has_header, dlsvm_dataset** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto ds = std::make_unique<dlsvm_dataset>();
    ds->data = dlsvm::data::LoadCsv(path, label_column ? label_column : "",
                                    has_header != 0);
    *out = ds.release();
  });
}

dlsvm_status dlsvm_dataset_from_array(const double* values, size_t features,
                                      size_t samples, const int* labels,
                                      dlsvm_dataset** out) {
  return Guard([&] {
    NotNull(values, "values");
    NotNull(out, "out");
    dlsvm::Require(features >= 1 && samples >= 1, ErrorKind::kDimension,
                   "dataset needs at least one feature and one sample");
    auto ds = std::make_unique<dlsvm_dataset>();
    ds->data.y = Eigen::Map<const Eigen::MatrixXd>(
        values, static_cast<Eigen::Index>(features),
        static_cast<Eigen::Index>(samples));
    dlsvm::Require(ds->data.y.allFinite(), ErrorKind::kInvalidArgument,
                   "dataset values must be finite");
    if (labels != nullptr) {
      for (size_t j = 0; j < samples; ++j) {
        dlsvm::Require(labels[j] == 0 || labels[j] == 1,
                       ErrorKind::kInvalidArgument,
                       "label of sample " + std::to_string(j) +
                           " is not 0 or 1");
        ds->data.labels.push_back(labels[j]);
      }
    }
    *out = ds.release();
  });
}

void dlsvm_dataset_free(dlsvm_dataset* ds) { delete ds; }

size_t dlsvm_dataset_features(const dlsvm_dataset* ds) {
  return ds ? static_cast<size_t>(ds->data.features()) : 0;
}

size_t dlsvm_dataset_samples(const dlsvm_dataset* ds) {
  return ds ? static_cast<size_t>(ds->data.samples()) : 0;
}

int dlsvm_dataset_has_labels(const dlsvm_dataset* ds) {
  return ds && ds->data.has_labels() ? 1 : 0;
}

int dlsvm_dataset_label(const dlsvm_dataset* ds, size_t sample) {
  if (ds == nullptr || sample >= ds->data.labels.size()) return -1;
  return ds->data.labels[sample];
}

dlsvm_status dlsvm_params_create(dlsvm_params** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new dlsvm_params;
  });
}

void dlsvm_params_free(dlsvm_params* p) { delete p; }

dlsvm_status dlsvm_params_set_int(dlsvm_params* p, const char* key,
                                  int64_t value) {
  return Guard([&] {
    NotNull(p, "params");
    NotNull(key, "key");
    const std::string k = key;
    auto as_int = [&] {
      dlsvm::Require(value >= std::numeric_limits<int>::min() &&
                         value <= std::numeric_limits<int>::max(),
                     ErrorKind::kInvalidArgument,
                     k + ": value out of range");
      return static_cast<int>(value);
    };
    if (k == "atoms") {
      p->hp.n_atoms = as_int();
    } else if (k == "sparsity") {
      p->hp.sparsity = as_int();
    } else if (k == "outer_iters") {
      p->hp.outer_iters = as_int();
    } else if (k == "degree") {
      p->hp.kernel.degree = as_int();
    } else if (k == "seed") {
      dlsvm::Require(value >= 0, ErrorKind::kInvalidArgument,
                     "seed must be non-negative");
      p->hp.seed = static_cast<std::uint64_t>(value);
    } else {
      dlsvm::Fail(ErrorKind::kInvalidArgument,
                  "unknown integer parameter '" + k + "'");
    }
  });
}

dlsvm_status dlsvm_params_set_double(dlsvm_params* p, const char* key,
                                     double value) {
  return Guard([&] {
    NotNull(p, "params");
    NotNull(key, "key");
    const std::string k = key;
    dlsvm::Require(std::isfinite(value), ErrorKind::kInvalidArgument,
                   k + " must be finite");
    if (k == "beta") {
      p->hp.beta = value;
    } else if (k == "gamma") {
      p->hp.gamma = value;
    } else if (k == "nu") {
      p->hp.nu = value;
    } else if (k == "sigma") {
      p->hp.kernel.sigma = value;
    } else if (k == "coef") {
      p->hp.kernel.coef = value;
    } else if (k == "trim_tol") {
      p->hp.trim_tol = value;
    } else if (k == "ocsvm_tol") {
      p->hp.ocsvm_tol = value;
    } else {
      dlsvm::Fail(ErrorKind::kInvalidArgument,
                  "unknown real parameter '" + k + "'");
    }
  });
}

dlsvm_status dlsvm_params_set_string(dlsvm_params* p, const char* key,
                                     const char* value) {
  return Guard([&] {
    NotNull(p, "params");
    NotNull(key, "key");
    NotNull(value, "value");
    const std::string k = key;
    if (k == "model") {
      p->hp.variant = dlsvm::model::ParseVariant(value);
    } else if (k == "kernel") {
      p->hp.kernel.kind = dlsvm::kernel::ParseKernel(value);
    } else if (k == "trs") {
      const std::string v = value;
      dlsvm::Require(v == "power" || v == "bidual", ErrorKind::kInvalidArgument,
                     "trs must be 'power' or 'bidual', got '" + v + "'");
      p->hp.trs = v == "bidual" ? dlsvm::atoms::TrsMethod::kBidual
                                : dlsvm::atoms::TrsMethod::kPower;
    } else {
      dlsvm::Fail(ErrorKind::kInvalidArgument,
                  "unknown string parameter '" + k + "'");
    }
  });
}

dlsvm_status dlsvm_params_set_bool(dlsvm_params* p, const char* key,
                                   int value) {
  return Guard([&] {
    NotNull(p, "params");
    NotNull(key, "key");
    const std::string k = key;
    if (k == "fixed_atom_trim") {
      p->hp.fixed_atom_trim = value != 0;
    } else if (k == "descent_guard") {
      p->hp.descent_guard = value != 0;
    } else if (k == "restrict_pair_updates") {
      p->hp.restrict_pair_updates = value != 0;
    } else {
      dlsvm::Fail(ErrorKind::kInvalidArgument,
                  "unknown boolean parameter '" + k + "'");
    }
  });
}

dlsvm_status dlsvm_params_set_grid(dlsvm_params* p, const char* key,
                                   const double* values, size_t n) {
  return Guard([&] {
    NotNull(p, "params");
    NotNull(key, "key");
    if (n > 0) NotNull(values, "values");
    std::vector<double> v(values, values + n);
    for (const double x : v) {
      dlsvm::Require(std::isfinite(x), ErrorKind::kInvalidArgument,
                     "grid values must be finite");
    }
    const std::string k = key;
    if (k == "beta") {
      p->grid.betas = std::move(v);
    } else if (k == "gamma") {
      p->grid.gammas = std::move(v);
    } else if (k == "nu") {
      p->grid.nus = std::move(v);
    } else if (k == "sigma") {
      p->sigmas = std::move(v);
    } else {
      dlsvm::Fail(ErrorKind::kInvalidArgument,
                  "unknown grid axis '" + k + "'");
    }
  });
}

dlsvm_status dlsvm_params_set_grid_seeds(dlsvm_params* p,
                                         const uint64_t* seeds, size_t n) {
  return Guard([&] {
    NotNull(p, "params");
    if (n > 0) NotNull(seeds, "seeds");
    p->grid.seeds.assign(seeds, seeds + n);
  });
}

dlsvm_status dlsvm_params_derive_grid_seeds(dlsvm_params* p, uint64_t master,
                                            int count) {
  return Guard([&] {
    NotNull(p, "params");
    dlsvm::Require(count >= 1, ErrorKind::kInvalidArgument,
                   "seed count must be positive");
    p->grid.seeds = dlsvm::eval::DefaultSeeds(master, count);
  });
}

size_t dlsvm_params_grid_size(const dlsvm_params* p) {
  if (p == nullptr) return 0;
  return dlsvm::eval::Expand(p->hp, GridOf(*p)).size();
}

dlsvm_status dlsvm_train(const dlsvm_dataset* ds, const dlsvm_params* p,
                         int standardize, dlsvm_model** out) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(p, "params");
    NotNull(out, "out");
    auto m = std::make_unique<dlsvm_model>();
    if (standardize != 0) {
      auto [z, s] = dlsvm::data::Standardize(ds->data.y);
      m->model = dlsvm::model::Train(z, p->hp);
      m->model.standardizer = std::move(s);
    } else {
      m->model = dlsvm::model::Train(ds->data.y, p->hp);
    }
    m->variant = dlsvm::model::VariantName(m->model.hp.variant);
    *out = m.release();
  });
}

dlsvm_status dlsvm_model_save(const dlsvm_model* m, const char* path) {
  return Guard([&] {
    NotNull(m, "model");
    NotNull(path, "path");
    dlsvm::model::SaveModel(m->model, path);
  });
}

dlsvm_status dlsvm_model_load(const char* path, dlsvm_model** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto m = std::make_unique<dlsvm_model>();
    m->model = dlsvm::model::LoadModel(path);
    m->variant = dlsvm::model::VariantName(m->model.hp.variant);
    *out = m.release();
  });
}

void dlsvm_model_free(dlsvm_model* m) { delete m; }

const char* dlsvm_model_variant(const dlsvm_model* m) {
  return m ? m->variant.c_str() : "";
}

size_t dlsvm_model_features(const dlsvm_model* m) {
  return m ? static_cast<size_t>(m->model.features) : 0;
}

size_t dlsvm_model_atoms(const dlsvm_model* m) {
  return m ? static_cast<size_t>(m->model.dict.cols()) : 0;
}

size_t dlsvm_model_trace_length(const dlsvm_model* m) {
  return m ? m->model.trace.size() : 0;
}

dlsvm_status dlsvm_model_trace_record(const dlsvm_model* m, size_t index,
                                      double record[5]) {
  return Guard([&] {
    NotNull(m, "model");
    NotNull(record, "record");
    dlsvm::Require(index < m->model.trace.size(), ErrorKind::kInvalidArgument,
                   "trace index out of range");
    const auto& r = m->model.trace[index];
    record[0] = r.outer;
    record[1] = r.inner;
    record[2] = r.f;
    record[3] = r.g;
    record[4] = r.total;
  });
}

dlsvm_status dlsvm_model_write_trace(const dlsvm_model* m, const char* path) {
  return Guard([&] {
    NotNull(m, "model");
    NotNull(path, "path");
    std::ostringstream os;
    os << "# outer inner F G total\n" << std::setprecision(17);
    for (const auto& r : m->model.trace) {
      os << r.outer << ' ' << r.inner << ' ' << r.f << ' ' << r.g << ' '
         << r.total << '\n';
    }
    WriteFile(path, os.str());
  });
}

dlsvm_status dlsvm_detect(const dlsvm_model* m, const dlsvm_dataset* ds,
                          dlsvm_detection** out) {
  return Guard([&] {
    NotNull(m, "model");
    NotNull(ds, "dataset");
    NotNull(out, "out");
    dlsvm::Require(ds->data.features() == m->model.features,
                   ErrorKind::kDimension,
                   "model expects " + std::to_string(m->model.features) +
                       " features, data has " +
                       std::to_string(ds->data.features()));
    auto d = std::make_unique<dlsvm_detection>();
    if (m->model.standardizer) {
      d->det = dlsvm::model::Detect(m->model,
                                    m->model.standardizer->Apply(ds->data.y));
    } else {
      d->det = dlsvm::model::Detect(m->model, ds->data.y);
    }
    *out = d.release();
  });
}

void dlsvm_detection_free(dlsvm_detection* d) { delete d; }

size_t dlsvm_detection_samples(const dlsvm_detection* d) {
  return d ? static_cast<size_t>(d->det.scores.size()) : 0;
}

double dlsvm_detection_score(const dlsvm_detection* d, size_t i) {
  if (d == nullptr || i >= static_cast<size_t>(d->det.scores.size())) {
    return kNaN;
  }
  return d->det.scores(static_cast<Eigen::Index>(i));
}

int dlsvm_detection_is_anomaly(const dlsvm_detection* d, size_t i) {
  if (d == nullptr || i >= static_cast<size_t>(d->det.scores.size())) {
    return -1;
  }
  return d->det.scores(static_cast<Eigen::Index>(i)) <= 0.0 ? 1 : 0;
}

size_t dlsvm_detection_anomaly_count(const dlsvm_detection* d) {
  return d ? d->det.anomalies.size() : 0;
}

dlsvm_status dlsvm_detection_write(const dlsvm_detection* d,
                                   const char* path) {
  return Guard([&] {
    NotNull(d, "detection");
    NotNull(path, "path");
    std::ostringstream os;
    os << std::setprecision(17);
    std::vector<char> flag(static_cast<size_t>(d->det.scores.size()), 0);
    for (const int a : d->det.anomalies) flag[static_cast<size_t>(a)] = 1;
    for (Eigen::Index i = 0; i < d->det.scores.size(); ++i) {
      os << i << ' ' << d->det.scores(i) << ' '
         << (flag[static_cast<size_t>(i)] ? "anomaly" : "normal") << '\n';
    }
    WriteFile(path, os.str());
  });
}

dlsvm_status dlsvm_detection_evaluate(const dlsvm_detection* d,
                                      const dlsvm_dataset* ds, double* ba,
                                      double* tpr, double* tnr) {
  return Guard([&] {
    NotNull(d, "detection");
    NotNull(ds, "dataset");
    dlsvm::Require(ds->data.has_labels(), ErrorKind::kInvalidArgument,
                   "dataset has no labels");
    const int n = static_cast<int>(d->det.scores.size());
    const auto r = dlsvm::eval::BalancedAccuracy(
        ds->data.labels, dlsvm::eval::ToPredictions(n, d->det.anomalies));
    if (ba) *ba = r.ba;
    if (tpr) *tpr = r.tpr;
    if (tnr) *tnr = r.tnr;
  });
}

dlsvm_status dlsvm_grid_search(const dlsvm_dataset* ds, const dlsvm_params* p,
                               int jobs, int standardize,
                               dlsvm_results** out) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(p, "params");
    NotNull(out, "out");
    dlsvm::eval::RunOptions opts{Jobs(jobs), standardize != 0};
    auto res = dlsvm::eval::GridSearch(ds->data, p->hp, GridOf(*p), opts);
    *out = MakeResults(std::move(res.all), res.best);
  });
}

dlsvm_status dlsvm_kfold(const dlsvm_dataset* ds, const dlsvm_params* p, int k,
                         double test_frac, uint64_t seed, int jobs,
                         int standardize, dlsvm_results** out) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(p, "params");
    NotNull(out, "out");
    dlsvm::eval::RunOptions opts{Jobs(jobs), standardize != 0};
    auto res = dlsvm::eval::KFoldEval(ds->data, p->hp, GridOf(*p), k,
                                      test_frac, seed, opts);
    const int best = res.test.valid ? 0 : -1;
    *out = MakeResults({res.test}, best);
  });
}

dlsvm_status dlsvm_sweep(const dlsvm_dataset* ds, const dlsvm_params* p,
                         const int* counts, size_t n_counts, uint64_t seed,
                         int jobs, int standardize, dlsvm_results** out) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(p, "params");
    NotNull(out, "out");
    dlsvm::Require(n_counts >= 1 && counts != nullptr,
                   ErrorKind::kInvalidArgument,
                   "sweep needs at least one outlier count");
    dlsvm::eval::RunOptions opts{Jobs(jobs), standardize != 0};
    auto reports = dlsvm::eval::ContaminationSweep(
        ds->data, p->hp, std::vector<int>(counts, counts + n_counts), seed,
        opts);
    int best = -1;
    for (size_t i = 0; i < reports.size(); ++i) {
      if (reports[i].valid &&
          (best < 0 || reports[i].ba > reports[static_cast<size_t>(best)].ba)) {
        best = static_cast<int>(i);
      }
    }
    *out = MakeResults(std::move(reports), best);
  });
}

void dlsvm_results_free(dlsvm_results* r) { delete r; }

size_t dlsvm_results_count(const dlsvm_results* r) {
  return r ? r->reports.size() : 0;
}

int dlsvm_results_best(const dlsvm_results* r) { return r ? r->best : -1; }

int dlsvm_results_valid(const dlsvm_results* r, size_t i) {
  const auto* rep = ReportAt(r, i);
  return rep && rep->valid ? 1 : 0;
}

double dlsvm_results_ba(const dlsvm_results* r, size_t i) {
  const auto* rep = ReportAt(r, i);
  return rep && rep->valid ? rep->ba : kNaN;
}

double dlsvm_results_tpr(const dlsvm_results* r, size_t i) {
  const auto* rep = ReportAt(r, i);
  return rep && rep->valid ? rep->tpr : kNaN;
}

double dlsvm_results_tnr(const dlsvm_results* r, size_t i) {
  const auto* rep = ReportAt(r, i);
  return rep && rep->valid ? rep->tnr : kNaN;
}

const char* dlsvm_results_lines(const dlsvm_results* r) {
  return r ? r->lines.c_str() : "";
}

const char* dlsvm_results_table(const dlsvm_results* r) {
  return r ? r->table.c_str() : "";
}

const char* dlsvm_results_line(const dlsvm_results* r, size_t i) {
  if (r == nullptr || i >= r->line.size()) return "";
  return r->line[i].c_str();
}

}  // extern "C"
