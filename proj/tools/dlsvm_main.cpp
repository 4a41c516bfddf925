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

// Command-line front end. Links only against the C API in dlsvm.h.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dlsvm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Check(dlsvm_status s, const std::string& context) {
  if (s != DLSVM_OK) {
    throw RuntimeFailure(context + ": " + dlsvm_status_name(s) + ": " +
                         dlsvm_last_error());
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr =
    std::unique_ptr<dlsvm_dataset, Deleter<dlsvm_dataset, dlsvm_dataset_free>>;
using ParamsPtr =
    std::unique_ptr<dlsvm_params, Deleter<dlsvm_params, dlsvm_params_free>>;
using ModelPtr =
    std::unique_ptr<dlsvm_model, Deleter<dlsvm_model, dlsvm_model_free>>;
using DetectionPtr =
    std::unique_ptr<dlsvm_detection,
                    Deleter<dlsvm_detection, dlsvm_detection_free>>;
using ResultsPtr =
    std::unique_ptr<dlsvm_results, Deleter<dlsvm_results, dlsvm_results_free>>;

struct DataFlags {
  std::string path;
  std::string label;  // empty: auto-detect a column named "label"
  bool no_header = false;
  bool standardize = false;
};

struct ModelFlags {
  std::string model = "dl-ocsvm";
  int atoms = 0;
  int sparsity = 3;
  std::optional<double> beta;
  double gamma = 0.0;
  double nu = 0.5;
  int outer_iters = 6;
  std::int64_t seed = 0;
  std::string kernel = "rbf";
  double sigma = 0.0;
  int degree = 2;
  double coef = 1.0;
  std::string trs = "power";
  double trim_tol = 1e-6;
  double ocsvm_tol = 1e-6;
  bool fixed_atom_trim = false;
  bool no_descent_guard = false;
  bool restrict_pair_updates = false;
};

struct GridFlags {
  std::vector<double> betas;
  std::vector<double> gammas;
  std::vector<double> nus;
  std::vector<double> sigmas;
  int seeds = 1;
};

void AddDataFlags(CLI::App* app, DataFlags& f) {
  app->add_option("--data", f.path, "CSV file, one sample per row")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--label", f.label,
                  "label column name (0 inlier, 1 outlier); default: a "
                  "column named 'label' if the header has one");
  app->add_flag("--no-header", f.no_header, "the CSV has no header row");
}

void AddModelFlags(CLI::App* app, ModelFlags& f, bool beta_required) {
  app->add_option("--model", f.model, "dl-ocsvm, dpl-ocsvm, kdl-ocsvm, kdpl-ocsvm")
      ->check(CLI::IsMember({"dl-ocsvm", "dpl-ocsvm", "kdl-ocsvm", "kdpl-ocsvm"}));
  app->add_option("--atoms", f.atoms, "dictionary size (0: twice the features)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--sparsity", f.sparsity, "nonzeros per code")
      ->check(CLI::PositiveNumber);
  auto* beta = app->add_option("--beta", f.beta, "row-sparsity weight")
                   ->check(CLI::NonNegativeNumber);
  if (beta_required) beta->required();
  app->add_option("--gamma", f.gamma, "l1 weight (pair models)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--nu", f.nu, "OC-SVM outlier fraction bound")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--outer-iters", f.outer_iters, "outer iterations")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", f.seed, "master seed")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--kernel", f.kernel, "linear, rbf, polynomial")
      ->check(CLI::IsMember({"linear", "rbf", "polynomial", "poly"}));
  app->add_option("--sigma", f.sigma, "rbf width (0: median heuristic)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--degree", f.degree, "polynomial degree")
      ->check(CLI::PositiveNumber);
  app->add_option("--coef", f.coef, "polynomial offset");
  app->add_option("--trs", f.trs, "trust-region solver: power, bidual")
      ->check(CLI::IsMember({"power", "bidual"}));
  app->add_option("--trim-tol", f.trim_tol, "pair-model trimming threshold")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--ocsvm-tol", f.ocsvm_tol, "OC-SVM duality-gap tolerance")
      ->check(CLI::PositiveNumber);
  app->add_flag("--fixed-atom-trim", f.fixed_atom_trim,
                "DL detection: trim rows with ||R^T d|| <= beta");
  app->add_flag("--no-descent-guard", f.no_descent_guard,
                "accept atom updates that raise the total loss");
  app->add_flag("--restrict-pair-updates", f.restrict_pair_updates,
                "pair models: update on support columns only");
}

void AddGridFlags(CLI::App* app, GridFlags& g) {
  app->add_option("--betas", g.betas, "beta grid")->delimiter(',');
  app->add_option("--gammas", g.gammas, "gamma grid")->delimiter(',');
  app->add_option("--nus", g.nus, "nu grid")->delimiter(',');
  app->add_option("--sigmas", g.sigmas, "rbf sigma grid")->delimiter(',');
  app->add_option("--seeds", g.seeds,
                  "number of dictionary seeds derived from --seed")
      ->check(CLI::PositiveNumber);
}

// Returns the header field list of a CSV file, empty when unreadable.
std::vector<std::string> HeaderFields(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> out;
  if (!std::getline(in, line)) return out;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

DatasetPtr LoadData(const DataFlags& f, bool labels_required) {
  std::string label = f.label;
  if (label.empty() && !f.no_header) {
    for (const std::string& h : HeaderFields(f.path)) {
      if (h == "label") label = h;
    }
  }
  if (labels_required && label.empty()) {
    throw RuntimeFailure(f.path +
                         ": labels required; pass --label or add a 'label' "
                         "column to the header");
  }
  dlsvm_dataset* ds = nullptr;
  Check(dlsvm_dataset_load_csv(f.path.c_str(),
                               label.empty() ? nullptr : label.c_str(),
                               f.no_header ? 0 : 1, &ds),
        "loading data");
  return DatasetPtr(ds);
}

ParamsPtr MakeParams(const ModelFlags& f) {
  dlsvm_params* raw = nullptr;
  Check(dlsvm_params_create(&raw), "params");
  ParamsPtr p(raw);
  const auto ctx = "invalid hyperparameter";
  Check(dlsvm_params_set_string(raw, "model", f.model.c_str()), ctx);
  Check(dlsvm_params_set_int(raw, "atoms", f.atoms), ctx);
  Check(dlsvm_params_set_int(raw, "sparsity", f.sparsity), ctx);
  Check(dlsvm_params_set_double(raw, "beta", f.beta.value_or(0.0)), ctx);
  Check(dlsvm_params_set_double(raw, "gamma", f.gamma), ctx);
  Check(dlsvm_params_set_double(raw, "nu", f.nu), ctx);
  Check(dlsvm_params_set_int(raw, "outer_iters", f.outer_iters), ctx);
  Check(dlsvm_params_set_int(raw, "seed", f.seed), ctx);
  Check(dlsvm_params_set_string(raw, "kernel", f.kernel.c_str()), ctx);
  Check(dlsvm_params_set_double(raw, "sigma", f.sigma), ctx);
  Check(dlsvm_params_set_int(raw, "degree", f.degree), ctx);
  Check(dlsvm_params_set_double(raw, "coef", f.coef), ctx);
  Check(dlsvm_params_set_string(raw, "trs", f.trs.c_str()), ctx);
  Check(dlsvm_params_set_double(raw, "trim_tol", f.trim_tol), ctx);
  Check(dlsvm_params_set_double(raw, "ocsvm_tol", f.ocsvm_tol), ctx);
  Check(dlsvm_params_set_bool(raw, "fixed_atom_trim", f.fixed_atom_trim), ctx);
  Check(dlsvm_params_set_bool(raw, "descent_guard", !f.no_descent_guard), ctx);
  Check(dlsvm_params_set_bool(raw, "restrict_pair_updates",
                              f.restrict_pair_updates),
        ctx);
  return p;
}

void ApplyGrid(dlsvm_params* p, const ModelFlags& m, const GridFlags& g) {
  const auto ctx = "invalid grid";
  Check(dlsvm_params_set_grid(p, "beta", g.betas.data(), g.betas.size()), ctx);
  Check(dlsvm_params_set_grid(p, "gamma", g.gammas.data(), g.gammas.size()),
        ctx);
  Check(dlsvm_params_set_grid(p, "nu", g.nus.data(), g.nus.size()), ctx);
  Check(dlsvm_params_set_grid(p, "sigma", g.sigmas.data(), g.sigmas.size()),
        ctx);
  if (g.seeds > 1) {
    Check(dlsvm_params_derive_grid_seeds(
                    p, static_cast<std::uint64_t>(m.seed), g.seeds), ctx);
  }
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out.good()) throw RuntimeFailure("cannot write '" + path + "'");
}

int CmdTrain(const DataFlags& d, const ModelFlags& m, const std::string& out,
             std::string trace) {
  const DatasetPtr ds = LoadData(d, false);
  const ParamsPtr p = MakeParams(m);
  dlsvm_model* raw = nullptr;
  Check(dlsvm_train(ds.get(), p.get(), d.standardize ? 1 : 0, &raw),
        "training");
  const ModelPtr model(raw);
  Check(dlsvm_model_save(model.get(), out.c_str()), "saving model");
  if (trace.empty()) trace = out + ".trace";
  Check(dlsvm_model_write_trace(model.get(), trace.c_str()), "writing trace");
  double last[5] = {0, 0, 0, 0, 0};
  const size_t n = dlsvm_model_trace_length(model.get());
  if (n > 0) Check(dlsvm_model_trace_record(model.get(), n - 1, last), "trace");
  std::printf("model=%s\tatoms=%zu\tsamples=%zu\tfinal_loss=%.10g\tout=%s\t"
              "trace=%s\n",
              dlsvm_model_variant(model.get()), dlsvm_model_atoms(model.get()),
              dlsvm_dataset_samples(ds.get()), last[4], out.c_str(),
              trace.c_str());
  return kExitOk;
}

int CmdDetect(const DataFlags& d, const std::string& model_path,
              const std::string& out) {
  dlsvm_model* raw = nullptr;
  Check(dlsvm_model_load(model_path.c_str(), &raw), "loading model");
  const ModelPtr model(raw);
  const DatasetPtr ds = LoadData(d, false);
  dlsvm_detection* draw = nullptr;
  Check(dlsvm_detect(model.get(), ds.get(), &draw), "detection");
  const DetectionPtr det(draw);
  Check(dlsvm_detection_write(det.get(), out.c_str()), "writing detections");
  const size_t n = dlsvm_detection_samples(det.get());
  const size_t a = dlsvm_detection_anomaly_count(det.get());
  std::printf("samples=%zu\tanomalies=%zu\tanomaly_fraction=%.6g\tout=%s\n", n,
              a, n ? static_cast<double>(a) / static_cast<double>(n) : 0.0,
              out.c_str());
  if (dlsvm_dataset_has_labels(ds.get())) {
    double ba = 0, tpr = 0, tnr = 0;
    Check(dlsvm_detection_evaluate(det.get(), ds.get(), &ba, &tpr, &tnr),
          "evaluation");
    std::ostringstream block;
    block << "# ba=" << ba << "\ttpr=" << tpr << "\ttnr=" << tnr << '\n';
    std::ofstream app(out, std::ios::app);
    app << block.str();
    if (!app.good()) throw RuntimeFailure("cannot append to '" + out + "'");
    std::printf("ba=%.6g\ttpr=%.6g\ttnr=%.6g\n", ba, tpr, tnr);
  }
  return kExitOk;
}

void Report(const dlsvm_results* r, const std::string& out, bool table) {
  WriteText(out, dlsvm_results_lines(r));
  if (table) std::fputs(dlsvm_results_table(r), stdout);
  const int best = dlsvm_results_best(r);
  if (best < 0) throw RuntimeFailure("no configuration produced a valid score");
  std::printf("best\t%s\n", dlsvm_results_line(r, static_cast<size_t>(best)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dictionary learning with one-class SVM anomaly detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dlsvm_version()));
  int verbosity = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbosity, "progress messages");
  app.add_flag("-q,--quiet", quiet, "suppress warnings");

  DataFlags data;
  ModelFlags model;
  GridFlags grid;
  std::string out;
  std::string trace;
  std::string model_path;
  int jobs = 0;
  int k = 5;
  double test_frac = 0.2;
  std::vector<int> outliers;
  bool table = false;

  CLI::App* train = app.add_subcommand("train", "train a model");
  AddDataFlags(train, data);
  AddModelFlags(train, model, true);
  train->add_flag("--standardize", data.standardize,
                  "scale features to zero mean, unit variance");
  train->add_option("--out", out, "model file")->required();
  train->add_option("--trace", trace, "loss trace file (default: <out>.trace)");

  CLI::App* detect = app.add_subcommand("detect", "score data with a model");
  AddDataFlags(detect, data);
  detect->add_option("--in", model_path, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  detect->add_option("--out", out, "detection file")->required();

  CLI::App* gridc = app.add_subcommand("grid", "full-data grid search");
  CLI::App* kfold = app.add_subcommand("kfold", "holdout plus k-fold selection");
  CLI::App* sweep = app.add_subcommand("sweep", "contamination sweep");
  for (CLI::App* sub : {gridc, kfold, sweep}) {
    AddDataFlags(sub, data);
    AddModelFlags(sub, model, sub == sweep);
    sub->add_flag("--standardize", data.standardize,
                  "scale features per training set");
    sub->add_option("--out", out, "result file, one line per cell")
        ->required();
    sub->add_option("--jobs", jobs, "worker threads (default: DLSVM_JOBS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--table", table, "print a table to stdout");
  }
  AddGridFlags(gridc, grid);
  AddGridFlags(kfold, grid);
  kfold->add_option("--k", k, "folds")->check(CLI::Range(2, 1000));
  kfold->add_option("--test-frac", test_frac, "holdout test fraction")
      ->check(CLI::Range(0.01, 0.99));
  sweep->add_option("--outliers", outliers, "outlier counts")
      ->delimiter(',')
      ->required()
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (CLI::App* sub : {gridc, kfold}) {
    if (sub->parsed() && !model.beta && grid.betas.empty()) {
      std::fprintf(stderr, "error: %s needs --beta or --betas\n",
                   sub->get_name().c_str());
      return kExitUsage;
    }
  }

  dlsvm_set_log_level(quiet           ? DLSVM_LOG_QUIET
                      : verbosity > 0 ? DLSVM_LOG_INFO
                                      : DLSVM_LOG_WARN);
  try {
    if (train->parsed()) return CmdTrain(data, model, out, trace);
    if (detect->parsed()) return CmdDetect(data, model_path, out);

    const DatasetPtr ds = LoadData(data, true);
    const ParamsPtr p = MakeParams(model);
    dlsvm_results* raw = nullptr;
    const int std_flag = data.standardize ? 1 : 0;
    if (gridc->parsed()) {
      ApplyGrid(p.get(), model, grid);
      Check(dlsvm_grid_search(ds.get(), p.get(), jobs, std_flag, &raw), "grid");
    } else if (kfold->parsed()) {
      ApplyGrid(p.get(), model, grid);
      Check(dlsvm_kfold(ds.get(), p.get(), k, test_frac,
                        static_cast<std::uint64_t>(model.seed), jobs,
                        std_flag, &raw),
            "kfold");
    } else {
      Check(dlsvm_sweep(ds.get(), p.get(), outliers.data(), outliers.size(),
                        static_cast<std::uint64_t>(model.seed), jobs, std_flag, &raw),
            "sweep");
    }
    const ResultsPtr results(raw);
    Report(results.get(), out, table);
    return kExitOk;
  } catch (const RuntimeFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
