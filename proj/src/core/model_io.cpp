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

#include "model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace dlsvm::model {
namespace {

using json = nlohmann::json;

json MatrixToJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

json VectorToJson(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const json& Field(const json& obj, const char* key) {
  Require(obj.is_object() && obj.contains(key), ErrorKind::kParse,
          std::string("model file: missing field '") + key + "'");
  return obj.at(key);
}

template <typename T>
T Get(const json& obj, const char* key) {
  try {
    return Field(obj, key).get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorKind::kParse,
         std::string("model file: bad value for '") + key + "': " + e.what());
  }
}

Matrix MatrixFromJson(const json& j, const char* what) {
  const auto rows = Get<Eigen::Index>(j, "rows");
  const auto cols = Get<Eigen::Index>(j, "cols");
  const json& data = Field(j, "data");
  Require(rows >= 0 && cols >= 0 && data.is_array() &&
              static_cast<Eigen::Index>(data.size()) == rows,
          ErrorKind::kParse,
          std::string("model file: malformed matrix '") + what + "'");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = data[static_cast<size_t>(i)];
    Require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            ErrorKind::kParse,
            std::string("model file: ragged matrix '") + what + "'");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& cell = row[static_cast<size_t>(c)];
      Require(cell.is_number(), ErrorKind::kParse,
              std::string("model file: non-numeric entry in '") + what + "'");
      m(i, c) = cell.get<double>();
    }
  }
  return m;
}

Vector VectorFromJson(const json& j, const char* what) {
  Require(j.is_array(), ErrorKind::kParse,
          std::string("model file: '") + what + "' is not an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    Require(j[i].is_number(), ErrorKind::kParse,
            std::string("model file: non-numeric entry in '") + what + "'");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::string TrsName(atoms::TrsMethod m) {
  return m == atoms::TrsMethod::kBidual ? "bidual" : "power";
}

json HyperparamsToJson(const Hyperparams& hp) {
  return {
      {"n_atoms", hp.n_atoms},
      {"sparsity", hp.sparsity},
      {"beta", hp.beta},
      {"gamma", hp.gamma},
      {"nu", hp.nu},
      {"kernel",
       {{"kind", kernel::KernelName(hp.kernel.kind)},
        {"sigma", hp.kernel.sigma},
        {"degree", hp.kernel.degree},
        {"coef", hp.kernel.coef}}},
      {"outer_iters", hp.outer_iters},
      {"trim_tol", hp.trim_tol},
      {"seed", hp.seed},
      {"ocsvm_tol", hp.ocsvm_tol},
      {"trs", TrsName(hp.trs)},
      {"fixed_atom_trim", hp.fixed_atom_trim},
      {"descent_guard", hp.descent_guard},
      {"restrict_pair_updates", hp.restrict_pair_updates},
  };
}

Hyperparams HyperparamsFromJson(const json& j, Variant variant) {
  Hyperparams hp;
  hp.variant = variant;
  hp.n_atoms = Get<int>(j, "n_atoms");
  hp.sparsity = Get<int>(j, "sparsity");
  hp.beta = Get<double>(j, "beta");
  hp.gamma = Get<double>(j, "gamma");
  hp.nu = Get<double>(j, "nu");
  const json& k = Field(j, "kernel");
  hp.kernel.kind = kernel::ParseKernel(Get<std::string>(k, "kind"));
  hp.kernel.sigma = Get<double>(k, "sigma");
  hp.kernel.degree = Get<int>(k, "degree");
  hp.kernel.coef = Get<double>(k, "coef");
  hp.outer_iters = Get<int>(j, "outer_iters");
  hp.trim_tol = Get<double>(j, "trim_tol");
  hp.seed = Get<std::uint64_t>(j, "seed");
  hp.ocsvm_tol = Get<double>(j, "ocsvm_tol");
  const std::string trs = Get<std::string>(j, "trs");
  Require(trs == "power" || trs == "bidual", ErrorKind::kParse,
          "model file: unknown trs method '" + trs + "'");
  hp.trs = trs == "bidual" ? atoms::TrsMethod::kBidual : atoms::TrsMethod::kPower;
  hp.fixed_atom_trim = Get<bool>(j, "fixed_atom_trim");
  hp.descent_guard = Get<bool>(j, "descent_guard");
  hp.restrict_pair_updates = Get<bool>(j, "restrict_pair_updates");
  return hp;
}

}  // namespace

std::string SerializeModel(const TrainedModel& model) {
  json j;
  j["format_version"] = kFormatVersion;
  j["model_type"] = VariantName(model.hp.variant);
  j["hyperparameters"] = HyperparamsToJson(model.hp);
  j["features"] = model.features;
  j["dictionary"] = MatrixToJson(model.dict);
  j["analysis"] = MatrixToJson(model.analysis);
  j["y_train"] = MatrixToJson(model.y_train);

  const svm::OcsvmModel& s = model.ocsvm;
  j["ocsvm"] = {{"omega", VectorToJson(s.omega)},
                {"rho", s.rho},
                {"lambda", VectorToJson(s.lambda)},
                {"xi", VectorToJson(s.xi)},
                {"nu_frac", s.nu},
                {"support", s.support},
                {"kkt_violation", s.kkt_violation},
                {"iterations", s.iterations},
                {"converged", s.converged}};
  j["alpha_weights"] = VectorToJson(model.alpha_weights);
  json trim = json::array();
  for (const char t : model.trimmed) trim.push_back(t != 0);
  j["trim_info"] = std::move(trim);
  json trace = json::array();
  for (const LossRecord& r : model.trace) {
    trace.push_back({r.outer, r.inner, r.f, r.g, r.total});
  }
  j["loss_trace"] = std::move(trace);
  if (model.standardizer) {
    j["standardizer"] = {{"means", VectorToJson(model.standardizer->means)},
                         {"stds", VectorToJson(model.standardizer->stds)}};
  } else {
    j["standardizer"] = nullptr;
  }
  return j.dump(1);
}

TrainedModel DeserializeModel(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorKind::kParse, std::string("model file: ") + e.what());
  }
  const int version = Get<int>(j, "format_version");
  Require(version == kFormatVersion, ErrorKind::kVersion,
          "model file has format_version " + std::to_string(version) +
              ", this build reads format_version " +
              std::to_string(kFormatVersion));

  TrainedModel m;
  const Variant variant = ParseVariant(Get<std::string>(j, "model_type"));
  m.hp = HyperparamsFromJson(Field(j, "hyperparameters"), variant);
  m.features = Get<Eigen::Index>(j, "features");
  m.dict = MatrixFromJson(Field(j, "dictionary"), "dictionary");
  m.analysis = MatrixFromJson(Field(j, "analysis"), "analysis");
  m.y_train = MatrixFromJson(Field(j, "y_train"), "y_train");

  const json& s = Field(j, "ocsvm");
  m.ocsvm.omega = VectorFromJson(Field(s, "omega"), "omega");
  m.ocsvm.rho = Get<double>(s, "rho");
  m.ocsvm.lambda = VectorFromJson(Field(s, "lambda"), "lambda");
  m.ocsvm.xi = VectorFromJson(Field(s, "xi"), "xi");
  m.ocsvm.nu = Get<double>(s, "nu_frac");
  m.ocsvm.support = Get<std::vector<int>>(s, "support");
  m.ocsvm.kkt_violation = Get<double>(s, "kkt_violation");
  m.ocsvm.iterations = Get<long>(s, "iterations");
  m.ocsvm.converged = Get<bool>(s, "converged");
  m.alpha_weights = VectorFromJson(Field(j, "alpha_weights"), "alpha_weights");
  for (const bool t : Get<std::vector<bool>>(j, "trim_info")) {
    m.trimmed.push_back(t ? 1 : 0);
  }
  const json& trace = Field(j, "loss_trace");
  Require(trace.is_array(), ErrorKind::kParse,
          "model file: 'loss_trace' is not an array");
  for (const json& r : trace) {
    Require(r.is_array() && r.size() == 5, ErrorKind::kParse,
            "model file: malformed loss_trace entry");
    LossRecord rec;
    rec.outer = r[0].get<int>();
    rec.inner = r[1].get<int>();
    rec.f = r[2].get<double>();
    rec.g = r[3].get<double>();
    rec.total = r[4].get<double>();
    m.trace.push_back(rec);
  }
  const json& st = Field(j, "standardizer");
  if (!st.is_null()) {
    data::Standardizer z;
    z.means = VectorFromJson(Field(st, "means"), "means");
    z.stds = VectorFromJson(Field(st, "stds"), "stds");
    m.standardizer = std::move(z);
  }

  // Shape consistency, so a damaged file fails here rather than in Detect.
  const Eigen::Index n = m.hp.n_atoms;
  const bool kernel = IsKernel(variant);
  const Eigen::Index big_n = m.y_train.cols();
  auto shape = [](bool ok, const std::string& what) {
    Require(ok, ErrorKind::kParse, "model file: inconsistent shape of " + what);
  };
  shape(m.dict.cols() == n, "dictionary");
  shape(m.ocsvm.omega.size() == n, "omega");
  shape(static_cast<Eigen::Index>(m.trimmed.size()) == n, "trim_info");
  if (kernel) {
    shape(m.y_train.rows() == m.features && big_n >= 1 &&
              m.dict.rows() == big_n,
          "y_train / kernel dictionary");
  } else {
    shape(m.dict.rows() == m.features, "dictionary");
  }
  if (IsPairModel(variant)) {
    shape(m.analysis.rows() == n &&
              m.analysis.cols() == (kernel ? big_n : m.features),
          "analysis operator");
    shape(m.alpha_weights.size() == n, "alpha_weights");
  }
  if (m.standardizer) {
    shape(m.standardizer->means.size() == m.features &&
              m.standardizer->stds.size() == m.features,
          "standardizer");
  }
  return m;
}

void SaveModel(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << SerializeModel(model) << '\n';
  out.flush();
  Require(out.good(), ErrorKind::kIo, "failed writing '" + path + "'");
}

TrainedModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeModel(buf.str());
}

}  // namespace dlsvm::model
