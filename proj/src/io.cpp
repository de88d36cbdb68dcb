#include "varxid/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

namespace varxid::io {

static std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
  if (!M.allFinite()) throw std::invalid_argument("write_matrix_csv: non-finite entries");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  for (int j = 0; j < M.cols(); ++j) out << (j ? "," : "") << "col" << j;
  out << "\n";
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) out << (j ? "," : "") << fmt17(M(i, j));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_matrix_csv: write failed for " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_matrix_csv: empty file " + path);
  const auto cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> values;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::strtod(cell.c_str(), nullptr));
      ++c;
    }
    if (c != cols) throw std::runtime_error("read_matrix_csv: ragged row in " + path);
    ++rows;
  }
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = values[static_cast<std::size_t>(i) * cols + j];
  return M;
}

json matrix_to_json(const Matrix& M) {
  if (!M.allFinite()) throw std::invalid_argument("matrix_to_json: non-finite entries");
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  j["data"] = std::move(rows);
  return j;
}

Matrix matrix_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto& data = j.at("data");
  if (static_cast<int>(data.size()) != rows)
    throw std::runtime_error("matrix_from_json: row count mismatch");
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = data.at(i);
    if (static_cast<int>(row.size()) != cols)
      throw std::runtime_error("matrix_from_json: column count mismatch");
    for (int j2 = 0; j2 < cols; ++j2) M(i, j2) = row.at(j2).get<double>();
  }
  return M;
}

json to_json(const RegressionData& data) {
  json j;
  j["kind"] = "regression_data";
  j["X"] = matrix_to_json(data.X);
  j["Z"] = matrix_to_json(data.Z);
  if (data.W) j["W"] = matrix_to_json(*data.W);
  if (data.Sigma) j["Sigma"] = matrix_to_json(*data.Sigma);
  return j;
}

RegressionData regression_from_json(const json& j) {
  RegressionData data;
  data.X = matrix_from_json(j.at("X"));
  data.Z = matrix_from_json(j.at("Z"));
  if (j.contains("W")) data.W = matrix_from_json(j.at("W"));
  if (j.contains("Sigma")) data.Sigma = matrix_from_json(j.at("Sigma"));
  return data;
}

json to_json(const Estimate& est) {
  json j;
  j["kind"] = "estimate";
  j["theta_hat"] = matrix_to_json(est.theta_hat);
  j["lambda_used"] = est.lambda_used;
  j["iters"] = est.iters;
  j["converged"] = est.converged;
  j["kkt_residual"] = est.kkt_residual;
  j["objective"] = est.objective;
  j["unique_solution"] = est.unique_solution;
  return j;
}

Estimate estimate_from_json(const json& j) {
  Estimate est;
  est.theta_hat = matrix_from_json(j.at("theta_hat"));
  est.lambda_used = j.at("lambda_used").get<double>();
  est.iters = j.at("iters").get<int>();
  est.converged = j.at("converged").get<bool>();
  est.kkt_residual = j.at("kkt_residual").get<double>();
  est.objective = j.at("objective").get<double>();
  est.unique_solution = j.value("unique_solution", true);
  return est;
}

json to_json(const WeakRipEstimate& est) {
  json j;
  j["order"] = est.order;
  j["K1"] = est.K1;
  j["K2"] = est.K2;
  j["failed"] = !est.delta_hat.has_value();
  if (est.delta_hat) j["delta_hat"] = *est.delta_hat;
  j["samples"] = est.samples;
  j["ratio_min"] = est.ratio_min;
  j["ratio_max"] = est.ratio_max;
  return j;
}

json to_json(const BoundPredictions& b) {
  json j;
  j["op_deterministic"] = b.op_deterministic;
  j["op_corollary_stmt"] = b.op_corollary_stmt;
  j["op_corollary_proof"] = b.op_corollary_proof;
  j["frob_remark"] = b.frob_remark;
  j["op_lq"] = b.op_lq;
  return j;
}

json to_json(const CertReport& rep) {
  json j;
  j["kind"] = "cert_report";
  json rips = json::array();
  for (const auto& est : rep.weak_rip) rips.push_back(to_json(est));
  j["weak_rip"] = std::move(rips);
  j["curvature_K"] = rep.curvature_K;
  j["cov_dev_op"] = rep.cov_dev_op;
  j["cross_term_value"] = rep.cross_term_value;
  j["cross_term_threshold"] = rep.cross_term_threshold;
  j["lambda"] = rep.lambda;
  j["s_value"] = rep.s;
  j["predicted_bounds"] = to_json(rep.predicted);
  // recomputed from the numeric fields above, never cached
  j["uniqueness_ok"] = rep.uniqueness_ok();
  j["exact_recovery_ok"] = rep.exact_recovery_ok();
  j["lambda_premise_ok"] = rep.lambda_premise_ok();
  return j;
}

void save_regression_csv(const std::string& dir, const RegressionData& data) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir + "/Z.csv", data.Z);
  write_matrix_csv(dir + "/X.csv", data.X);
  if (data.W) write_matrix_csv(dir + "/W.csv", *data.W);
  if (data.Sigma) write_matrix_csv(dir + "/Sigma.csv", *data.Sigma);
}

RegressionData load_regression_csv(const std::string& dir) {
  RegressionData data;
  data.Z = read_matrix_csv(dir + "/Z.csv");
  data.X = read_matrix_csv(dir + "/X.csv");
  if (std::filesystem::exists(dir + "/W.csv")) data.W = read_matrix_csv(dir + "/W.csv");
  if (std::filesystem::exists(dir + "/Sigma.csv"))
    data.Sigma = read_matrix_csv(dir + "/Sigma.csv");
  return data;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json_file: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write_json_file: write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_json_file: cannot open " + path);
  return json::parse(in);
}

}  // namespace varxid::io
