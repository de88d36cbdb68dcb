#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "varxid/certify.hpp"
#include "varxid/estimators.hpp"
#include "varxid/simulate.hpp"

namespace varxid::io {

using json = nlohmann::json;

// CSV, header "col0,col1,...", entries printed with 17 significant digits (lossless)
void write_matrix_csv(const std::string& path, const Matrix& M);
Matrix read_matrix_csv(const std::string& path);

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

json to_json(const RegressionData& data);
RegressionData regression_from_json(const json& j);

json to_json(const Estimate& est);
Estimate estimate_from_json(const json& j);

json to_json(const WeakRipEstimate& est);
json to_json(const BoundPredictions& b);
json to_json(const CertReport& rep);

// one file per matrix under dir: Z.csv, X.csv, and W.csv / Sigma.csv when present
void save_regression_csv(const std::string& dir, const RegressionData& data);
RegressionData load_regression_csv(const std::string& dir);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

}  // namespace varxid::io
