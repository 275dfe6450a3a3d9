#pragma once

#include "misscusum/inspect.hpp"
#include "misscusum/segmentation.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace misscusum {

inline constexpr const char* kSchemaName = "misscusum/1";

/// CLI-facing detection result. z_hats are 1-based and ordered by descending
/// prominence; v_hat holds the nonzero coordinates (1-based) of the root
/// projection direction.
struct DetectionReport {
  Index n = 0, p = 0;
  std::string variant;  // "full", "split" or "segmentation"
  std::vector<Index> z_hats;
  std::vector<double> prominences;
  std::vector<std::pair<Index, double>> v_hat;
  double lambda_used = 0.0;
  std::string lambda_basis;  // "full_n", "split_n1" or "explicit"
  double sigma_value = 0.0;
  std::string sigma_source;  // "supplied" or "estimated"
  int iterations = 0;
  bool converged = false;
  std::optional<double> timing_ms;  // the one non-deterministic field
};

inline std::vector<std::pair<Index, double>> sparse_entries(const Vector& v) {
  std::vector<std::pair<Index, double>> out;
  for (Index j = 0; j < v.size(); ++j) {
    if (v(j) != 0.0) out.emplace_back(j + 1, v(j));
  }
  return out;
}

inline nlohmann::ordered_json to_json(const DetectionReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaName;
  j["variant"] = r.variant;
  j["n"] = r.n;
  j["p"] = r.p;
  j["z_hats"] = r.z_hats;
  j["prominences"] = r.prominences;
  nlohmann::ordered_json vh = nlohmann::ordered_json::array();
  for (const auto& [idx, w] : r.v_hat) {
    vh.push_back({{"index", idx}, {"weight", w}});
  }
  j["v_hat"] = vh;
  j["lambda_used"] = r.lambda_used;
  j["lambda_basis"] = r.lambda_basis;
  j["sigma_used"] = {{"value", r.sigma_value}, {"source", r.sigma_source}};
  j["solver"] = {{"iterations", r.iterations}, {"converged", r.converged}};
  if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
  return j;
}

inline nlohmann::ordered_json error_json(const std::string& code,
                                         const std::string& message) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaName;
  j["error"] = code;
  j["message"] = message;
  return j;
}

}  // namespace misscusum
