#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zfprob/decode.hpp"
#include "zfprob/matrix.hpp"
#include "zfprob/probability.hpp"
#include "zfprob/reduction.hpp"

namespace zfprob {

/// Everything a run depends on; echoed verbatim into the report for replay.
struct ExperimentConfig {
  std::string command;
  std::optional<std::string> matrix_path;
  std::optional<std::string> y_path;
  std::optional<double> sigma;
  double delta = 0.75;
  std::optional<std::vector<double>> delta_grid;
  std::string method = "quad";
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 1;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::string out_format = "json";
  std::optional<std::string> out_path;
  unsigned parallel = 1;

  void validate() const;
};

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CaseRecord {
  std::string label;
  nlohmann::json data;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CaseRecord> cases;
  std::vector<Verdict> verdicts;
  nlohmann::json summary = nlohmann::json::object();
  double duration_seconds = 0.0;

  void add_verdict(std::string name, bool passed, std::string detail = {});
  bool passed() const;
  const Verdict* first_failure() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

std::string serialize_json(const ExperimentReport& report);
ExperimentReport parse_report(std::string_view text);
/// One row per case; nested objects flatten to dotted column names and
/// arrays are written as quoted JSON.
std::string serialize_csv(const ExperimentReport& report);

/// Equal in every field except duration_seconds.
bool operator==(const ExperimentReport& a, const ExperimentReport& b);

// Domain values as JSON.
nlohmann::json to_json(const DenseMatrix& m);
nlohmann::json to_json(const IntMatrix& m);
nlohmann::json to_json(const ProbabilityEstimate& estimate);
nlohmann::json to_json(const ReductionStats& stats);
nlohmann::json to_json(const DecodeResult& result);

/// FNV-1a over the shape and the IEEE-754 bits of the entries, as hex.
std::string matrix_digest(const DenseMatrix& m);

}  // namespace zfprob
