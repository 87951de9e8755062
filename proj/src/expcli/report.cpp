#include "zfprob/report.hpp"

#include <bit>
#include <cstdio>
#include <map>
#include <sstream>

namespace zfprob {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void flatten(const json& value, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (value.is_object()) {
    for (const auto& [key, child] : value.items()) {
      flatten(child, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  std::string cell;
  if (value.is_string()) {
    cell = value.get<std::string>();
  } else if (value.is_null()) {
    cell = "";
  } else {
    cell = value.dump();
  }
  if (cell.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (const char c : cell) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    cell = quoted + "\"";
  }
  out.emplace_back(prefix, cell);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(delta > 0.25 && delta <= 1.0)) {
    throw Error(Errc::InvalidArgument, "delta must lie in (0.25, 1]");
  }
  if (sigma && !(*sigma > 0.0)) throw Error(Errc::InvalidArgument, "sigma must be positive");
  method_from_string(method);
  if (out_format != "json" && out_format != "csv") {
    throw Error(Errc::InvalidArgument, "format must be json or csv");
  }
  if (n && *n == 0) throw Error(Errc::InvalidArgument, "n must be positive");
  if (n && m && *m < *n) throw Error(Errc::DimensionMismatch, "need m >= n");
  if (parallel == 0) throw Error(Errc::InvalidArgument, "parallel must be at least 1");
}

void ExperimentReport::add_verdict(std::string name, bool passed, std::string detail) {
  verdicts.push_back({std::move(name), passed, std::move(detail)});
}

bool ExperimentReport::passed() const { return first_failure() == nullptr; }

const Verdict* ExperimentReport::first_failure() const {
  for (const auto& v : verdicts)
    if (!v.passed) return &v;
  return nullptr;
}

json to_json(const ExperimentConfig& c) {
  return json{{"command", c.command},
              {"matrix_path", optional_json(c.matrix_path)},
              {"y_path", optional_json(c.y_path)},
              {"sigma", optional_json(c.sigma)},
              {"delta", c.delta},
              {"delta_grid", optional_json(c.delta_grid)},
              {"method", c.method},
              {"trials", optional_json(c.trials)},
              {"seed", c.seed},
              {"n", optional_json(c.n)},
              {"m", optional_json(c.m)},
              {"format", c.out_format},
              {"out_path", optional_json(c.out_path)},
              {"parallel", c.parallel}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.command = j.at("command").get<std::string>();
  c.matrix_path = optional_from<std::string>(j, "matrix_path");
  c.y_path = optional_from<std::string>(j, "y_path");
  c.sigma = optional_from<double>(j, "sigma");
  c.delta = j.at("delta").get<double>();
  c.delta_grid = optional_from<std::vector<double>>(j, "delta_grid");
  c.method = j.at("method").get<std::string>();
  c.trials = optional_from<std::uint64_t>(j, "trials");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.n = optional_from<std::size_t>(j, "n");
  c.m = optional_from<std::size_t>(j, "m");
  c.out_format = j.at("format").get<std::string>();
  c.out_path = optional_from<std::string>(j, "out_path");
  c.parallel = j.at("parallel").get<unsigned>();
  return c;
}

json to_json(const ExperimentReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) cases.push_back({{"label", c.label}, {"data", c.data}});
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  }
  return json{{"tool", "zfprob"},
              {"config", to_json(r.config)},
              {"cases", std::move(cases)},
              {"verdicts", std::move(verdicts)},
              {"summary", r.summary},
              {"passed", r.passed()},
              {"duration_seconds", r.duration_seconds}};
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  r.config = config_from_json(j.at("config"));
  for (const auto& c : j.at("cases")) {
    r.cases.push_back({c.at("label").get<std::string>(), c.at("data")});
  }
  for (const auto& v : j.at("verdicts")) {
    r.verdicts.push_back({v.at("name").get<std::string>(), v.at("passed").get<bool>(),
                          v.at("detail").get<std::string>()});
  }
  r.summary = j.at("summary");
  r.duration_seconds = j.at("duration_seconds").get<double>();
  return r;
}

std::string serialize_json(const ExperimentReport& report) {
  return to_json(report).dump(2) + "\n";
}

ExperimentReport parse_report(std::string_view text) {
  return report_from_json(json::parse(text));
}

std::string serialize_csv(const ExperimentReport& report) {
  std::vector<std::string> columns{"label"};
  std::map<std::string, std::size_t> index{{"label", 0}};
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  for (const auto& c : report.cases) {
    std::vector<std::pair<std::string, std::string>> cells;
    flatten(c.data, "", cells);
    for (const auto& [key, _] : cells) {
      if (index.emplace(key, columns.size()).second) columns.push_back(key);
    }
    rows.push_back(std::move(cells));
  }

  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> line(columns.size());
    line[0] = report.cases[r].label;
    for (const auto& [key, cell] : rows[r]) line[index.at(key)] = cell;
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << line[i];
    out << '\n';
  }
  return out.str();
}

bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
  // Wall-clock time is the only field that legitimately differs between replays.
  json ja = to_json(a);
  json jb = to_json(b);
  ja.erase("duration_seconds");
  jb.erase("duration_seconds");
  return ja == jb;
}

json to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const ProbabilityEstimate& e) {
  return json{{"value", e.value},
              {"method", std::string(to_string(e.method))},
              {"error_bound", e.error_bound},
              {"evaluations", e.evaluations},
              {"seed", optional_json(e.seed)}};
}

json to_json(const ReductionStats& s) {
  return json{{"size_reductions", s.size_reductions},
              {"swaps", s.swaps},
              {"iterations", s.iterations}};
}

json to_json(const DecodeResult& d) {
  return json{{"decoder", std::string(to_string(d.decoder))},
              {"estimate", d.estimate},
              {"residual", d.residual}};
}

std::string matrix_digest(const DenseMatrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(m.rows());
  mix(m.cols());
  for (const double v : m.data()) mix(std::bit_cast<std::uint64_t>(v));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace zfprob
