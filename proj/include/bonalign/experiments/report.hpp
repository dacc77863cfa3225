#pragma once

#include <charconv>
#include <cmath>
#include <concepts>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bonalign/experiments/config.hpp"

namespace bonalign::experiments {

/// Shortest round-trip decimal form; identical bits give identical text.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

/// One CSV field. Empty text marks an undefined value.
struct Cell {
  std::string text;

  Cell(double x) : text(format_number(x)) {}
  Cell(std::optional<double> x) : text(x ? format_number(*x) : std::string()) {}
  template <std::integral I>
    requires(!std::same_as<I, bool>)
  Cell(I x) : text(std::to_string(x)) {}
  Cell(std::string s) : text(std::move(s)) {}
  Cell(const char* s) : text(s) {}
};

struct CsvTable {
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::initializer_list<Cell> cells) {
    auto& row = rows.emplace_back();
    for (const auto& c : cells) row.push_back(c.text);
  }

  std::string render() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

/// A tolerance assertion, passed iff value <= threshold. Boolean checks
/// record value 1 for true against threshold 1.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<CsvTable> tables;
  /// Kept out of the persisted JSON so reruns are byte-identical.
  double wall_clock_seconds = 0.0;

  void check_le(std::string name, double value, double threshold) {
    checks.push_back({std::move(name), value, threshold, value <= threshold});
  }

  void check_flag(std::string name, bool ok) {
    checks.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, ok});
  }

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = experiments::to_json(config);
    j["results"] = results;
    auto& arr = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name},
                     {"value", c.value},
                     {"threshold", c.threshold},
                     {"passed", c.passed}});
    }
    j["passed"] = passed();
    return j;
  }
};

/// File stem shared by the JSON report and the primary CSV.
inline std::string report_stem(Experiment e) {
  std::string s(to_string(e));
  for (auto& c : s) c = c == '-' ? '_' : c;
  return s;
}

/// Writes <stem>.json and every table into `dir`; returns the written paths.
inline std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  };
  put(dir / (report_stem(report.config.experiment) + ".json"), report.to_json().dump(2) + "\n");
  for (const auto& t : report.tables) put(dir / t.filename, t.render());
  return written;
}

}  // namespace bonalign::experiments
