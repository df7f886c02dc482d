#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twistcal/scenarios.hpp"
#include "twistcal/twisted.hpp"

namespace twistcal {

inline constexpr const char* kToolVersion = "twistcal 0.1.0";
inline constexpr int kConfigVersion = 1;

// Fully resolved run configuration. `document` is the validated input with defaults filled in.
struct RunConfig {
  explicit RunConfig(TwistSpec twist) : spec(std::move(twist)) {}

  nlohmann::json document;
  std::optional<std::string> scenario;
  std::optional<Expectation> expected;
  std::string provenance;
  TwistSpec spec;
  Vec lower;
  Vec upper;
  int resolution = 5;
  std::vector<Vec> fibre_samples;
  double tolerance = 1e-6;
  double route_tolerance = 1e-6;
  FrameOptions frame;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string csv_path;
  std::string json_path;
};

// Validates the schema (unknown keys rejected, types checked) and builds the spec.
// Throws ConfigError, or ParseError for malformed expressions.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::string& path);
// Minimal config document selecting a registered scenario.
nlohmann::json scenario_document(const std::string& name);

struct ClassifierSummary {
  bool evaluated = false;
  ClassifierResiduals residuals;
  std::string error;
};

struct SectionDiagnostics {
  std::string kind;  // "lagrangian", "dbar", "parallel"
  std::vector<std::pair<std::string, double>> values;
  std::string error;
};

struct RunReport {
  std::string tool = kToolVersion;
  nlohmann::json config;  // resolved config echo without the parallelism degree
  std::string condition;
  std::string geometry;
  std::optional<std::string> scenario;
  std::optional<std::string> expected;
  double tolerance = 0.0;
  double route_tolerance = 0.0;
  CalibrationVerdict verdict;
  ClassifierSummary classifier;
  SectionDiagnostics sections;
  bool route_pass = false;
  bool pass = false;
  std::vector<std::string> component_names;
};

RunReport execute(const RunConfig& config);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& document);

void write_summary(const RunReport& report, std::ostream& out);
// Header then one row per sample: u..., t..., residual, components..., route_angle, status.
void write_csv(const RunReport& report, std::ostream& out);

// Throws IoError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

struct IdentityCheckResult {
  std::size_t instances = 0;
  double worst = 0.0;
  int worst_p = 0;
  int worst_j = 0;
};
// Randomized check of the symmetric-polynomial identity for 1 <= p <= max_p, all j, and
// t in {i, -i, random complex}.
IdentityCheckResult identity_check(int trials, int max_p, std::uint64_t seed);

}  // namespace twistcal
