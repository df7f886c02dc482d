#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistcal/errors.hpp"
#include "twistcal/octonion.hpp"
#include "twistcal/run.hpp"

namespace {

using nlohmann::json;
using namespace twistcal;

enum class ExitCode { ok = 0, verification_failed = 1, config_error = 2, io_error = 3 };

struct RunFlags {
  std::string config;
  std::string scenario;
  std::string out;
  std::string format = "summary";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> tol;
  std::optional<double> step;
};

void add_run_flags(CLI::App* sub, RunFlags& flags) {
  auto* config = sub->add_option("--config", flags.config, "JSON run configuration");
  sub->add_option("--scenario", flags.scenario, "registered scenario name")->excludes(config);
  sub->add_option("--out", flags.out, "write the selected format to this file instead of standard output");
  sub->add_option("--format", flags.format, "output format")->check(CLI::IsMember({"summary", "csv", "json"}));
  sub->add_option("--seed", flags.seed, "random seed for generated fibre samples");
  sub->add_option("--jobs", flags.jobs, "number of worker threads")->check(CLI::Range(1, 1024));
  sub->add_option("--tol", flags.tol, "calibration tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--step", flags.step, "finite-difference step")->check(CLI::PositiveNumber);
}

json load_document(const RunFlags& flags) {
  json doc;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw IoError("cannot open config file '" + flags.config + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + flags.config + "' is not valid JSON: " + e.what());
    }
  } else if (!flags.scenario.empty()) {
    doc = scenario_document(flags.scenario);
  } else {
    throw ConfigError("one of --config or --scenario is required");
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.jobs) doc["jobs"] = *flags.jobs;
  if (flags.tol) doc["tolerance"] = *flags.tol;
  if (flags.step) doc["step"] = *flags.step;
  return doc;
}

std::string render(const RunReport& report, const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    out << report_to_json(report).dump(2) << "\n";
  } else if (format == "csv") {
    write_csv(report, out);
  } else {
    write_summary(report, out);
  }
  return out.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << std::flush;
  } else {
    write_text_file(path, text);
  }
}

ExitCode run_verify(const RunFlags& flags) {
  const RunConfig config = parse_config(load_document(flags));
  const RunReport report = execute(config);
  if (!config.csv_path.empty()) write_text_file(config.csv_path, render(report, "csv"));
  if (!config.json_path.empty()) write_text_file(config.json_path, render(report, "json"));
  if (!flags.out.empty() && flags.format != "summary") std::cout << render(report, "summary");
  emit(render(report, flags.format), flags.out);
  const bool ok = report.pass && report.verdict.failed_samples == 0;
  return ok ? ExitCode::ok : ExitCode::verification_failed;
}

ExitCode run_scan(const RunFlags& flags, const std::string& key, const std::vector<double>& values) {
  const json base = load_document(flags);
  json::json_pointer pointer;
  try {
    pointer = json::json_pointer(key);
  } catch (const json::exception& e) {
    throw ConfigError("--key must be a JSON pointer such as /parameters/C: " + std::string(e.what()));
  }
  std::ostringstream out;
  out << "value,max,mean,failed_samples,route_angle_max,verdict\n";
  bool all_pass = true;
  for (double value : values) {
    json doc = base;
    try {
      doc[pointer] = value;
    } catch (const json::exception& e) {
      throw ConfigError("cannot set " + key + ": " + e.what());
    }
    const RunReport report = execute(parse_config(doc));
    const CalibrationVerdict& v = report.verdict;
    char line[256];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%zu,%.17g,%s\n", value, v.max, v.mean, v.failed_samples,
                  v.route_angle_max, report.pass ? "PASS" : "FAIL");
    out << line;
    all_pass = all_pass && report.pass && v.failed_samples == 0;
  }
  emit(out.str(), flags.out);
  return all_pass ? ExitCode::ok : ExitCode::verification_failed;
}

ExitCode run_classify(const RunFlags& flags) {
  const RunConfig config = parse_config(load_document(flags));
  const std::vector<Vec> grid = box_grid(config.lower, config.upper, config.resolution);
  const ClassifierResiduals r = classify_residuals(base_immersion(config.spec), grid);
  const double tol = config.tolerance;
  std::vector<std::string> labels;
  if (r.minimal < tol) labels.emplace_back("minimal");
  if (r.austere < tol) labels.emplace_back("austere");
  if (r.superminimal_defined && r.superminimal_pos < tol) labels.emplace_back("superminimal_pos");
  if (r.superminimal_defined && r.superminimal_neg < tol) labels.emplace_back("superminimal_neg");

  std::ostringstream out;
  if (flags.format == "json") {
    json j;
    j["tool"] = kToolVersion;
    j["tolerance"] = tol;
    j["minimal"] = r.minimal;
    j["austere"] = r.austere;
    j["superminimal_defined"] = r.superminimal_defined;
    j["superminimal_pos"] = r.superminimal_pos;
    j["superminimal_neg"] = r.superminimal_neg;
    j["labels"] = labels;
    out << j.dump(2) << "\n";
  } else if (flags.format == "csv") {
    char line[256];
    std::snprintf(line, sizeof line, "minimal,austere,superminimal_pos,superminimal_neg\n%.17g,%.17g,%.17g,%.17g\n",
                  r.minimal, r.austere, r.superminimal_defined ? r.superminimal_pos : std::nan(""),
                  r.superminimal_defined ? r.superminimal_neg : std::nan(""));
    out << line;
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "minimal residual:          %.3e\naustere residual:          %.3e\n", r.minimal,
                  r.austere);
    out << line;
    if (r.superminimal_defined) {
      std::snprintf(line, sizeof line, "superminimal+ residual:    %.3e\nsuperminimal- residual:    %.3e\n",
                    r.superminimal_pos, r.superminimal_neg);
      out << line;
    }
    out << "labels (tolerance " << tol << "):";
    for (const auto& l : labels) out << " " << l;
    out << (labels.empty() ? " none\n" : "\n");
  }
  emit(out.str(), flags.out);
  return ExitCode::ok;
}

ExitCode run_identity_check(int trials, int max_p, std::uint64_t seed) {
  const IdentityCheckResult r = identity_check(trials, max_p, seed);
  constexpr double kTolerance = 1e-9;
  std::printf("instances: %zu\nworst normalized residual: %.3e (p = %d, j = %d)\nverdict: %s\n", r.instances, r.worst,
              r.worst_p, r.worst_j, r.worst < kTolerance ? "PASS" : "FAIL");
  return r.worst < kTolerance ? ExitCode::ok : ExitCode::verification_failed;
}

ExitCode run_scenarios_list() {
  for (const std::string& name : scenario_names()) {
    const Scenario s = get_scenario(name);
    std::cout << name << "\t" << variant_name(s.spec) << "\texpected " << (s.expected == Expectation::pass ? "PASS" : "FAIL")
              << "\t" << s.provenance << "\n";
  }
  return ExitCode::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of twisted calibrated bundles"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunFlags verify_flags, scan_flags, classify_flags;
  auto* verify = app.add_subcommand("verify", "check the calibration condition for a config or scenario");
  add_run_flags(verify, verify_flags);

  auto* scan = app.add_subcommand("scan", "sweep one config entry and report one CSV row per value");
  add_run_flags(scan, scan_flags);
  std::string scan_key;
  std::vector<double> scan_values;
  scan->add_option("--key", scan_key, "JSON pointer of the entry to vary, e.g. /tolerance")->required();
  scan->add_option("--values", scan_values, "comma-separated values")->required()->delimiter(',');

  auto* classify = app.add_subcommand("classify", "minimal, austere and superminimal residuals of the base");
  add_run_flags(classify, classify_flags);

  auto* identity = app.add_subcommand("identity-check", "randomized check of the symmetric-polynomial identity");
  int trials = 1000;
  int max_p = 5;
  std::uint64_t identity_seed = 0;
  identity->add_option("--trials", trials, "number of random matrix pairs")->check(CLI::Range(1, 10'000'000));
  identity->add_option("--max-p", max_p, "largest matrix size")->check(CLI::Range(1, 8));
  identity->add_option("--seed", identity_seed, "random seed");

  auto* table = app.add_subcommand("octonion-table", "print the octonion multiplication table");
  auto* scenarios = app.add_subcommand("scenarios", "registered scenarios");
  scenarios->require_subcommand(1);
  auto* list = scenarios->add_subcommand("list", "list registered scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }

  ExitCode code = ExitCode::ok;
  try {
    if (*verify) {
      code = run_verify(verify_flags);
    } else if (*scan) {
      code = run_scan(scan_flags, scan_key, scan_values);
    } else if (*classify) {
      code = run_classify(classify_flags);
    } else if (*identity) {
      code = run_identity_check(trials, max_p, identity_seed);
    } else if (*table) {
      std::cout << format_multiplication_table();
    } else if (*list) {
      code = run_scenarios_list();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::io_error);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::verification_failed);
  }
  return static_cast<int>(code);
}
