#include "twistcal/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "twistcal/errors.hpp"
#include "twistcal/matrix_invariants.hpp"
#include "twistcal/sections.hpp"

namespace twistcal {

using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys{"version", "scenario", "geometry", "variables", "immersion", "mu",
                                          "theta", "alpha", "beta", "gamma", "parameters", "grid",
                                          "fibre_samples", "tolerance", "route_tolerance", "step", "richardson",
                                          "seed", "jobs", "output"};
const std::set<std::string> kInlineKeys{"geometry", "variables", "immersion", "mu", "theta",
                                        "alpha", "beta", "gamma", "parameters"};
const std::set<std::string> kGridKeys{"lower", "upper", "resolution"};
const std::set<std::string> kOutputKeys{"csv", "json"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      std::string msg = "unknown key '" + key + "' in " + where + "; allowed:";
      for (const auto& a : allowed) msg += " " + a;
      throw ConfigError(msg);
    }
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + key + "' in " + where);
  return obj.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(what + " must be finite");
  return d;
}

double positive_number(const json& v, const std::string& what) {
  const double d = as_number(v, what);
  if (!(d > 0.0)) throw ConfigError(what + " must be positive");
  return d;
}

int as_int(const json& v, const std::string& what, int min_value) {
  if (!v.is_number_integer()) throw ConfigError(what + " must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < min_value || i > 1'000'000) throw ConfigError(what + " is out of range");
  return static_cast<int>(i);
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> as_strings(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(as_string(e, what + " entry"));
  return out;
}

Vec as_vec(const json& v, const std::string& what, Eigen::Index size) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  if (static_cast<Eigen::Index>(v.size()) != size) {
    throw ConfigError(what + " must have " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
  }
  Vec out(size);
  for (Eigen::Index k = 0; k < size; ++k) out(k) = as_number(v[static_cast<std::size_t>(k)], what + " entry");
  return out;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vec json_vec(const json& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = v[k].get<double>();
  return out;
}

std::string expectation_name(Expectation e) { return e == Expectation::pass ? "PASS" : "FAIL"; }

// Expression text wrapped with a location for error messages.
Expr parse_expr(const json& v, const std::string& what, const std::vector<std::string>& vars,
                const std::map<std::string, double>& constants) {
  const std::string text = as_string(v, what);
  try {
    return Expr::parse(text, vars, constants);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), e.offset(), what + " \"" + text + "\": " + e.what(), e.expected());
  }
}

std::vector<std::string> component_names_for(const TwistSpec& spec) {
  switch (geometry_of(spec)) {
    case Geometry::special_lagrangian: return {"phase", "symplectic"};
    case Geometry::spin7: return {"fourfold"};
    case Geometry::g2: return std::holds_alternative<AssocTwist>(spec) ? std::vector<std::string>{"associator"}
                                                                        : std::vector<std::string>{"phi"};
  }
  return {};
}

TwistSpec inline_spec(const json& doc, json& resolved) {
  const std::string geometry = as_string(require(doc, "geometry", "config"), "geometry");
  const std::vector<std::string> vars = as_strings(require(doc, "variables", "config"), "variables");
  std::map<std::string, double> constants;
  if (doc.contains("parameters")) {
    const json& params = doc.at("parameters");
    if (!params.is_object()) throw ConfigError("parameters must be an object of numbers");
    for (const auto& [key, value] : params.items()) {
      for (const auto& v : vars) {
        if (v == key) throw ConfigError("parameter '" + key + "' shadows a variable");
      }
      constants[key] = as_number(value, "parameter '" + key + "'");
    }
  }
  std::vector<Expr> comps;
  const std::vector<std::string> imm_text = as_strings(require(doc, "immersion", "config"), "immersion");
  for (std::size_t k = 0; k < imm_text.size(); ++k) {
    comps.push_back(parse_expr(json(imm_text[k]), "immersion[" + std::to_string(k) + "]", vars, constants));
  }
  if (comps.empty()) throw ConfigError("immersion must have at least one component");
  std::optional<Immersion> imm;
  try {
    imm.emplace(std::move(comps));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto expect_only = [&](std::initializer_list<const char*> allowed) {
    for (const char* key : {"mu", "theta", "alpha", "beta", "gamma"}) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || std::string(a) == key;
      if (!ok && doc.contains(key)) throw ConfigError("key '" + std::string(key) + "' does not apply to geometry " + geometry);
    }
  };
  auto field = [&](const char* key) {
    return ScalarField(parse_expr(require(doc, key, "config"), key, vars, constants));
  };

  std::optional<TwistSpec> spec;
  if (geometry == "special_lagrangian") {
    expect_only({"mu", "theta"});
    OneForm mu;
    if (doc.contains("mu")) {
      const std::vector<std::string> text = as_strings(doc.at("mu"), "mu");
      for (std::size_t k = 0; k < text.size(); ++k) {
        mu.emplace_back(parse_expr(json(text[k]), "mu[" + std::to_string(k) + "]", vars, constants));
      }
    } else {
      for (int k = 0; k < imm->p(); ++k) mu.emplace_back(Expr::constant(0.0, vars));
      resolved["mu"] = std::vector<std::string>(static_cast<std::size_t>(imm->p()), "0");
    }
    double theta = 0.5 * std::numbers::pi * imm->q();
    if (doc.contains("theta")) {
      theta = as_number(doc.at("theta"), "theta");
    } else {
      resolved["theta"] = theta;
    }
    spec = SLTwist{*imm, std::move(mu), theta};
  } else if (geometry == "associative") {
    expect_only({"alpha", "beta"});
    spec = AssocTwist{*imm, field("alpha"), field("beta")};
  } else if (geometry == "coassociative") {
    expect_only({"gamma"});
    spec = CoassocTwist{*imm, field("gamma")};
  } else if (geometry == "cayley") {
    expect_only({"alpha", "beta"});
    spec = CayleyTwist{*imm, field("alpha"), field("beta")};
  } else {
    throw ConfigError("geometry must be one of special_lagrangian, associative, coassociative, cayley; got '" +
                      geometry + "'");
  }
  validate(*spec);
  return *spec;
}

}  // namespace

json scenario_document(const std::string& name) {
  const Scenario s = get_scenario(name);
  json doc;
  doc["version"] = kConfigVersion;
  doc["scenario"] = name;
  return doc;
}

RunConfig parse_config(const json& document) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(document, kTopLevelKeys, "config");
  const int version = as_int(require(document, "version", "config"), "version", 0);
  if (version != kConfigVersion) {
    throw ConfigError("unsupported config version " + std::to_string(version) + "; expected " +
                      std::to_string(kConfigVersion));
  }

  json resolved = document;
  std::optional<Scenario> scenario;
  std::optional<TwistSpec> spec;
  if (document.contains("scenario")) {
    if (document.contains("geometry")) throw ConfigError("config must name either a scenario or a geometry, not both");
    for (const auto& key : kInlineKeys) {
      if (document.contains(key)) throw ConfigError("key '" + key + "' cannot be combined with a scenario");
    }
    scenario = get_scenario(as_string(document.at("scenario"), "scenario"));
    spec = scenario->spec;
  } else if (document.contains("geometry")) {
    spec = inline_spec(document, resolved);
  } else {
    throw ConfigError("config must contain either 'scenario' or 'geometry'");
  }
  RunConfig cfg(*spec);
  if (scenario) {
    cfg.scenario = scenario->name;
    cfg.expected = scenario->expected;
    cfg.provenance = scenario->provenance;
  }

  const int p = base_immersion(cfg.spec).p();
  const int fdim = fibre_dim(cfg.spec);

  if (document.contains("seed")) {
    const json& s = document.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed must be a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  resolved["seed"] = cfg.seed;

  if (document.contains("grid")) {
    const json& g = document.at("grid");
    if (!g.is_object()) throw ConfigError("grid must be an object");
    reject_unknown(g, kGridKeys, "grid");
    cfg.lower = as_vec(require(g, "lower", "grid"), "grid.lower", p);
    cfg.upper = as_vec(require(g, "upper", "grid"), "grid.upper", p);
    cfg.resolution = g.contains("resolution") ? as_int(g.at("resolution"), "grid.resolution", 1) : 5;
    for (int d = 0; d < p; ++d) {
      if (cfg.lower(d) > cfg.upper(d)) throw ConfigError("grid.lower must not exceed grid.upper");
    }
  } else if (scenario) {
    cfg.lower = scenario->lower;
    cfg.upper = scenario->upper;
    cfg.resolution = scenario->resolution;
  } else {
    cfg.lower = Vec::Constant(p, -0.5);
    cfg.upper = Vec::Constant(p, 0.5);
  }
  resolved["grid"] = {{"lower", vec_json(cfg.lower)}, {"upper", vec_json(cfg.upper)}, {"resolution", cfg.resolution}};

  if (document.contains("fibre_samples")) {
    const json& f = document.at("fibre_samples");
    if (!f.is_array() || f.empty()) throw ConfigError("fibre_samples must be a non-empty array of points");
    for (std::size_t k = 0; k < f.size(); ++k) cfg.fibre_samples.push_back(as_vec(f[k], "fibre_samples[" + std::to_string(k) + "]", fdim));
  } else if (scenario) {
    cfg.fibre_samples = scenario->fibre_samples;
  } else {
    cfg.fibre_samples = default_fibre_samples(fdim, 1, cfg.seed);
  }
  resolved["fibre_samples"] = json::array();
  for (const Vec& t : cfg.fibre_samples) resolved["fibre_samples"].push_back(vec_json(t));

  cfg.tolerance = document.contains("tolerance") ? positive_number(document.at("tolerance"), "tolerance")
                                                 : (scenario ? scenario->tolerance : 1e-6);
  resolved["tolerance"] = cfg.tolerance;
  cfg.route_tolerance = document.contains("route_tolerance")
                            ? positive_number(document.at("route_tolerance"), "route_tolerance")
                            : 1e-6;
  resolved["route_tolerance"] = cfg.route_tolerance;
  cfg.frame.step = document.contains("step") ? positive_number(document.at("step"), "step") : 1e-5;
  resolved["step"] = cfg.frame.step;
  cfg.frame.richardson_levels = document.contains("richardson") ? as_int(document.at("richardson"), "richardson", 0) : 1;
  if (cfg.frame.richardson_levels > 4) throw ConfigError("richardson must be at most 4");
  resolved["richardson"] = cfg.frame.richardson_levels;
  cfg.jobs = document.contains("jobs") ? as_int(document.at("jobs"), "jobs", 1) : 1;
  resolved.erase("jobs");

  if (document.contains("output")) {
    const json& o = document.at("output");
    if (!o.is_object()) throw ConfigError("output must be an object");
    reject_unknown(o, kOutputKeys, "output");
    if (o.contains("csv")) cfg.csv_path = as_string(o.at("csv"), "output.csv");
    if (o.contains("json")) cfg.json_path = as_string(o.at("json"), "output.json");
  }
  resolved["version"] = kConfigVersion;
  cfg.document = resolved;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

RunReport execute(const RunConfig& config) {
  RunReport report;
  report.config = config.document;
  report.condition = variant_name(config.spec);
  report.geometry = std::string(geometry_name(geometry_of(config.spec)));
  report.scenario = config.scenario;
  if (config.expected) report.expected = expectation_name(*config.expected);
  report.tolerance = config.tolerance;
  report.route_tolerance = config.route_tolerance;
  report.component_names = component_names_for(config.spec);

  const std::vector<Vec> grid = box_grid(config.lower, config.upper, config.resolution);
  VerdictOptions options;
  options.frame = config.frame;
  options.jobs = config.jobs;
  report.verdict = calibration_verdict(config.spec, grid, config.fibre_samples, config.tolerance, options);

  const Immersion& imm = base_immersion(config.spec);
  try {
    report.classifier.residuals = classify_residuals(imm, grid);
    report.classifier.evaluated = true;
  } catch (const Error& e) {
    report.classifier.error = e.what();
  }

  const DifferenceOptions diff{config.frame.step, config.frame.richardson_levels};
  try {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          auto& values = report.sections.values;
          if constexpr (std::is_same_v<T, SLTwist>) {
            report.sections.kind = "lagrangian";
            const LagrangianCheck lag = lagrangian_residual(s, grid, config.fibre_samples, config.frame);
            const HarmonicResidual harm = harmonic_residual(s.immersion, s.mu, grid);
            double theorem = 0.0;
            for (const Vec& u : grid) {
              const FramePoint fp = adapted_frame(s.immersion, u);
              const Mat b = one_form_calculus(fp, s.mu).B;
              for (const Vec& dir : austerity_directions(fp.q())) {
                const SlTheoremResidual r = sl_theorem_residual(fp.shape_operator(dir), b, phase_offset(fp.q(), s.theta));
                for (double v : r.normalized) theorem = std::max(theorem, v);
              }
            }
            values = {{"lagrangian", lag.residual}, {"omega_raw", lag.raw},          {"identity_gap", lag.identity_gap},
                      {"closedness", harm.closedness}, {"coclosedness", harm.coclosedness}, {"theorem", theorem}};
          } else if constexpr (std::is_same_v<T, CoassocTwist>) {
            report.sections.kind = "parallel";
            double worst = 0.0;
            for (const Vec& u : grid) worst = std::max(worst, parallel_residual(s.immersion, asd_line_bundle(), s.gamma, u, diff));
            values = {{"parallel", worst}};
          } else {
            report.sections.kind = "dbar";
            const BundleFrameField bundle =
                std::is_same_v<T, AssocTwist> ? asd_complement_bundle() : negative_spinor_bundle();
            double worst = 0.0;
            for (const Vec& u : grid) worst = std::max(worst, dbar_residual(s.immersion, bundle, s.alpha, s.beta, u, diff));
            values = {{"dbar", worst}};
          }
        },
        config.spec);
  } catch (const Error& e) {
    report.sections.error = e.what();
  }

  report.route_pass = report.verdict.failed_samples == 0 && report.verdict.route_angle_max < config.route_tolerance;
  report.pass = report.verdict.pass;
  return report;
}

json report_to_json(const RunReport& r) {
  json j;
  j["tool"] = r.tool;
  j["config"] = r.config;
  j["condition"] = r.condition;
  j["geometry"] = r.geometry;
  j["scenario"] = r.scenario ? json(*r.scenario) : json(nullptr);
  j["expected"] = r.expected ? json(*r.expected) : json(nullptr);
  j["tolerance"] = r.tolerance;
  j["route_tolerance"] = r.route_tolerance;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  j["component_names"] = r.component_names;

  const CalibrationVerdict& v = r.verdict;
  json cal;
  cal["condition"] = v.condition;
  cal["max"] = v.max;
  cal["mean"] = v.mean;
  cal["argmax"] = v.argmax;
  cal["failed_samples"] = v.failed_samples;
  cal["route_angle_max"] = v.route_angle_max;
  cal["route_pass"] = r.route_pass;
  cal["pass"] = v.pass;
  j["calibration"] = cal;

  json cls;
  cls["evaluated"] = r.classifier.evaluated;
  cls["error"] = r.classifier.error;
  cls["minimal"] = r.classifier.residuals.minimal;
  cls["austere"] = r.classifier.residuals.austere;
  cls["superminimal_defined"] = r.classifier.residuals.superminimal_defined;
  cls["superminimal_pos"] = r.classifier.residuals.superminimal_pos;
  cls["superminimal_neg"] = r.classifier.residuals.superminimal_neg;
  j["classifier"] = cls;

  json sec;
  sec["kind"] = r.sections.kind;
  sec["error"] = r.sections.error;
  sec["values"] = json::array();
  for (const auto& [name, value] : r.sections.values) sec["values"].push_back({name, value});
  j["sections"] = sec;

  json samples = json::array();
  for (const SampleResult& s : v.samples) {
    json row;
    row["u"] = vec_json(s.u);
    row["t"] = vec_json(s.t);
    row["residual"] = s.residual;
    json comps = json::array();
    for (const auto& [name, value] : s.components) comps.push_back({name, value});
    row["components"] = comps;
    row["route_angle"] = s.route_angle;
    row["error"] = s.error;
    samples.push_back(row);
  }
  j["samples"] = samples;
  return j;
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    r.tool = j.at("tool").get<std::string>();
    r.config = j.at("config");
    r.condition = j.at("condition").get<std::string>();
    r.geometry = j.at("geometry").get<std::string>();
    if (!j.at("scenario").is_null()) r.scenario = j.at("scenario").get<std::string>();
    if (!j.at("expected").is_null()) r.expected = j.at("expected").get<std::string>();
    r.tolerance = j.at("tolerance").get<double>();
    r.route_tolerance = j.at("route_tolerance").get<double>();
    r.pass = j.at("verdict").get<std::string>() == "PASS";
    r.component_names = j.at("component_names").get<std::vector<std::string>>();

    const json& cal = j.at("calibration");
    r.verdict.condition = cal.at("condition").get<std::string>();
    r.verdict.tolerance = r.tolerance;
    r.verdict.max = cal.at("max").get<double>();
    r.verdict.mean = cal.at("mean").get<double>();
    r.verdict.argmax = cal.at("argmax").get<std::size_t>();
    r.verdict.failed_samples = cal.at("failed_samples").get<std::size_t>();
    r.verdict.route_angle_max = cal.at("route_angle_max").get<double>();
    r.route_pass = cal.at("route_pass").get<bool>();
    r.verdict.pass = cal.at("pass").get<bool>();

    const json& cls = j.at("classifier");
    r.classifier.evaluated = cls.at("evaluated").get<bool>();
    r.classifier.error = cls.at("error").get<std::string>();
    r.classifier.residuals.minimal = cls.at("minimal").get<double>();
    r.classifier.residuals.austere = cls.at("austere").get<double>();
    r.classifier.residuals.superminimal_defined = cls.at("superminimal_defined").get<bool>();
    r.classifier.residuals.superminimal_pos = cls.at("superminimal_pos").get<double>();
    r.classifier.residuals.superminimal_neg = cls.at("superminimal_neg").get<double>();

    const json& sec = j.at("sections");
    r.sections.kind = sec.at("kind").get<std::string>();
    r.sections.error = sec.at("error").get<std::string>();
    for (const json& pair : sec.at("values")) r.sections.values.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());

    for (const json& row : j.at("samples")) {
      SampleResult s;
      s.u = json_vec(row.at("u"));
      s.t = json_vec(row.at("t"));
      s.residual = row.at("residual").get<double>();
      for (const json& pair : row.at("components")) s.components.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
      s.route_angle = row.at("route_angle").get<double>();
      s.error = row.at("error").get<std::string>();
      r.verdict.samples.push_back(std::move(s));
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report document: ") + e.what());
  }
}

namespace {

std::string point_text(const Vec& v) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v(k));
  return s + ")";
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_summary(const RunReport& r, std::ostream& out) {
  const CalibrationVerdict& v = r.verdict;
  out << r.tool << "\n";
  if (r.scenario) out << "scenario:    " << *r.scenario << " (expected " << r.expected.value_or("?") << ")\n";
  out << "condition:   " << r.condition << " in " << r.geometry << "\n";
  out << "samples:     " << v.samples.size() << " evaluated, " << v.failed_samples << " failed\n";
  for (const SampleResult& s : v.samples) {
    if (!s.ok()) {
      out << "  error at u = " << point_text(s.u) << ", t = " << point_text(s.t) << ": " << s.error << "\n";
      break;
    }
  }
  if (!v.samples.empty() && v.failed_samples < v.samples.size()) {
    const SampleResult& worst = v.samples[v.argmax];
    out << "residual:    max " << short_num(v.max) << ", mean " << short_num(v.mean) << "\n";
    out << "worst:       u = " << point_text(worst.u) << ", t = " << point_text(worst.t) << "\n";
  }
  if (v.failed_samples == v.samples.size()) {
    out << "routes:      not evaluated\n";
  } else {
    out << "routes:      max principal angle " << short_num(v.route_angle_max) << " (tolerance "
        << short_num(r.route_tolerance) << ") " << (r.route_pass ? "agree" : "DISAGREE") << "\n";
  }
  if (r.classifier.evaluated) {
    const ClassifierResiduals& c = r.classifier.residuals;
    out << "classifier:  minimal " << short_num(c.minimal) << ", austere " << short_num(c.austere);
    if (c.superminimal_defined) {
      out << ", superminimal+ " << short_num(c.superminimal_pos) << ", superminimal- " << short_num(c.superminimal_neg);
    }
    out << "\n";
  } else if (!r.classifier.error.empty()) {
    out << "classifier:  error: " << r.classifier.error << "\n";
  }
  if (!r.sections.values.empty()) {
    out << "sections:    ";
    bool first = true;
    for (const auto& [name, value] : r.sections.values) {
      out << (first ? "" : ", ") << name << " " << short_num(value);
      first = false;
    }
    out << "\n";
  }
  if (!r.sections.error.empty()) out << "sections:    error: " << r.sections.error << "\n";
  out << "verdict:     " << (r.pass ? "PASS" : "FAIL") << " (tolerance " << short_num(r.tolerance) << ")\n";
}

void write_csv(const RunReport& r, std::ostream& out) {
  std::vector<std::string> vars;
  if (r.config.contains("variables")) {
    vars = r.config.at("variables").get<std::vector<std::string>>();
  }
  const std::size_t p = r.verdict.samples.empty() ? 0 : static_cast<std::size_t>(r.verdict.samples.front().u.size());
  const std::size_t q = r.verdict.samples.empty() ? 0 : static_cast<std::size_t>(r.verdict.samples.front().t.size());
  std::string header;
  for (std::size_t k = 0; k < p; ++k) header += "u" + std::to_string(k + 1) + ",";
  for (std::size_t k = 0; k < q; ++k) header += "t" + std::to_string(k + 1) + ",";
  header += "residual";
  for (const auto& name : r.component_names) header += "," + name;
  header += ",route_angle,status\n";
  out << header;
  for (const SampleResult& s : r.verdict.samples) {
    std::string row;
    for (Eigen::Index k = 0; k < s.u.size(); ++k) row += num(s.u(k)) + ",";
    for (Eigen::Index k = 0; k < s.t.size(); ++k) row += num(s.t(k)) + ",";
    if (s.ok()) {
      row += num(s.residual);
      for (const auto& name : r.component_names) {
        double value = 0.0;
        for (const auto& [n, val] : s.components) {
          if (n == name) value = val;
        }
        row += "," + num(value);
      }
      row += "," + num(s.route_angle) + ",ok\n";
    } else {
      row += "nan";
      for (std::size_t k = 0; k < r.component_names.size(); ++k) row += ",nan";
      row += ",nan," + csv_quote("error: " + s.error) + "\n";
    }
    out << row;
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

IdentityCheckResult identity_check(int trials, int max_p, std::uint64_t seed) {
  if (trials < 1 || max_p < 1 || max_p > kMaxInvariantDim) throw ConfigError("identity-check needs trials >= 1 and 1 <= max-p <= 8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, max_p);
  IdentityCheckResult result;
  for (int trial = 0; trial < trials; ++trial) {
    const int p = dim(rng);
    Mat a(p, p), b(p, p);
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) {
        a(r, c) = unit(rng);
        b(r, c) = unit(rng);
      }
    }
    std::vector<Complex> ts{Complex(0.0, 1.0), Complex(0.0, -1.0)};
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Complex t(2.0 * unit(rng), 2.0 * unit(rng));
      const CMat m = CMat::Identity(p, p) + t * b.cast<Complex>();
      if (condition_number(m) <= 1e3) {
        ts.push_back(t);
        break;
      }
    }
    for (const Complex t : ts) {
      for (int j = 0; j <= p; ++j) {
        double res = 0.0;
        try {
          res = lemma_residual(a.cast<Complex>(), b.cast<Complex>(), j, t);
        } catch (const SingularMatrixError&) {
          continue;  // I + tB is singular for this draw; the identity does not apply.
        }
        ++result.instances;
        if (res > result.worst || result.instances == 1) {
          result.worst = res;
          result.worst_p = p;
          result.worst_j = j;
        }
      }
    }
  }
  return result;
}

}  // namespace twistcal
