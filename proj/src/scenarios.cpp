#include "twistcal/scenarios.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "twistcal/errors.hpp"
#include "twistcal/sections.hpp"

namespace twistcal {

namespace {

const std::vector<std::string> kPlane{"u", "v"};
const std::vector<std::string> kExample{"x", "y"};

Expr ex(const std::string& text, const std::vector<std::string>& vars) { return Expr::parse(text, vars); }

Immersion flat_plane() { return Immersion::parse({"u", "v", "0", "0"}, kPlane); }
Immersion holomorphic_graph_uv() { return Immersion::parse({"u", "v", "exp(u)*cos(v)", "exp(u)*sin(v)"}, kPlane); }

Vec square(double half) { return Vec::Constant(2, half); }

Scenario make(std::string name, TwistSpec spec, Expectation expected, double tol, std::string provenance) {
  Scenario s{std::move(name), std::move(spec), -square(0.5), square(0.5), 5, {}, expected, tol, std::move(provenance)};
  s.fibre_samples = default_fibre_samples(fibre_dim(s.spec));
  return s;
}

AssocTwist exp_assoc(const std::string& alpha, const std::string& beta) {
  return AssocTwist{exp_graph(), ex(alpha, kExample), ex(beta, kExample)};
}

CayleyTwist exp_cayley_from_family(double beta_sign) {
  const YIndependentFamily fam = solve_y_independent_family(0.5, 2.0, -1.0, 1.0, 1e-3, beta_sign);
  return CayleyTwist{exp_graph(), fam.alpha_field(kExample), fam.beta_field(kExample)};
}

// Orientation of the e^z graph for which the pairing of the positively oriented frame holds.
Immersion classifier_selected_graph() {
  const std::vector<Vec> grid = box_grid(-square(0.5), square(0.5), 5);
  for (const Immersion& candidate : {exp_graph(), exp_graph_mirror()}) {
    if (classify_residuals(candidate, grid).superminimal_neg < 1e-8) return candidate;
  }
  throw GeometryError("neither orientation of the e^z graph is negative superminimal");
}

using Factory = std::function<Scenario()>;

const std::vector<std::pair<std::string, Factory>>& registry() {
  static const std::vector<std::pair<std::string, Factory>> entries{
      {"exp_associative",
       [] {
         return make("exp_associative", exp_assoc("1/(1+exp(2*x))", "1*(1+exp(2*x))"), Expectation::pass, 1e-6,
                     "explicit non-ruled associative example over the graph of e^z, alpha = C/(1+e^{2x}), "
                     "beta = K(1+e^{2x}), C = K = 1");
       }},
      {"exp_associative_ruled",
       [] {
         return make("exp_associative_ruled", exp_assoc("0", "0"), Expectation::pass, 1e-6,
                     "C = K = 0: the ruled associative bundle over the e^z graph");
       }},
      {"exp_associative_antiholo",
       [] {
         return make("exp_associative_antiholo", exp_assoc("1/(1+exp(2*x))", "-(1+exp(2*x))"), Expectation::fail,
                     1e-6, "control: beta replaced by -beta");
       }},
      {"exp_associative_decaying",
       [] {
         return make("exp_associative_decaying", exp_assoc("1/(1+exp(2*x))", "1/(1+exp(2*x))"), Expectation::pass,
                     1e-6,
                     "y-independent holomorphic family with both coefficients decaying, alpha = beta = 1/(1+e^{2x})");
       }},
      {"flat_conormal_sl",
       [] {
         return make("flat_conormal_sl", SLTwist{flat_plane(), {ex("0", kPlane), ex("0", kPlane)}, std::numbers::pi},
                     Expectation::pass, 1e-6, "conormal bundle of a plane in R^4, phase i^2");
       }},
      {"holograph_sl_harmonic",
       [] {
         return make("holograph_sl_harmonic",
                     SLTwist{holomorphic_graph_uv(), {ex("1", kPlane), ex("0", kPlane)}, std::numbers::pi},
                     Expectation::pass, 1e-6, "minimal surface with harmonic mu = du^1, phase i^2");
       }},
      {"holograph_sl_nonharmonic",
       [] {
         return make("holograph_sl_nonharmonic",
                     SLTwist{holomorphic_graph_uv(), {ex("u", kPlane), ex("0", kPlane)}, std::numbers::pi},
                     Expectation::fail, 1e-6, "control: mu = u^1 du^1 is closed but not coclosed");
       }},
      {"borisenko_exact",
       [] {
         return make("borisenko_exact", SLTwist{flat_plane(), {ex("v", kPlane), ex("u", kPlane)}, std::numbers::pi},
                     Expectation::pass, 1e-6, "exact harmonic mu = d(u^1 u^2) over a plane");
       }},
      {"paraboloid_conormal_sl",
       [] {
         return make("paraboloid_conormal_sl",
                     SLTwist{Immersion::parse({"u", "v", "u^2+v^2", "0"}, kPlane), {ex("0", kPlane), ex("0", kPlane)},
                             std::numbers::pi},
                     Expectation::fail, 1e-6, "control: paraboloid is not minimal (trace A = -4 at the origin)");
       }},
      {"flat_coassociative",
       [] {
         return make("flat_coassociative", CoassocTwist{flat_plane(), ex("1", kPlane)}, Expectation::pass, 1e-10,
                     "plane with constant gamma");
       }},
      {"flat_coassociative_nonparallel",
       [] {
         return make("flat_coassociative_nonparallel", CoassocTwist{flat_plane(), ex("u", kPlane)}, Expectation::fail,
                     1e-6, "control: gamma = u^1 is not parallel");
       }},
      {"graph_coassociative",
       [] {
         return make("graph_coassociative", CoassocTwist{classifier_selected_graph(), ex("1", kExample)},
                     Expectation::pass, 1e-6,
                     "e^z graph in the orientation the classifier finds negative superminimal, gamma = 1");
       }},
      {"exp_cayley",
       [] {
         return make("exp_cayley", exp_cayley_from_family(1.0), Expectation::pass, 1e-6,
                     "Cayley twist over the e^z graph, (alpha, beta) integrated from alpha(0) = 1/2, beta(0) = 2 "
                     "with alpha' = -k alpha, beta' = k beta");
       }},
      {"exp_cayley_decaying",
       [] {
         return make("exp_cayley_decaying", exp_cayley_from_family(-1.0), Expectation::pass, 1e-6,
                     "Cayley twist over the e^z graph, (alpha, beta) integrated from alpha(0) = 1/2, beta(0) = 2 "
                     "with alpha' = -k alpha, beta' = -k beta");
       }},
      {"exp_cayley_nonholo",
       [] {
         return make("exp_cayley_nonholo", CayleyTwist{exp_graph(), ex("x", kExample), ex("y", kExample)},
                     Expectation::fail, 1e-6, "control: alpha = x, beta = y is not holomorphic");
       }},
  };
  return entries;
}

// Anti-self-dual frame of the graph of a holomorphic function with real part u, written with
// the Cauchy-Riemann equations: columns omega^1, omega^2, omega^3.
Mat holomorphic_graph_asd_frame(double ux, double uy) {
  const double n = 1.0 + ux * ux + uy * uy;
  Mat w(3, 3);
  w.col(0) << 1.0 - ux * ux - uy * uy, 2.0 * uy, 2.0 * ux;
  w.col(1) << -2.0 * uy, 1.0 + ux * ux - uy * uy, -2.0 * ux * uy;
  w.col(2) << -2.0 * ux, -2.0 * ux * uy, 1.0 - ux * ux + uy * uy;
  return w / n;
}

}  // namespace

std::vector<Vec> default_fibre_samples(int dim, int extra_random, std::uint64_t seed) {
  std::vector<Vec> out;
  int total = 1;
  for (int d = 0; d < dim; ++d) total *= 3;
  for (int k = 0; k < total; ++k) {
    Vec t(dim);
    int rest = k;
    for (int d = dim - 1; d >= 0; --d) {
      t(d) = static_cast<double>(rest % 3) - 1.0;
      rest /= 3;
    }
    out.push_back(t);
  }
  std::mt19937_64 rng(seed);
  for (int r = 0; r < extra_random; ++r) {
    Vec t(dim);
    // 53 random bits mapped to [0, 1), then to [-1, 1); no library distribution so values are
    // identical across standard library implementations.
    for (int d = 0; d < dim; ++d) t(d) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    out.push_back(t);
  }
  return out;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, factory] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

Scenario get_scenario(const std::string& name) {
  for (const auto& [key, factory] : registry()) {
    if (key == name) return factory();
  }
  std::string msg = "unknown scenario '" + name + "'; registered:";
  for (const auto& n : scenario_names()) msg += " " + n;
  throw ConfigError(msg);
}

Immersion exp_graph() { return Immersion::parse({"x", "y", "exp(x)*cos(y)", "exp(x)*sin(y)"}, kExample); }
Immersion exp_graph_mirror() { return Immersion::parse({"x", "y", "exp(x)*cos(y)", "-exp(x)*sin(y)"}, kExample); }

Vec exp_example_coords(double x, double y, double t, double c, double k) {
  const double ux = std::exp(x) * std::cos(y);
  const double uy = -std::exp(x) * std::sin(y);
  const Mat w = holomorphic_graph_asd_frame(ux, uy);
  const double e2 = std::exp(2.0 * x);
  const double alpha = c / (1.0 + e2);
  const double beta = k * (1.0 + e2);
  Vec out(7);
  out.head(3) = t * w.col(0) + alpha * w.col(1) + beta * w.col(2);
  out.tail(4) << x, y, std::exp(x) * std::cos(y), std::exp(x) * std::sin(y);
  return out;
}

Vec exp_display_coords(double x, double y, double t, double c, double k) {
  const double e1 = std::exp(x), e2 = std::exp(2.0 * x), e3 = std::exp(3.0 * x), e4 = std::exp(4.0 * x);
  const double den = 1.0 + 2.0 * e2 + e4;
  const double sq = (1.0 + e2) * (1.0 + e2);
  Vec out(7);
  out(0) = (t - t * e4 + 2.0 * c * e1 * std::sin(y) - 2.0 * k * e1 * std::cos(y) * sq) / den;
  out(1) = (-2.0 * t * e1 * std::sin(y) - 2.0 * t * e3 * std::sin(y) + c * (1.0 + 2.0 * e2 * std::cos(2.0 * y)) +
            k * sq * e2 * std::sin(2.0 * y)) /
           den;
  out(2) = (2.0 * t * e1 * std::cos(y) + 2.0 * t * e3 * std::cos(y) + c * e2 * std::sin(2.0 * y) +
            k * sq * (1.0 - e2 * std::cos(2.0 * y))) /
           den;
  out(3) = x;
  out(4) = y;
  out(5) = e1 * std::cos(y);
  out(6) = e1 * std::sin(y);
  return out;
}

}  // namespace twistcal
