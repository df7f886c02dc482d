#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "twistcal/calibration.hpp"
#include "twistcal/errors.hpp"
#include "twistcal/scenarios.hpp"
#include "twistcal/twisted.hpp"

using namespace twistcal;

namespace {

const std::vector<std::string> kUV{"u", "v"};
const std::vector<std::string> kAB{"a", "b"};

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

OneForm form(std::initializer_list<const char*> coefficients, const std::vector<std::string>& vars = kUV) {
  OneForm mu;
  for (const char* c : coefficients) mu.emplace_back(Expr::parse(c, vars));
  return mu;
}

Immersion flat_plane() { return Immersion::parse({"u", "v", "0", "0"}, kUV); }
Immersion holomorphic_graph() { return Immersion::parse({"u", "v", "exp(u)*cos(v)", "exp(u)*sin(v)"}, kUV); }

SLTwist sl(const Immersion& imm, OneForm mu, double theta = std::numbers::pi) { return SLTwist{imm, std::move(mu), theta}; }

std::vector<Vec> unit_grid() { return box_grid(Vec::Constant(2, -0.5), Vec::Constant(2, 0.5), 5); }

// Symmetric matrix with prescribed eigenvalues in a random orthonormal basis.
Mat with_spectrum(std::mt19937_64& rng, const Vec& eigenvalues) {
  const Mat q = oracle::random_rotation(rng, static_cast<int>(eigenvalues.size()));
  return q * eigenvalues.asDiagonal() * q.transpose();
}

double max_f(const Mat& a, const Mat& b, double phi) {
  const int p = static_cast<int>(a.rows());
  std::vector<double> s;
  for (int k = 0; k < 20; ++k) s.push_back(-2.0 + 4.0 * k / 19.0);
  return sl_scaling_scan(a, b, phase_offset(p, phi), p, s);
}

double max_entry(const SlTheoremResidual& r) {
  double m = 0.0;
  for (double v : r.normalized) m = std::max(m, v);
  return m;
}

}  // namespace

TEST_SUITE("twisted") {
  TEST_CASE("variant bookkeeping") {
    const TwistSpec s = sl(flat_plane(), form({"0", "0"}));
    CHECK(variant_name(s) == "special_lagrangian");
    CHECK(fibre_dim(s) == 2);
    CHECK(ambient_dim(s) == 8);
    const TwistSpec a = AssocTwist{flat_plane(), Expr::parse("u", kUV), Expr::parse("v", kUV)};
    CHECK(fibre_dim(a) == 1);
    CHECK(ambient_dim(a) == 7);
    CHECK(geometry_of(a) == Geometry::g2);
    const TwistSpec c = CayleyTwist{flat_plane(), Expr::parse("u", kUV), Expr::parse("v", kUV)};
    CHECK(ambient_dim(c) == 8);
    CHECK(geometry_of(c) == Geometry::spin7);
    const Immersion three = Immersion::parse({"a", "b", "c", "0"}, {"a", "b", "c"});
    CHECK_THROWS_AS(validate(AssocTwist{three, Expr::parse("a", {"a", "b", "c"}), Expr::parse("b", {"a", "b", "c"})}),
                    ConfigError);
    CHECK_THROWS_AS(validate(sl(flat_plane(), form({"0"}))), ConfigError);
    CHECK_THROWS_AS(validate(CoassocTwist{flat_plane(), Expr::parse("a", kAB)}), ConfigError);
    CHECK_THROWS_AS(ambient_point(s, vec({0, 0}), vec({1})), std::invalid_argument);
  }

  TEST_CASE("ambient points") {
    const TwistSpec s = sl(flat_plane(), form({"0", "0"}));
    CHECK(ambient_point(s, vec({0.3, -0.7}), vec({0, 0})) == vec({0.3, -0.7, 0, 0, 0, 0, 0, 0}));
    CHECK(ambient_point(s, vec({0.3, -0.7}), vec({2, 5})) == vec({0.3, -0.7, 0, 0, 0, 0, 2, 5}));
    const auto h = build_ambient_immersion(s);
    CHECK(h(vec({1, 2}), vec({3, 4})) == ambient_point(s, vec({1, 2}), vec({3, 4})));

    const Scenario ruled = get_scenario("exp_associative_ruled");
    const Vec p = ambient_point(ruled.spec, vec({0, 0}), vec({1}));
    CHECK((p.head(3) - vec({0, 0, 1})).norm() < 1e-14);
    CHECK((p.tail(4) - vec({0, 0, 1, 0})).norm() < 1e-14);
  }

  TEST_CASE("spinor frame at the adapted point is 1, i, j, k") {
    const FramePoint fp = adapted_frame(flat_plane(), vec({0.1, 0.2}));
    CHECK(tangent_octonion(fp.e.col(0)) == Octonion::basis(4));
    CHECK(tangent_octonion(fp.e.col(1)) == Octonion::basis(5));
    CHECK(spinor_frame(fp) == Mat::Identity(4, 4));
  }

  TEST_CASE("spinor and anti-self-dual frames stay orthonormal and consistent") {
    const Immersion imm = holomorphic_graph();
    for (const Vec& u : unit_grid()) {
      const FramePoint fp = adapted_frame(imm, u);
      const Mat q = spinor_frame(fp);
      const Mat w = asd_frame(fp);
      CHECK((q.transpose() * q - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((w.transpose() * w - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(q.determinant() > 0.0);
      // q2 and q4 are the imaginary quaternions with the coordinates of omega^1 and omega^3.
      CHECK((q.col(1).tail(3) - w.col(0)).norm() < 1e-12);
      CHECK((q.col(3).tail(3) - w.col(2)).norm() < 1e-12);
      CHECK((q.col(2).tail(3) - w.col(1)).norm() < 1e-12);
    }
  }

  TEST_CASE("flat conormal frames are exact") {
    const TwistSpec s = sl(flat_plane(), form({"0", "0"}));
    for (FrameRoute route : {FrameRoute::closed_form, FrameRoute::numeric}) {
      const TwistedFrame f = twisted_frame(s, vec({0.2, 0.4}), vec({0.5, -1.0}), route);
      CHECK((f.E - Mat::Identity(8, 2)).cwiseAbs().maxCoeff() < (route == FrameRoute::closed_form ? 1e-15 : 1e-9));
      Mat fibre = Mat::Zero(8, 2);
      fibre(6, 0) = 1.0;
      fibre(7, 1) = 1.0;
      CHECK((f.F - fibre).cwiseAbs().maxCoeff() == 0.0);
      CHECK(f.span().cols() == 4);
    }
  }

  TEST_CASE("ruled associative frame reduces to the fibre-coordinate terms") {
    const Scenario ruled = get_scenario("exp_associative_ruled");
    const Immersion& imm = base_immersion(ruled.spec);
    const double t = 1.0;
    for (const Vec& u : unit_grid()) {
      const FramePoint fp = adapted_frame(imm, u);
      const Mat w = asd_frame(fp);
      const TwistedFrame closed = twisted_frame(ruled.spec, u, vec({t}), FrameRoute::closed_form);
      const TwistedFrame numeric = twisted_frame(ruled.spec, u, vec({t}), FrameRoute::numeric);
      for (int i = 0; i < 2; ++i) {
        const Vec coords = w.transpose() * closed.E.col(i).head(3);
        CHECK(std::abs(coords(0)) < 1e-12);
        CHECK(std::abs(coords(1) - t * (fp.A[1](i, 0) - fp.A[0](i, 1))) < 1e-12);
        CHECK(std::abs(coords(2) - t * (-fp.A[0](i, 0) - fp.A[1](i, 1))) < 1e-12);
        CHECK((closed.E.col(i) - numeric.E.col(i)).norm() < 1e-8);
      }
    }
  }

  TEST_CASE("closed-form and numeric E vectors agree modulo the fibre on random non-calibrated inputs") {
    const Immersion imm = Immersion::parse({"u", "v", "u^2 - v^3 + u*v", "sin(u) * v + u^3"}, kUV);
    const Expr a = Expr::parse("u*v + 0.3", kUV), b = Expr::parse("cos(u) - v^2", kUV);
    const TwistSpec specs[] = {sl(imm, form({"u*v", "sin(u+v)"}), 0.4), AssocTwist{imm, a, b}, CoassocTwist{imm, a},
                               CayleyTwist{imm, a, b}};
    const Vec fibres[] = {vec({0.7, -0.4}), vec({0.8}), vec({-0.3, 0.6}), vec({0.5, -0.9})};
    for (int k = 0; k < 4; ++k) {
      for (const Vec& u : {vec({0.1, -0.2}), vec({-0.4, 0.3})}) {
        const TwistedFrame closed = twisted_frame(specs[k], u, fibres[k], FrameRoute::closed_form);
        const TwistedFrame numeric = twisted_frame(specs[k], u, fibres[k], FrameRoute::numeric);
        CAPTURE(k);
        CAPTURE(u);
        // The closed form may drop fibre-direction terms, so compare modulo the fibre span.
        const Eigen::HouseholderQR<Mat> qr(numeric.F);
        const Mat f = qr.householderQ() * Mat::Identity(numeric.F.rows(), numeric.F.cols());
        const Mat gap = closed.E - numeric.E;
        CHECK((gap - f * (f.transpose() * gap)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((closed.F - numeric.F).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(route_agreement(specs[k], u, fibres[k]) < 1e-8);
      }
    }
  }

  TEST_CASE("routes agree on every scenario") {
    for (const std::string& name : scenario_names()) {
      const Scenario s = get_scenario(name);
      double worst = 0.0;
      for (const Vec& u : box_grid(s.lower, s.upper, s.resolution)) {
        for (const Vec& t : s.fibre_samples) worst = std::max(worst, route_agreement(s.spec, u, t, {1e-5, 1}));
      }
      CAPTURE(name);
      CHECK(worst < 1e-6);
    }
  }

  TEST_CASE("fibre scaling acts linearly on the closed-form frame") {
    const TwistSpec s = sl(holomorphic_graph(), form({"u*v", "u - v^2"}), 0.3);
    const Vec u = vec({0.2, -0.1});
    const Vec t = vec({0.6, -1.2});
    const Mat zero = twisted_frame(s, u, vec({0, 0}), FrameRoute::closed_form).E;
    const Mat one = twisted_frame(s, u, t, FrameRoute::closed_form).E;
    for (double scale : {-2.0, 0.5, 3.0}) {
      const Mat scaled = twisted_frame(s, u, scale * t, FrameRoute::closed_form).E;
      CHECK((scaled - zero - scale * (one - zero)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("lagrangian residual") {
    const auto grid = unit_grid();
    const auto fibre = default_fibre_samples(2);
    CHECK(lagrangian_residual(sl(flat_plane(), form({"0", "0"})), grid, fibre).residual < 1e-10);
    CHECK(lagrangian_residual(sl(holomorphic_graph(), form({"0", "0"})), grid, fibre).residual < 1e-10);
    CHECK(lagrangian_residual(sl(flat_plane(), form({"v", "u"})), grid, fibre).residual < 1e-9);
    const LagrangianCheck open = lagrangian_residual(sl(flat_plane(), form({"v", "0"})), grid, fibre);
    CHECK(open.raw >= 1.0 - 1e-9);
    CHECK(open.residual > 0.1);
    CHECK(open.identity_gap < 1e-8);
  }

  TEST_CASE("symplectic pairing of base vectors equals minus dmu") {
    const SLTwist cases[] = {sl(holomorphic_graph(), form({"1", "0"})), sl(flat_plane(), form({"v", "0"})),
                             sl(holomorphic_graph(), form({"v*exp(u)", "u^2"}))};
    bool saw_large = false;
    for (const SLTwist& s : cases) {
      for (const Vec& u : unit_grid()) {
        const FramePoint fp = adapted_frame(s.immersion, u);
        const auto calc = one_form_calculus(fp, s.mu);
        const TwistedFrame f = twisted_frame(s, u, vec({0.3, -0.8}), FrameRoute::numeric);
        const double omega = symplectic_eval(f.E.col(0), f.E.col(1));
        CHECK(std::abs(omega + calc.dmu(0, 1)) < 1e-8);
        if (std::abs(omega) >= 1.0 && std::abs(calc.dmu(0, 1)) >= 1.0) saw_large = true;
      }
    }
    CHECK(saw_large);
  }

  TEST_CASE("theorem residual examples") {
    Mat a(2, 2);
    a << 0.7, 0, 0, -0.7;
    const Mat zero = Mat::Zero(2, 2);
    CHECK(max_entry(sl_theorem_residual(a, zero, 0.0)) < 1e-15);

    Mat traced(2, 2);
    traced << 1.0, 0.3, 0.3, 0.5;
    const auto r = sl_theorem_residual(traced, zero, 0.0);
    CHECK(r.raw[0] < 1e-15);
    CHECK(r.raw[1] == doctest::Approx(2.0 * 1.5));
    CHECK(r.raw[2] < 1e-15);

    Mat b(2, 2);
    b << 0.8, 0, 0, -0.8;
    Mat traceless(2, 2);
    traceless << 0.4, -1.1, -1.1, -0.4;
    for (double v : sl_theorem_residual(traceless, b, 0.0).raw) CHECK(v < 1e-12);
  }

  TEST_CASE("special-case residuals") {
    std::mt19937_64 rng(41);
    for (int p = 1; p <= 4; ++p) {
      const Mat a = oracle::random_symmetric(rng, p);
      const auto r = sl_special_case_residuals(a, Mat::Zero(p, p), 0.0);
      CHECK(r.j0 < 1e-15);
      CHECK(r.j1 == doctest::Approx(std::abs(a.trace())));
      CHECK(r.jp == doctest::Approx(std::abs(a.determinant()) * std::abs(1.0 - std::pow(-1.0, p))));
    }
    Mat b(2, 2);
    b << 1, 0, 0, -1;
    CHECK(sl_special_case_residuals(oracle::random_symmetric(rng, 2), b, 0.0).j0 < 1e-15);

    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_int_distribution<int> dim(1, 4);
    for (int n = 0; n < 200; ++n) {
      const int p = dim(rng);
      const Mat a = oracle::random_symmetric(rng, p);
      const Mat bb = oracle::random_symmetric(rng, p);
      const double phi = angle(rng);
      const auto special = sl_special_case_residuals(a, bb, phi);
      const auto full = sl_theorem_residual(a, bb, phi);
      CHECK(std::abs(special.j0 - full.raw[0]) < 1e-10);
      CHECK(std::abs(2.0 * special.j1 - full.raw[1]) < 1e-10);
    }
  }

  TEST_CASE("scaling function and theorem residual detect the same cases") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    // Positive cases: B = 0 with odd invariants of A vanishing, or p = 2 with B = diag(l, -l) and A traceless.
    for (int n = 0; n < 60; ++n) {
      Mat a, b;
      if (n % 3 == 0) {
        const double x = d(rng), y = d(rng);
        const int p = 2 + n % 2 * 2;
        a = p == 2 ? with_spectrum(rng, vec({x, -x})) : with_spectrum(rng, vec({x, -x, y, -y}));
        b = Mat::Zero(p, p);
      } else if (n % 3 == 1) {
        a = with_spectrum(rng, vec({d(rng), -0.0, 0.0}));
        a = with_spectrum(rng, vec({a(0, 0) + 0.5, -(a(0, 0) + 0.5), 0.0}));
        b = Mat::Zero(3, 3);
      } else {
        const double l = d(rng), x = d(rng), y = d(rng);
        a = Mat(2, 2);
        a << x, y, y, -x;
        b = Mat(2, 2);
        b << l, 0, 0, -l;
      }
      CHECK(max_f(a, b, 0.0) < 1e-10);
      CHECK(max_entry(sl_theorem_residual(a, b, 0.0)) < 1e-8);
    }
    // Negative cases: perturb one condition.
    for (int n = 0; n < 200; ++n) {
      const int p = 2 + n % 3;
      Mat a = with_spectrum(rng, p == 3 ? vec({0.9, -0.9, 0.0}) : (p == 2 ? vec({0.7, -0.7}) : vec({0.5, -0.5, 1.0, -1.0})));
      Mat b = Mat::Zero(p, p);
      if (n % 2 == 0) {
        a += (0.01 + 0.1 * std::abs(d(rng))) * Mat::Identity(p, p);
      } else {
        b = oracle::random_symmetric(rng, p);
        b += (0.05 + 0.1 * std::abs(d(rng))) * Mat::Identity(p, p);
      }
      CHECK(max_f(a, b, 0.0) > 1e-4);
      CHECK(max_entry(sl_theorem_residual(a, b, 0.0)) > 1e-8);
    }
    // Random cases agree in both directions.
    for (int n = 0; n < 100; ++n) {
      const int p = 1 + n % 4;
      const Mat a = oracle::random_symmetric(rng, p), b = oracle::random_symmetric(rng, p);
      const double phi = d(rng);
      CHECK((max_f(a, b, phi) < 1e-10) == (max_entry(sl_theorem_residual(a, b, phi)) < 1e-8));
    }
  }

  TEST_CASE("scaling scans over immersions") {
    const std::vector<double> s{-2, -1, 0, 1, 2};
    CHECK(sl_scaling_scan(sl(flat_plane(), form({"0", "0"})), vec({0.1, 0.2}), vec({1, 0}), s) < 1e-15);
    const SLTwist holo = sl(holomorphic_graph(), form({"1", "0"}), std::numbers::pi);
    for (const Vec& u : unit_grid()) {
      CHECK(sl_scaling_scan(holo, u, vec({1, 0}), s) < 1e-6);
      CHECK(sl_scaling_scan(holo, u, vec({0.6, 0.8}), s) < 1e-6);
    }
    const SLTwist para = sl(Immersion::parse({"u", "v", "u^2+v^2", "0"}, kUV), form({"0", "0"}), std::numbers::pi);
    CHECK(sl_scaling_scan(para, vec({0, 0}), vec({1, 0}), s) > 0.1);
  }

  TEST_CASE("verdict examples") {
    const auto grid = unit_grid();
    const TwistSpec flat = CoassocTwist{flat_plane(), Expr::parse("1.5", kUV)};
    const auto pass = calibration_verdict(flat, grid, default_fibre_samples(2), 1e-10);
    CHECK(pass.pass);
    CHECK(pass.samples.size() == 225);
    CHECK(pass.failed_samples == 0);

    const Scenario anti = get_scenario("exp_associative_antiholo");
    const auto fail = calibration_verdict(anti.spec, grid, anti.fibre_samples, 1e-6);
    CHECK_FALSE(fail.pass);
    CHECK(fail.max > 1e-2);
    CHECK(fail.samples[fail.argmax].residual == fail.max);

    CHECK_THROWS_AS(calibration_verdict(flat, grid, {}, 1e-6), ConfigError);
  }

  TEST_CASE("verdicts survive reparametrizing the base") {
    // u = a + 0.1 b^2, v = b; the 1-form is pulled back along the same map.
    const Immersion repar =
        Immersion::parse({"a + 0.1*b^2", "b", "exp(a + 0.1*b^2)*cos(b)", "exp(a + 0.1*b^2)*sin(b)"}, kAB);
    const SLTwist harmonic{repar, form({"1", "0.2*b"}, kAB), std::numbers::pi};
    const SLTwist nonharmonic{repar, form({"a + 0.1*b^2", "(a + 0.1*b^2)*0.2*b"}, kAB), std::numbers::pi};
    const auto grid = unit_grid();
    const auto fibre = default_fibre_samples(2);
    const auto original_pass = calibration_verdict(get_scenario("holograph_sl_harmonic").spec, grid, fibre, 1e-6);
    const auto original_fail = calibration_verdict(get_scenario("holograph_sl_nonharmonic").spec, grid, fibre, 1e-6);
    CHECK(original_pass.pass);
    CHECK_FALSE(original_fail.pass);
    CHECK(calibration_verdict(harmonic, grid, fibre, 1e-6).pass == original_pass.pass);
    CHECK(calibration_verdict(nonharmonic, grid, fibre, 1e-6).pass == original_fail.pass);
  }

  TEST_CASE("verdicts are identical for any number of jobs") {
    const Scenario s = get_scenario("exp_cayley_nonholo");
    const auto grid = box_grid(s.lower, s.upper, s.resolution);
    VerdictOptions one, many;
    many.jobs = 8;
    const auto a = calibration_verdict(s.spec, grid, s.fibre_samples, 1e-6, one);
    const auto b = calibration_verdict(s.spec, grid, s.fibre_samples, 1e-6, many);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      CHECK(a.samples[k].residual == b.samples[k].residual);
      CHECK(a.samples[k].route_angle == b.samples[k].route_angle);
      CHECK(a.samples[k].u == b.samples[k].u);
    }
    CHECK(a.max == b.max);
    CHECK(a.mean == b.mean);
    CHECK(a.argmax == b.argmax);
  }

  TEST_CASE("sample failures are recorded, not thrown") {
    const Immersion degenerate = Immersion::parse({"u", "u", "0", "0"}, kUV);
    const auto v = calibration_verdict(sl(degenerate, form({"0", "0"})), unit_grid(), default_fibre_samples(2), 1e-6);
    CHECK(v.failed_samples == v.samples.size());
    CHECK_FALSE(v.pass);
    CHECK(v.samples[0].error.find("rank") != std::string::npos);
  }

  TEST_CASE("parallel loop") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 7, [&](std::size_t k) { hits[k] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t k) {
                      if (k == 6) throw GeometryError("boom");
                    }),
                    GeometryError);
  }
}
