#include "twistcal/sections.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "twistcal/errors.hpp"
#include "twistcal/twisted.hpp"

namespace twistcal {

namespace {

// Derivative of the frame field along e_i, by central differences with Richardson extrapolation.
Mat frame_derivative(const Immersion& imm, const BundleFrameField& field, const FramePoint& fp, int i,
                     const DifferenceOptions& options) {
  const Vec d = fp.direction(i);
  auto central = [&](double h) {
    const Mat up = field.frames(adapted_frame(imm, fp.u + h * d));
    const Mat down = field.frames(adapted_frame(imm, fp.u - h * d));
    return Mat((up - down) / (2.0 * h));
  };
  std::vector<Mat> row;
  double h = options.step;
  for (int level = 0; level <= options.richardson_levels; ++level, h *= 0.5) row.push_back(central(h));
  double factor = 4.0;
  for (int level = 1; level <= options.richardson_levels; ++level, factor *= 4.0) {
    for (std::size_t m = row.size() - 1; m >= static_cast<std::size_t>(level); --m) {
      row[m] = (factor * row[m] - row[m - 1]) / (factor - 1.0);
    }
  }
  return row.back();
}

void require_rank(const Mat& frame, Eigen::Index rank, const std::string& name) {
  if (frame.cols() != rank) {
    throw std::invalid_argument("bundle frame '" + name + "' has rank " + std::to_string(frame.cols()) +
                                ", expected " + std::to_string(rank));
  }
}

double hermite(double x0, double x1, double f0, double f1, double d0, double d1, double x, double* slope) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  if (slope != nullptr) {
    const double g00 = 6 * s2 - 6 * s, g10 = 3 * s2 - 4 * s + 1, g01 = -6 * s2 + 6 * s, g11 = 3 * s2 - 2 * s;
    *slope = (g00 * f0 + g01 * f1) / h + g10 * d0 + g11 * d1;
  }
  return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
}

ScalarField tabulated_field(std::shared_ptr<const std::vector<double>> xs, std::shared_ptr<const std::vector<double>> fs,
                            double rate_sign, std::size_t dim, std::string label) {
  auto fn = [xs, fs, rate_sign, dim, label](const Vec& u) {
    const double x = u(0);
    const std::vector<double>& grid = *xs;
    if (!(x >= grid.front() && x <= grid.back())) {
      throw DomainError("outside tabulated range [" + std::to_string(grid.front()) + ", " +
                            std::to_string(grid.back()) + "]",
                        label);
    }
    std::size_t k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin());
    k = std::clamp<std::size_t>(k, 1, grid.size() - 1);
    const double f0 = (*fs)[k - 1], f1 = (*fs)[k];
    const double d0 = rate_sign * family_rate(grid[k - 1]) * f0;
    const double d1 = rate_sign * family_rate(grid[k]) * f1;
    Jet1 jet;
    jet.gradient = Vec::Zero(static_cast<Eigen::Index>(dim));
    double slope = 0.0;
    jet.value = hermite(grid[k - 1], grid[k], f0, f1, d0, d1, x, &slope);
    jet.gradient(0) = slope;
    return jet;
  };
  return ScalarField(fn, std::move(label));
}

}  // namespace

BundleFrameField asd_complement_bundle() {
  return {"omega23", [](const FramePoint& fp) { return Mat(asd_frame(fp).rightCols(2)); }};
}

BundleFrameField asd_line_bundle() {
  return {"omega1", [](const FramePoint& fp) { return Mat(asd_frame(fp).col(0)); }};
}

BundleFrameField negative_spinor_bundle() {
  return {"q34", [](const FramePoint& fp) { return Mat(spinor_frame(fp).rightCols(2)); }};
}

BundleFrameField constant_bundle(Mat frame, std::string name) {
  return {std::move(name), [frame](const FramePoint&) { return frame; }};
}

double dbar_residual(const Immersion& imm, const BundleFrameField& frames, const ScalarField& alpha,
                     const ScalarField& beta, const Vec& u, const DifferenceOptions& options) {
  if (imm.p() != 2) throw std::invalid_argument("dbar residual needs a surface");
  const FramePoint fp = adapted_frame(imm, u);
  const Mat s = frames.frames(fp);
  require_rank(s, 2, frames.name);
  const Jet1 a = alpha.jet(u);
  const Jet1 b = beta.jet(u);
  Vec along_s2(2), along_s3(2);
  for (int i = 0; i < 2; ++i) {
    const Mat ds = frame_derivative(imm, frames, fp, i, options);
    const Vec d = fp.direction(i);
    const Vec derivative = a.gradient.dot(d) * s.col(0) + b.gradient.dot(d) * s.col(1) + a.value * ds.col(0) +
                           b.value * ds.col(1);
    along_s2(i) = derivative.dot(s.col(0));
    along_s3(i) = derivative.dot(s.col(1));
  }
  // (pi nabla_1 sigma) + J (pi nabla_2 sigma) in the (s2, s3) frame.
  return std::hypot(along_s2(0) - along_s3(1), along_s3(0) + along_s2(1));
}

double parallel_residual(const Immersion& imm, const BundleFrameField& frame, const ScalarField& gamma, const Vec& u,
                         const DifferenceOptions& options) {
  const FramePoint fp = adapted_frame(imm, u);
  const Mat s = frame.frames(fp);
  require_rank(s, 1, frame.name);
  const Jet1 g = gamma.jet(u);
  double total = 0.0;
  for (int i = 0; i < fp.p(); ++i) {
    const Mat ds = frame_derivative(imm, frame, fp, i, options);
    const Vec derivative = g.gradient.dot(fp.direction(i)) * s.col(0) + g.value * ds.col(0);
    total += std::abs(derivative.dot(s.col(0)));
  }
  return total;
}

HarmonicResidual harmonic_residual(const Immersion& imm, const OneForm& mu, const std::vector<Vec>& grid) {
  HarmonicResidual out;
  for (const Vec& u : grid) {
    const OneFormCalculus calc = one_form_calculus(imm, mu, u);
    std::vector<Jet1> jets;
    for (const ScalarField& c : mu) jets.push_back(c.jet(u));
    for (std::size_t i = 0; i < jets.size(); ++i) {
      for (std::size_t j = i + 1; j < jets.size(); ++j) {
        const double curl = jets[j].gradient(static_cast<Eigen::Index>(i)) - jets[i].gradient(static_cast<Eigen::Index>(j));
        out.closedness = std::max(out.closedness, std::abs(curl));
      }
    }
    out.coclosedness = std::max(out.coclosedness, std::abs(calc.B.trace()));
  }
  return out;
}

double family_rate(double x) {
  const double e2 = std::exp(2.0 * x);
  return 2.0 * e2 / (1.0 + e2);
}

YIndependentFamily solve_y_independent_family(double alpha0, double beta0, double x_min, double x_max, double step,
                                              double beta_sign) {
  if (!(x_min <= 0.0 && 0.0 <= x_max) || !(step > 0.0)) {
    throw std::invalid_argument("family range must contain x = 0 and the step must be positive");
  }
  // One RK4 run from 0 towards `end`; returns the visited (x, alpha, beta) triples.
  auto integrate = [&](double end) {
    std::vector<std::array<double, 3>> out{{0.0, alpha0, beta0}};
    const int steps = static_cast<int>(std::ceil(std::abs(end) / step - 1e-9));
    if (steps == 0) return out;
    const double h = end / steps;
    double a = alpha0, b = beta0;
    auto rhs = [&](double x, double av, double bv) {
      const double k = family_rate(x);
      return std::array<double, 2>{-k * av, beta_sign * k * bv};
    };
    for (int n = 0; n < steps; ++n) {
      const double x = n * h;
      const auto k1 = rhs(x, a, b);
      const auto k2 = rhs(x + 0.5 * h, a + 0.5 * h * k1[0], b + 0.5 * h * k1[1]);
      const auto k3 = rhs(x + 0.5 * h, a + 0.5 * h * k2[0], b + 0.5 * h * k2[1]);
      const auto k4 = rhs(x + h, a + h * k3[0], b + h * k3[1]);
      a += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      b += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      out.push_back({(n + 1) * h, a, b});
    }
    return out;
  };
  const auto left = integrate(x_min);
  const auto right = integrate(x_max);
  YIndependentFamily fam;
  fam.beta_sign = beta_sign;
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    fam.x.push_back((*it)[0]);
    fam.alpha.push_back((*it)[1]);
    fam.beta.push_back((*it)[2]);
  }
  for (std::size_t k = 1; k < right.size(); ++k) {
    fam.x.push_back(right[k][0]);
    fam.alpha.push_back(right[k][1]);
    fam.beta.push_back(right[k][2]);
  }
  return fam;
}

ScalarField YIndependentFamily::alpha_field(std::vector<std::string> variables) const {
  return tabulated_field(std::make_shared<const std::vector<double>>(x), std::make_shared<const std::vector<double>>(alpha),
                         -1.0, variables.size(), "alpha(ode)");
}

ScalarField YIndependentFamily::beta_field(std::vector<std::string> variables) const {
  return tabulated_field(std::make_shared<const std::vector<double>>(x), std::make_shared<const std::vector<double>>(beta),
                         beta_sign, variables.size(), "beta(ode)");
}

void YIndependentFamily::write_csv(std::ostream& out) const {
  out << "x,alpha,beta\n";
  char buf[128];
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[k], alpha[k], beta[k]);
    out << buf;
  }
}

}  // namespace twistcal
