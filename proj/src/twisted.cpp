#include "twistcal/twisted.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "twistcal/errors.hpp"
#include "twistcal/matrix_invariants.hpp"

namespace twistcal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Mat wedge(const Vec& a, const Vec& b) { return a * b.transpose() - b * a.transpose(); }

// Coordinates of an anti-self-dual 2-form (antisymmetric matrix) in the fixed Lambda^2_- basis.
Vec asd_coordinates(const Mat& m) {
  Vec c(3);
  c << 0.5 * (m(0, 1) - m(2, 3)), 0.5 * (m(0, 2) - m(3, 1)), 0.5 * (m(0, 3) - m(1, 2));
  return c;
}

void require_surface(const Immersion& imm, const char* variant) {
  if (imm.p() != 2 || imm.n() != 4) {
    throw ConfigError(std::string(variant) + " twist needs a surface in R^4, got p = " + std::to_string(imm.p()) +
                      ", n = " + std::to_string(imm.n()));
  }
}

void require_arity(const ScalarField& f, const Immersion& imm, const char* what) {
  if (const Expr* e = f.expression(); e != nullptr && e->variables() != imm.variables()) {
    throw ConfigError(std::string(what) + " must use the immersion's variables");
  }
}

// Directional derivative of a field along e_i.
double frame_derivative(const Jet1& jet, const FramePoint& fp, int i) { return jet.gradient.dot(fp.direction(i)); }

// Fibre frame of the twisted bundle at one base point: the columns spanning the fibre directions.
Mat fibre_directions(const TwistSpec& spec, const FramePoint& fp) {
  return std::visit(overloaded{[&](const SLTwist&) {
                                 const int n = fp.nu.rows();
                                 Mat f = Mat::Zero(2 * n, fp.q());
                                 f.bottomRows(n) = fp.nu;
                                 return f;
                               },
                               [&](const AssocTwist&) {
                                 Mat f = Mat::Zero(7, 1);
                                 f.topRows(3) = asd_frame(fp).col(0);
                                 return f;
                               },
                               [&](const CoassocTwist&) {
                                 Mat f = Mat::Zero(7, 2);
                                 f.topRows(3) = asd_frame(fp).rightCols(2);
                                 return f;
                               },
                               [&](const CayleyTwist&) {
                                 Mat f = Mat::Zero(8, 2);
                                 f.topRows(4) = spinor_frame(fp).leftCols(2);
                                 return f;
                               }},
                    spec);
}

Vec point_from_frame(const TwistSpec& spec, const FramePoint& fp, const Vec& t) {
  return std::visit(
      overloaded{[&](const SLTwist& s) {
                   const int n = static_cast<int>(fp.x.size());
                   Vec out(2 * n);
                   out.head(n) = fp.x;
                   out.tail(n) = fp.nu * t + one_form_calculus(fp, s.mu).mu_ambient;
                   return out;
                 },
                 [&](const AssocTwist& s) {
                   const Mat w = asd_frame(fp);
                   Vec out(7);
                   out.head(3) = t(0) * w.col(0) + s.alpha.value(fp.u) * w.col(1) + s.beta.value(fp.u) * w.col(2);
                   out.tail(4) = fp.x;
                   return out;
                 },
                 [&](const CoassocTwist& s) {
                   const Mat w = asd_frame(fp);
                   Vec out(7);
                   out.head(3) = s.gamma.value(fp.u) * w.col(0) + t(0) * w.col(1) + t(1) * w.col(2);
                   out.tail(4) = fp.x;
                   return out;
                 },
                 [&](const CayleyTwist& s) {
                   const Mat q = spinor_frame(fp);
                   Vec out(8);
                   out.head(4) = t(0) * q.col(0) + t(1) * q.col(1) + s.alpha.value(fp.u) * q.col(2) +
                                 s.beta.value(fp.u) * q.col(3);
                   out.tail(4) = fp.x;
                   return out;
                 }},
      spec);
}

Mat closed_form_E(const TwistSpec& spec, const FramePoint& fp, const Vec& t) {
  const int p = fp.p();
  return std::visit(
      overloaded{[&](const SLTwist& s) {
                   const int n = static_cast<int>(fp.x.size());
                   const OneFormCalculus calc = one_form_calculus(fp, s.mu);
                   const Mat a_nu = fp.shape_operator(t);
                   Mat e(2 * n, p);
                   for (int i = 0; i < p; ++i) {
                     Vec tangential = (a_nu.row(i) + calc.nabla.row(i)).transpose();
                     Vec normal(fp.q());
                     for (int l = 0; l < fp.q(); ++l) normal(l) = -calc.mu_frame.dot(fp.A[static_cast<std::size_t>(l)].row(i));
                     e.col(i).head(n) = fp.e.col(i);
                     e.col(i).tail(n) = fp.e * tangential + fp.nu * normal;
                   }
                   return e;
                 },
                 [&](const AssocTwist& s) {
                   const Mat w = asd_frame(fp);
                   const Jet1 alpha = s.alpha.jet(fp.u);
                   const Jet1 beta = s.beta.jet(fp.u);
                   Mat e(7, p);
                   for (int i = 0; i < p; ++i) {
                     const Mat dw = asd_frame_derivative(fp, i);
                     // Components of the derivative of the section in the omega frame.
                     const Vec d = t(0) * w.transpose() * dw.col(0) + alpha.value * w.transpose() * dw.col(1) +
                                   beta.value * w.transpose() * dw.col(2);
                     const double a_i = d(0);
                     const double b_i = d(1) + frame_derivative(alpha, fp, i);
                     const double c_i = d(2) + frame_derivative(beta, fp, i);
                     e.col(i).head(3) = a_i * w.col(0) + b_i * w.col(1) + c_i * w.col(2);
                     e.col(i).tail(4) = fp.e.col(i);
                   }
                   return e;
                 },
                 [&](const CoassocTwist& s) {
                   const Mat w = asd_frame(fp);
                   const Jet1 gamma = s.gamma.jet(fp.u);
                   Mat e(7, p);
                   for (int i = 0; i < p; ++i) {
                     const Mat dw = asd_frame_derivative(fp, i);
                     const Vec d = gamma.value * w.transpose() * dw.col(0) + t(0) * w.transpose() * dw.col(1) +
                                   t(1) * w.transpose() * dw.col(2);
                     const double a_i = d(0) + frame_derivative(gamma, fp, i);
                     e.col(i).head(3) = a_i * w.col(0) + d(1) * w.col(1) + d(2) * w.col(2);
                     e.col(i).tail(4) = fp.e.col(i);
                   }
                   return e;
                 },
                 [&](const CayleyTwist& s) {
                   const Mat q = spinor_frame(fp);
                   const Jet1 alpha = s.alpha.jet(fp.u);
                   const Jet1 beta = s.beta.jet(fp.u);
                   Mat e(8, p);
                   for (int i = 0; i < p; ++i) {
                     const Mat dq = spinor_frame_derivative(fp, i);
                     e.col(i).head(4) = t(1) * dq.col(1) + frame_derivative(alpha, fp, i) * q.col(2) +
                                        frame_derivative(beta, fp, i) * q.col(3) + alpha.value * dq.col(2) +
                                        beta.value * dq.col(3);
                     e.col(i).tail(4) = fp.e.col(i);
                   }
                   return e;
                 }},
      spec);
}

void check_fibre(const TwistSpec& spec, const Vec& t) {
  if (t.size() != fibre_dim(spec)) {
    throw std::invalid_argument("fibre point has " + std::to_string(t.size()) + " coordinates, expected " +
                                std::to_string(fibre_dim(spec)));
  }
}

}  // namespace

const Immersion& base_immersion(const TwistSpec& spec) {
  return std::visit([](const auto& s) -> const Immersion& { return s.immersion; }, spec);
}

Geometry geometry_of(const TwistSpec& spec) {
  return std::visit(overloaded{[](const SLTwist&) { return Geometry::special_lagrangian; },
                               [](const AssocTwist&) { return Geometry::g2; },
                               [](const CoassocTwist&) { return Geometry::g2; },
                               [](const CayleyTwist&) { return Geometry::spin7; }},
                    spec);
}

std::string variant_name(const TwistSpec& spec) {
  return std::visit(overloaded{[](const SLTwist&) { return "special_lagrangian"; },
                               [](const AssocTwist&) { return "associative"; },
                               [](const CoassocTwist&) { return "coassociative"; },
                               [](const CayleyTwist&) { return "cayley"; }},
                    spec);
}

int fibre_dim(const TwistSpec& spec) {
  return std::visit(overloaded{[](const SLTwist& s) { return s.immersion.q(); },
                               [](const AssocTwist&) { return 1; }, [](const CoassocTwist&) { return 2; },
                               [](const CayleyTwist&) { return 2; }},
                    spec);
}

int ambient_dim(const TwistSpec& spec) {
  return std::visit(overloaded{[](const SLTwist& s) { return 2 * s.immersion.n(); },
                               [](const AssocTwist&) { return 7; }, [](const CoassocTwist&) { return 7; },
                               [](const CayleyTwist&) { return 8; }},
                    spec);
}

void validate(const TwistSpec& spec) {
  std::visit(overloaded{[](const SLTwist& s) {
                          if (static_cast<int>(s.mu.size()) != s.immersion.p()) {
                            throw ConfigError("mu needs " + std::to_string(s.immersion.p()) + " coefficients, got " +
                                              std::to_string(s.mu.size()));
                          }
                          for (const auto& m : s.mu) require_arity(m, s.immersion, "mu");
                        },
                        [](const AssocTwist& s) {
                          require_surface(s.immersion, "associative");
                          require_arity(s.alpha, s.immersion, "alpha");
                          require_arity(s.beta, s.immersion, "beta");
                        },
                        [](const CoassocTwist& s) {
                          require_surface(s.immersion, "coassociative");
                          require_arity(s.gamma, s.immersion, "gamma");
                        },
                        [](const CayleyTwist& s) {
                          require_surface(s.immersion, "Cayley");
                          require_arity(s.alpha, s.immersion, "alpha");
                          require_arity(s.beta, s.immersion, "beta");
                        }},
             spec);
}

Mat asd_frame(const FramePoint& fp) {
  if (fp.p() != 2 || fp.q() != 2) throw GeometryError("anti-self-dual frame needs a surface in R^4");
  const Vec e1 = fp.e.col(0), e2 = fp.e.col(1), n1 = fp.nu.col(0), n2 = fp.nu.col(1);
  Mat w(3, 3);
  w.col(0) = asd_coordinates(wedge(e1, e2) - wedge(n1, n2));
  w.col(1) = asd_coordinates(wedge(e1, n1) - wedge(n2, e2));
  w.col(2) = asd_coordinates(wedge(e1, n2) - wedge(e2, n1));
  return w;
}

Mat asd_frame_derivative(const FramePoint& fp, int i) {
  const Mat w = asd_frame(fp);
  const Mat& a1 = fp.A[0];
  const Mat& a2 = fp.A[1];
  // Rotation of the normal frame relative to the tangent frame along e_i.
  const double gauge = fp.normal_connection[static_cast<std::size_t>(i)](1, 0) -
                       fp.tangent_connection[static_cast<std::size_t>(i)](1, 0);
  const double c12 = a2(i, 0) - a1(i, 1);   // <d omega^1, omega^2>
  const double c13 = -a1(i, 0) - a2(i, 1);  // <d omega^1, omega^3>
  Mat d(3, 3);
  d.col(0) = c12 * w.col(1) + c13 * w.col(2);
  d.col(1) = -c12 * w.col(0) + gauge * w.col(2);
  d.col(2) = -c13 * w.col(0) - gauge * w.col(1);
  return d;
}

Octonion tangent_octonion(const Vec& x) {
  if (x.size() != 4) throw std::invalid_argument("tangent vector must have 4 coordinates");
  Octonion o;
  for (std::size_t k = 0; k < 4; ++k) o[k + 4] = x(static_cast<Eigen::Index>(k));
  return o;
}

Octonion im_quaternion(const Vec& v) {
  if (v.size() != 3) throw std::invalid_argument("imaginary quaternion must have 3 coordinates");
  Octonion o;
  for (std::size_t k = 0; k < 3; ++k) o[k + 1] = v(static_cast<Eigen::Index>(k));
  return o;
}

namespace {

Vec quaternion_part(const Octonion& o) {
  Vec v(4);
  for (std::size_t k = 0; k < 4; ++k) v(static_cast<Eigen::Index>(k)) = o[k];
  return v;
}

}  // namespace

Mat spinor_frame(const FramePoint& fp) {
  const Mat w = asd_frame(fp);
  const Octonion one = Octonion::scalar(1.0);
  const Octonion j_left = clifford_act(tangent_octonion(fp.e.col(0)), clifford_act(tangent_octonion(fp.e.col(1)), one));
  const Octonion q3 = im_quaternion(w.col(1));
  Mat q(4, 4);
  q.col(0) = quaternion_part(one);
  q.col(1) = quaternion_part(j_left);
  q.col(2) = quaternion_part(q3);
  q.col(3) = quaternion_part(j_left * q3);
  return q;
}

Mat spinor_frame_derivative(const FramePoint& fp, int i) {
  const Mat& tangent = fp.tangent_connection[static_cast<std::size_t>(i)];
  // d_{e_i} e_l = sum_k <d e_l, e_k> e_k - sum_b A^b_{il} nu_b
  auto de = [&](int l) {
    Vec v = fp.e * tangent.col(l);
    for (int b = 0; b < fp.q(); ++b) v -= fp.A[static_cast<std::size_t>(b)](i, l) * fp.nu.col(b);
    return v;
  };
  const Octonion e1 = tangent_octonion(fp.e.col(0));
  const Octonion e2 = tangent_octonion(fp.e.col(1));
  const Octonion j_left = e1 * e2;
  const Octonion dj = tangent_octonion(de(0)) * e2 + e1 * tangent_octonion(de(1));
  const Mat w = asd_frame(fp);
  const Mat dw = asd_frame_derivative(fp, i);
  const Octonion q3 = im_quaternion(w.col(1));
  const Octonion dq3 = im_quaternion(dw.col(1));
  Mat d = Mat::Zero(4, 4);
  d.col(1) = quaternion_part(dj);
  d.col(2) = quaternion_part(dq3);
  d.col(3) = quaternion_part(dj * q3 + j_left * dq3);
  return d;
}

Vec ambient_point(const TwistSpec& spec, const Vec& u, const Vec& t) {
  check_fibre(spec, t);
  return point_from_frame(spec, adapted_frame(base_immersion(spec), u), t);
}

std::function<Vec(const Vec&, const Vec&)> build_ambient_immersion(const TwistSpec& spec) {
  validate(spec);
  return [spec](const Vec& u, const Vec& t) { return ambient_point(spec, u, t); };
}

Mat TwistedFrame::span() const {
  Mat out(E.rows(), E.cols() + F.cols());
  out << E, F;
  return out;
}

TwistedFrame twisted_frame(const TwistSpec& spec, const Vec& u, const Vec& t, FrameRoute route,
                           const FrameOptions& options) {
  check_fibre(spec, t);
  const Immersion& imm = base_immersion(spec);
  const FramePoint fp = adapted_frame(imm, u);
  TwistedFrame frame;
  frame.geometry = geometry_of(spec);
  frame.F = fibre_directions(spec, fp);
  if (route == FrameRoute::closed_form) {
    frame.E = closed_form_E(spec, fp, t);
    return frame;
  }

  if (!(options.step > 0.0) || options.richardson_levels < 0) throw std::invalid_argument("invalid differencing options");
  const int p = imm.p();
  const Eigen::Index dim = ambient_dim(spec);
  auto central = [&](int k, double h) {
    Vec up = u, down = u;
    up(k) += h;
    down(k) -= h;
    return Vec((ambient_point(spec, up, t) - ambient_point(spec, down, t)) / (2.0 * h));
  };
  Mat coordinate(dim, p);
  for (int k = 0; k < p; ++k) {
    // Richardson table on halved steps; each level removes the next even power of h.
    std::vector<Vec> row;
    double h = options.step;
    for (int level = 0; level <= options.richardson_levels; ++level, h *= 0.5) row.push_back(central(k, h));
    double factor = 4.0;
    for (int level = 1; level <= options.richardson_levels; ++level, factor *= 4.0) {
      for (std::size_t m = row.size() - 1; m >= static_cast<std::size_t>(level); --m) {
        row[m] = (factor * row[m] - row[m - 1]) / (factor - 1.0);
      }
    }
    coordinate.col(k) = row.back();
    if (!coordinate.col(k).allFinite()) throw GeometryError("non-finite value while differencing the immersion");
  }
  frame.E = coordinate * fp.chart_jacobian;
  return frame;
}

double route_agreement(const TwistSpec& spec, const Vec& u, const Vec& t, const FrameOptions& options) {
  const TwistedFrame closed = twisted_frame(spec, u, t, FrameRoute::closed_form, options);
  const TwistedFrame numeric = twisted_frame(spec, u, t, FrameRoute::numeric, options);
  return max_principal_angle(closed.span(), numeric.span());
}

CalibrationResidual calibration_residual(const TwistSpec& spec, const TwistedFrame& frame) {
  const Mat span = frame.span();
  return std::visit(
      overloaded{[&](const SLTwist& s) {
                   const SlResidualParts parts = sl_residual_parts(span, s.theta);
                   return CalibrationResidual{parts.total(), {{"phase", parts.phase}, {"symplectic", parts.symplectic}}};
                 },
                 [&](const AssocTwist&) {
                   const double r = associative_residual(span.col(0), span.col(1), span.col(2));
                   return CalibrationResidual{r, {{"associator", r}}};
                 },
                 [&](const CoassocTwist&) {
                   const double r = coassociative_residual(span);
                   return CalibrationResidual{r, {{"phi", r}}};
                 },
                 [&](const CayleyTwist&) {
                   const double r = cayley_residual(span);
                   return CalibrationResidual{r, {{"fourfold", r}}};
                 }},
      spec);
}

LagrangianCheck lagrangian_residual(const SLTwist& spec, const std::vector<Vec>& grid,
                                    const std::vector<Vec>& fibre_samples, const FrameOptions& options) {
  const TwistSpec wrapped = spec;
  validate(wrapped);
  LagrangianCheck out;
  for (const Vec& u : grid) {
    const OneFormCalculus calc = one_form_calculus(spec.immersion, spec.mu, u);
    for (const Vec& t : fibre_samples) {
      const TwistedFrame frame = twisted_frame(wrapped, u, t, FrameRoute::numeric, options);
      out.residual = std::max(out.residual, lagrangian_defect(frame.span()));
      for (Eigen::Index i = 0; i < frame.E.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < frame.E.cols(); ++j) {
          const double w = symplectic_eval(frame.E.col(i), frame.E.col(j));
          out.raw = std::max(out.raw, std::abs(w));
          out.identity_gap = std::max(out.identity_gap, std::abs(w + calc.dmu(i, j)));
        }
      }
    }
  }
  return out;
}

double phase_offset(int q, double theta) { return 0.5 * std::numbers::pi * q - theta; }

SlTheoremResidual sl_theorem_residual(const Mat& a, const Mat& b, double phi) {
  const Eigen::Index p = a.rows();
  if (a.cols() != p || b.rows() != p || b.cols() != p) throw std::invalid_argument("A and B must be p x p");
  const CMat id = CMat::Identity(p, p);
  const CMat ib = Complex(0.0, 1.0) * b.cast<Complex>();
  const CMat plus = a.cast<Complex>() * (id + ib).inverse();
  const CMat minus = a.cast<Complex>() * (id - ib).inverse();
  const Complex det = (id + ib).determinant();
  SlTheoremResidual out;
  const double entry0 = std::abs((std::polar(1.0, phi) * det).imag());
  out.raw.push_back(entry0);
  out.normalized.push_back(entry0 / (1.0 + std::abs(det)));
  const std::vector<Complex> sp = sym_polys(plus);
  const std::vector<Complex> sm = sym_polys(minus);
  for (Eigen::Index j = 1; j <= p; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    const std::size_t k = static_cast<std::size_t>(j);
    const double gap = std::abs(sp[k] - sign * sm[k]);
    out.raw.push_back(gap);
    out.normalized.push_back(gap / (1.0 + std::abs(sp[k]) + std::abs(sm[k])));
  }
  return out;
}

double sl_scaling_function(const Mat& a, const Mat& b, double theta, int q, double s) {
  const Eigen::Index p = a.rows();
  const CMat m = CMat::Identity(p, p) + Complex(0.0, 1.0) * (s * a + b).cast<Complex>();
  const Complex phase = std::polar(1.0, -theta) * std::pow(Complex(0.0, 1.0), q);
  return (phase * m.determinant()).imag();
}

double sl_scaling_scan(const Mat& a, const Mat& b, double theta, int q, const std::vector<double>& s_samples) {
  double worst = 0.0;
  for (double s : s_samples) worst = std::max(worst, std::abs(sl_scaling_function(a, b, theta, q, s)));
  return worst;
}

double sl_scaling_scan(const SLTwist& spec, const Vec& u, const Vec& normal_direction,
                       const std::vector<double>& s_samples) {
  const FramePoint fp = adapted_frame(spec.immersion, u);
  if (normal_direction.size() != fp.q()) throw std::invalid_argument("normal direction has wrong dimension");
  const OneFormCalculus calc = one_form_calculus(fp, spec.mu);
  return sl_scaling_scan(fp.shape_operator(normal_direction), calc.B, spec.theta, fp.q(), s_samples);
}

SpecialCaseResiduals sl_special_case_residuals(const Mat& a, const Mat& b, double phi) {
  const Eigen::Index p = a.rows();
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (b + b.transpose()));
  const Vec lambda = eig.eigenvalues();
  const Mat rotated = eig.eigenvectors().transpose() * a * eig.eigenvectors();

  const std::vector<Complex> sb = sym_polys(b);
  double real_part = 0.0;  // 1 - s2 + s4 - ...
  double imag_part = 0.0;  // s1 - s3 + s5 - ...
  for (std::size_t k = 0; k < sb.size(); ++k) {
    const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    (k % 2 == 0 ? real_part : imag_part) += sign * sb[k].real();
  }
  SpecialCaseResiduals out;
  out.j0 = std::abs(std::sin(phi) * real_part + std::cos(phi) * imag_part);
  for (Eigen::Index k = 0; k < p; ++k) out.j1 += rotated(k, k) / (1.0 + lambda(k) * lambda(k));
  out.j1 = std::abs(out.j1);
  const double det = a.determinant();
  const double parity = p % 2 == 0 ? 1.0 : -1.0;
  out.jp = std::abs(std::polar(1.0, 2.0 * phi) * det - parity * det);
  return out;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += workers) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

CalibrationVerdict calibration_verdict(const TwistSpec& spec, const std::vector<Vec>& grid,
                                       const std::vector<Vec>& fibre_samples, double tol,
                                       const VerdictOptions& options) {
  validate(spec);
  if (fibre_samples.empty()) throw ConfigError("fibre samples must not be empty");
  for (const Vec& t : fibre_samples) check_fibre(spec, t);

  CalibrationVerdict verdict;
  verdict.condition = variant_name(spec);
  verdict.tolerance = tol;
  verdict.samples.resize(grid.size() * fibre_samples.size());
  parallel_for(verdict.samples.size(), options.jobs, [&](std::size_t k) {
    SampleResult& r = verdict.samples[k];
    r.u = grid[k / fibre_samples.size()];
    r.t = fibre_samples[k % fibre_samples.size()];
    try {
      const TwistedFrame numeric = twisted_frame(spec, r.u, r.t, FrameRoute::numeric, options.frame);
      CalibrationResidual res = calibration_residual(spec, numeric);
      r.residual = res.value;
      r.components = std::move(res.components);
      if (options.check_routes) {
        const TwistedFrame closed = twisted_frame(spec, r.u, r.t, FrameRoute::closed_form, options.frame);
        r.route_angle = max_principal_angle(closed.span(), numeric.span());
      }
    } catch (const Error& e) {
      r.error = e.what();
    } catch (const std::invalid_argument& e) {
      r.error = e.what();
    }
  });

  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < verdict.samples.size(); ++k) {
    const SampleResult& r = verdict.samples[k];
    if (!r.ok()) {
      ++verdict.failed_samples;
      continue;
    }
    if (counted == 0 || r.residual > verdict.max) {
      verdict.max = r.residual;
      verdict.argmax = k;
    }
    sum += r.residual;
    ++counted;
    verdict.route_angle_max = std::max(verdict.route_angle_max, r.route_angle);
  }
  verdict.mean = counted ? sum / static_cast<double>(counted) : 0.0;
  verdict.pass = verdict.failed_samples == 0 && counted > 0 && verdict.max < tol;
  return verdict;
}

}  // namespace twistcal
