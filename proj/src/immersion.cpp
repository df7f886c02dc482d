#include "twistcal/immersion.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "twistcal/errors.hpp"
#include "twistcal/matrix_invariants.hpp"

namespace twistcal {

namespace {

constexpr double kRankThreshold = 1e-8;
constexpr double kNormalPivot = 1e-8;
constexpr std::uint64_t kAusteritySeed = 0x5eed5eedULL;

// Strictly lower triangular part minus its transpose: the antisymmetric matrix sharing the
// strict lower triangle of w.
Mat antisymmetric_from_lower(const Mat& w) {
  Mat low = w.triangularView<Eigen::StrictlyLower>();
  return low - low.transpose();
}

// d^2x contracted with parameter directions a and b.
Vec second_derivative(const std::vector<Mat>& hessians, const Vec& a, const Vec& b) {
  Vec out(static_cast<Eigen::Index>(hessians.size()));
  for (std::size_t c = 0; c < hessians.size(); ++c) out(static_cast<Eigen::Index>(c)) = a.dot(hessians[c] * b);
  return out;
}

// Directional derivative of the Jacobian along parameter direction d: column l is d^2x(d, d_l).
Mat jacobian_derivative(const std::vector<Mat>& hessians, const Vec& d, int p) {
  Mat out(static_cast<Eigen::Index>(hessians.size()), p);
  for (std::size_t c = 0; c < hessians.size(); ++c) out.row(static_cast<Eigen::Index>(c)) = (hessians[c] * d).transpose();
  return out;
}

}  // namespace

Immersion::Immersion(std::vector<Expr> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("immersion needs at least one component");
  p_ = static_cast<int>(components_.front().variables().size());
  for (const auto& c : components_) {
    if (c.variables() != components_.front().variables()) {
      throw std::invalid_argument("immersion components must share one variable list");
    }
  }
  if (p_ < 1 || p_ > kMaxDomainDim) throw std::invalid_argument("immersion domain dimension must be 1..4");
  if (n() > kMaxAmbientDim || n() <= p_) {
    throw std::invalid_argument("immersion needs p < n <= 8, got p = " + std::to_string(p_) +
                                ", n = " + std::to_string(n()));
  }
}

Immersion Immersion::parse(const std::vector<std::string>& components, std::vector<std::string> variables,
                           const std::map<std::string, double>& constants) {
  std::vector<Expr> exprs;
  exprs.reserve(components.size());
  for (const auto& text : components) exprs.push_back(Expr::parse(text, variables, constants));
  return Immersion(std::move(exprs));
}

Immersion::Jets Immersion::jets(const Vec& u) const {
  if (u.size() != p_) throw std::invalid_argument("parameter point has wrong dimension");
  const std::span<const double> point(u.data(), static_cast<std::size_t>(u.size()));
  Jets out{Vec(n()), Mat(n(), p_), {}};
  out.hessians.reserve(components_.size());
  for (int c = 0; c < n(); ++c) {
    Jet2 j = components_[static_cast<std::size_t>(c)].jet(point);
    out.x(c) = j.value;
    out.jacobian.row(c) = j.gradient.transpose();
    out.hessians.push_back(std::move(j.hessian));
  }
  return out;
}

Vec Immersion::point(const Vec& u) const {
  const std::span<const double> pt(u.data(), static_cast<std::size_t>(u.size()));
  Vec x(n());
  for (int c = 0; c < n(); ++c) x(c) = components_[static_cast<std::size_t>(c)].value(pt);
  return x;
}

Mat FramePoint::shape_operator(const Vec& t) const {
  Mat out = Mat::Zero(p(), p());
  for (int a = 0; a < q(); ++a) out += t(a) * A[static_cast<std::size_t>(a)];
  return out;
}

FramePoint adapted_frame(const Immersion& imm, const Vec& u) {
  const int p = imm.p();
  const int n = imm.n();
  const int q = imm.q();
  Immersion::Jets jets = imm.jets(u);

  Eigen::JacobiSVD<Mat> svd(jets.jacobian);
  const double smallest = svd.singularValues()(p - 1);
  if (!(smallest > kRankThreshold)) {
    throw GeometryError("immersion Jacobian is rank deficient at u = (" + [&] {
      std::string s;
      for (Eigen::Index i = 0; i < u.size(); ++i) s += (i ? ", " : "") + std::to_string(u(i));
      return s;
    }() + "): smallest singular value " + std::to_string(smallest));
  }

  FramePoint fp;
  fp.u = u;
  fp.x = jets.x;
  fp.jacobian = jets.jacobian;
  fp.g = jets.jacobian.transpose() * jets.jacobian;

  // Tangent frame: Gram-Schmidt on coordinate tangents in index order, jacobian = e * R.
  fp.e = Mat(n, p);
  Mat r = Mat::Zero(p, p);
  for (int k = 0; k < p; ++k) {
    Vec v = jets.jacobian.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (int m = 0; m < k; ++m) {
        const double c = fp.e.col(m).dot(v);
        r(m, k) += c;
        v -= c * fp.e.col(m);
      }
    }
    r(k, k) = v.norm();
    if (!(r(k, k) > kRankThreshold * jets.jacobian.col(k).norm())) {
      throw GeometryError("tangent Gram-Schmidt breakdown at column " + std::to_string(k));
    }
    fp.e.col(k) = v / r(k, k);
  }
  fp.chart_jacobian = r.triangularView<Eigen::Upper>().solve(Mat::Identity(p, p));

  // Normal frame: standard basis seeds e_{p+1}, ..., e_n, then e_1, ..., e_p, skipping seeds
  // that are nearly dependent on what is already spanned.
  std::vector<int> seed_order;
  for (int s = p; s < n; ++s) seed_order.push_back(s);
  for (int s = 0; s < p; ++s) seed_order.push_back(s);
  Mat nu(n, q);
  Mat seeds(n, q);
  int found = 0;
  for (int s : seed_order) {
    if (found == q) break;
    Vec v = Vec::Unit(n, s);
    for (int pass = 0; pass < 2; ++pass) {
      v -= fp.e * (fp.e.transpose() * v);
      if (found > 0) v -= nu.leftCols(found) * (nu.leftCols(found).transpose() * v);
    }
    const double len = v.norm();
    if (len < kNormalPivot) continue;
    nu.col(found) = v / len;
    seeds.col(found) = Vec::Unit(n, s);
    ++found;
  }
  if (found != q) throw GeometryError("normal frame completion broke down");

  Mat full(n, n);
  full << fp.e, nu;
  Vec flip = Vec::Ones(q);
  if (full.determinant() < 0.0) flip(q - 1) = -1.0;
  fp.nu = nu * flip.asDiagonal();
  fp.hessians = std::move(jets.hessians);
  fp.A = second_fundamental_forms(fp);

  // Connection coefficients from differentiating the two QR factorizations.
  const Mat rn = nu.transpose() * (seeds - fp.e * (fp.e.transpose() * seeds));
  const Mat rn_inv = rn.triangularView<Eigen::Upper>().solve(Mat::Identity(q, q));
  for (int i = 0; i < p; ++i) {
    const Mat dj = jacobian_derivative(fp.hessians, fp.direction(i), p);
    const Mat w = fp.e.transpose() * dj * fp.chart_jacobian;
    const Mat tangent = antisymmetric_from_lower(w);
    fp.tangent_connection.push_back(tangent);
    // de = dj R^{-1} - e dR R^{-1}, and only its normal part enters below.
    const Mat nu_de = nu.transpose() * dj * fp.chart_jacobian;
    const Mat y = -nu_de * (fp.e.transpose() * seeds) * rn_inv;
    fp.normal_connection.push_back(flip.asDiagonal() * antisymmetric_from_lower(y) * flip.asDiagonal());
  }
  return fp;
}

std::vector<Mat> second_fundamental_forms(const FramePoint& fp) {
  std::vector<Mat> out;
  const int p = fp.p();
  for (int a = 0; a < fp.q(); ++a) {
    Mat m(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        m(i, j) = -second_derivative(fp.hessians, fp.direction(i), fp.direction(j)).dot(fp.nu.col(a));
      }
    }
    out.push_back(0.5 * (m + m.transpose()));
  }
  return out;
}

std::vector<Vec> austerity_directions(int q) {
  std::vector<Vec> out;
  if (q == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
  } else if (q == 2) {
    for (int k = 0; k < 64; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 64.0;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      out.push_back(v);
    }
  } else if (q == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < 64; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / 64.0;
      const double rho = std::sqrt(1.0 - z * z);
      Vec v(3);
      v << rho * std::cos(golden * k), rho * std::sin(golden * k), z;
      out.push_back(v);
    }
  } else {
    std::mt19937_64 rng(kAusteritySeed);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 64; ++k) {
      Vec v(q);
      for (int a = 0; a < q; ++a) v(a) = normal(rng);
      out.push_back(v.normalized());
    }
  }
  return out;
}

ClassifierResiduals classify_point(const FramePoint& fp) {
  ClassifierResiduals r;
  for (const Mat& a : fp.A) r.minimal = std::max(r.minimal, std::abs(a.trace()));
  for (const Vec& dir : austerity_directions(fp.q())) {
    const std::vector<Complex> s = sym_polys(fp.shape_operator(dir));
    double odd = 0.0;
    for (std::size_t j = 1; j < s.size(); j += 2) odd += std::abs(s[j]);
    r.austere = std::max(r.austere, odd);
  }
  if (fp.p() == 2 && fp.q() == 2) {
    auto pairing = [](const Mat& nu, const Mat& perp) {
      return std::abs(nu(0, 1) - perp(0, 0)) + std::abs(nu(1, 1) - perp(0, 1));
    };
    const Mat& a1 = fp.A[0];
    const Mat& a2 = fp.A[1];
    // Linear in the normal direction, so the two coordinate directions cover all of them.
    r.superminimal_neg = std::max(pairing(a1, a2), pairing(a2, -a1));
    r.superminimal_pos = std::max(pairing(a2, a1), pairing(a1, -a2));
    r.superminimal_defined = true;
  }
  return r;
}

ClassifierResiduals classify_residuals(const Immersion& imm, const std::vector<Vec>& grid) {
  ClassifierResiduals worst;
  const bool surface = imm.p() == 2 && imm.n() == 4;
  for (const Vec& u : grid) {
    const ClassifierResiduals r = classify_point(adapted_frame(imm, u));
    worst.minimal = std::max(worst.minimal, r.minimal);
    worst.austere = std::max(worst.austere, r.austere);
    worst.superminimal_pos = std::max(worst.superminimal_pos, r.superminimal_pos);
    worst.superminimal_neg = std::max(worst.superminimal_neg, r.superminimal_neg);
  }
  worst.superminimal_defined = surface;
  return worst;
}

OneFormCalculus one_form_calculus(const FramePoint& fp, const OneForm& mu) {
  const int p = fp.p();
  if (static_cast<int>(mu.size()) != p) throw std::invalid_argument("1-form has wrong number of coefficients");

  Vec coeff(p);
  Mat dcoeff(p, p);  // dcoeff(k, j) = d_k mu_j
  for (int j = 0; j < p; ++j) {
    const Jet1 jet = mu[static_cast<std::size_t>(j)].jet(fp.u);
    coeff(j) = jet.value;
    dcoeff.col(j) = jet.gradient;
  }

  // dg[k](i, j) = d_k g_ij from the immersion jets.
  const Eigen::Index n = fp.jacobian.rows();
  std::vector<Mat> dg(static_cast<std::size_t>(p), Mat(p, p));
  for (int k = 0; k < p; ++k) {
    Mat hk(n, p);  // column i is d_k d_i x
    for (Eigen::Index c = 0; c < n; ++c) hk.row(c) = fp.hessians[static_cast<std::size_t>(c)].row(k);
    const Mat t = hk.transpose() * fp.jacobian;
    dg[static_cast<std::size_t>(k)] = t + t.transpose();
  }
  Eigen::LDLT<Mat> g_ldlt(fp.g);
  if (g_ldlt.info() != Eigen::Success || !(g_ldlt.vectorD().minCoeff() > 0.0)) {
    throw GeometryError("induced metric is degenerate");
  }
  const Mat g_inv = g_ldlt.solve(Mat::Identity(p, p));

  // Coordinate covariant derivative (nabla_k mu)_j = d_k mu_j - Gamma^m_kj mu_m.
  Mat cov(p, p);
  for (int k = 0; k < p; ++k) {
    for (int j = 0; j < p; ++j) {
      Vec lowered(p);  // Gamma_{l,kj}
      for (int l = 0; l < p; ++l) {
        lowered(l) = 0.5 * (dg[static_cast<std::size_t>(k)](l, j) + dg[static_cast<std::size_t>(j)](l, k) -
                            dg[static_cast<std::size_t>(l)](k, j));
      }
      const Vec gamma = g_inv * lowered;
      cov(k, j) = dcoeff(k, j) - gamma.dot(coeff);
    }
  }

  OneFormCalculus out;
  const Mat& c = fp.chart_jacobian;
  out.nabla = c.transpose() * cov * c;
  out.B = 0.5 * (out.nabla + out.nabla.transpose());
  out.dmu = out.nabla - out.nabla.transpose();
  out.codifferential = -out.B.trace();
  out.mu_frame = c.transpose() * coeff;
  out.mu_ambient = fp.jacobian * (g_inv * coeff);
  return out;
}

OneFormCalculus one_form_calculus(const Immersion& imm, const OneForm& mu, const Vec& u) {
  return one_form_calculus(adapted_frame(imm, u), mu);
}

std::vector<Vec> box_grid(const Vec& lower, const Vec& upper, int resolution) {
  if (lower.size() != upper.size() || lower.size() == 0) throw std::invalid_argument("grid box dimension mismatch");
  if (resolution < 1) throw std::invalid_argument("grid resolution must be positive");
  const Eigen::Index dim = lower.size();
  std::vector<Vec> out;
  std::vector<int> index(static_cast<std::size_t>(dim), 0);
  for (;;) {
    Vec u(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      const int k = index[static_cast<std::size_t>(d)];
      u(d) = resolution == 1 ? 0.5 * (lower(d) + upper(d))
                             : lower(d) + (upper(d) - lower(d)) * k / static_cast<double>(resolution - 1);
    }
    out.push_back(u);
    Eigen::Index d = dim - 1;
    while (d >= 0 && ++index[static_cast<std::size_t>(d)] == resolution) {
      index[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

}  // namespace twistcal
