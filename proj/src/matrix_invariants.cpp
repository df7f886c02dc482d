#include "twistcal/matrix_invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "twistcal/errors.hpp"

namespace twistcal {
namespace {

constexpr double kMaxCondition = 1e12;

void check_square(const CMat& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxInvariantDim) {
    throw std::invalid_argument(std::string(who) + ": expected a square matrix of size 1..8");
  }
}

}  // namespace

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<Complex> sym_polys(const CMat& m) {
  check_square(m, "sym_polys");
  const Eigen::Index p = m.rows();
  // Expand prod_i (1 + lambda_i t) over the eigenvalues. The Faddeev-LeVerrier recursion loses
  // several digits already at p = 5, the eigenvalue expansion stays near machine precision.
  const Eigen::ComplexEigenSolver<CMat> solver(m, false);
  if (solver.info() != Eigen::Success) throw SingularMatrixError("sym_polys: eigenvalue iteration did not converge");
  std::vector<Complex> sigma(static_cast<std::size_t>(p + 1), Complex(0.0));
  sigma[0] = 1.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    const Complex lambda = solver.eigenvalues()(i);
    for (Eigen::Index k = i + 1; k >= 1; --k) {
      sigma[static_cast<std::size_t>(k)] += lambda * sigma[static_cast<std::size_t>(k - 1)];
    }
  }
  return sigma;
}

std::vector<Complex> sym_polys(const Mat& m) { return sym_polys(CMat(m.cast<Complex>())); }

Complex sym_poly(const CMat& m, int k) {
  if (k < 0) throw std::invalid_argument("sym_poly: negative degree");
  if (k > m.rows()) return 0.0;
  return sym_polys(m)[static_cast<std::size_t>(k)];
}

std::vector<Complex> sigma_s_derivatives(const CMat& a, const CMat& b, int j) {
  check_square(a, "sigma_s_derivatives");
  if (b.rows() != a.rows() || b.cols() != a.cols()) {
    throw std::invalid_argument("sigma_s_derivatives: A and B differ in shape");
  }
  const Eigen::Index p = a.rows();
  if (j < 0 || j > p) throw std::invalid_argument("sigma_s_derivatives: j outside 0..p");

  // s_k(B + sA) has degree <= p in s; p + 1 samples on the unit circle recover its
  // coefficients through a discrete Fourier transform, which is perfectly conditioned.
  const Eigen::Index npts = p + 1;
  CMat coeffs = CMat::Zero(npts, p + 1);
  for (Eigen::Index m = 0; m < npts; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(npts);
    const Complex s = std::polar(1.0, angle);
    const std::vector<Complex> sig = sym_polys(CMat(b + s * a));
    for (Eigen::Index c = 0; c < npts; ++c) {
      const Complex weight = std::polar(1.0 / static_cast<double>(npts), -angle * static_cast<double>(c));
      for (Eigen::Index k = 0; k <= p; ++k) coeffs(c, k) += weight * sig[static_cast<std::size_t>(k)];
    }
  }
  std::vector<Complex> out(static_cast<std::size_t>(p + 1));
  const double jf = factorial(j);
  for (Eigen::Index k = 0; k <= p; ++k) out[static_cast<std::size_t>(k)] = jf * coeffs(j, k);
  return out;
}

double lemma_residual(const CMat& a, const CMat& b, int j, Complex t) {
  const Eigen::Index p = a.rows();
  const CMat shifted = CMat::Identity(p, p) + t * b;
  if (condition_number(shifted) > kMaxCondition) {
    throw SingularMatrixError("lemma_residual: I + tB is singular to working precision");
  }
  const std::vector<Complex> derivs = sigma_s_derivatives(a, b, j);
  Complex lhs = 0.0;
  Complex tk = 1.0;
  for (Eigen::Index k = 0; k <= p; ++k) {
    lhs += tk * derivs[static_cast<std::size_t>(k)];
    tk *= t;
  }
  Eigen::PartialPivLU<CMat> lu(shifted);
  const CMat transformed = a * lu.inverse();
  const Complex rhs =
      factorial(j) * std::pow(t, j) * lu.determinant() * sym_poly(transformed, j);
  return std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

bool is_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() < tol;
}

}  // namespace twistcal
