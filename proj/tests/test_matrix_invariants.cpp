#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "twistcal/errors.hpp"
#include "twistcal/matrix_invariants.hpp"

using namespace twistcal;

namespace {

CMat random_complex(std::mt19937_64& rng, int p) {
  return oracle::random_matrix(rng, p, p).cast<Complex>() + Complex(0.0, 1.0) * oracle::random_matrix(rng, p, p).cast<Complex>();
}

double max_gap(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace

TEST_SUITE("matrix_invariants") {
  TEST_CASE("small examples") {
    Mat d = Mat::Zero(3, 3);
    d.diagonal() << 1, 2, 3;
    const auto s = sym_polys(d);
    REQUIRE(s.size() == 4);
    CHECK(std::abs(s[0] - 1.0) < 1e-13);
    CHECK(std::abs(s[1] - 6.0) < 1e-13);
    CHECK(std::abs(s[2] - 11.0) < 1e-13);
    CHECK(std::abs(s[3] - 6.0) < 1e-13);
    const auto id = sym_polys(Mat(Mat::Identity(2, 2)));
    CHECK(std::abs(id[0] - 1.0) < 1e-15);
    CHECK(std::abs(id[1] - 2.0) < 1e-15);
    CHECK(std::abs(id[2] - 1.0) < 1e-15);
    CHECK(sym_poly(CMat::Identity(2, 2), 3) == Complex(0.0));
    CHECK_THROWS_AS(sym_polys(CMat(CMat::Zero(2, 3))), std::invalid_argument);
    CHECK_THROWS_AS(sym_polys(CMat(CMat::Zero(9, 9))), std::invalid_argument);
  }

  TEST_CASE("first and last invariants are trace and determinant") {
    std::mt19937_64 rng(11);
    for (int p = 1; p <= 8; ++p) {
      const CMat m = random_complex(rng, p);
      const auto s = sym_polys(m);
      CHECK(std::abs(s[0] - 1.0) == 0.0);
      CHECK(std::abs(s[1] - m.trace()) < 1e-12);
      CHECK(std::abs(s[static_cast<std::size_t>(p)] - m.determinant()) < 1e-11 * (1.0 + std::abs(m.determinant())));
    }
  }

  TEST_CASE("agrees with sums of principal minors") {
    std::mt19937_64 rng(12);
    for (int n = 0; n < 40; ++n) {
      const int p = 1 + n % 8;
      const CMat m = random_complex(rng, p);
      CHECK(max_gap(sym_polys(m), oracle::minor_sym_polys(m)) < 1e-10);
    }
  }

  TEST_CASE("generating polynomial is det(I + tM)") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int p = 1; p <= 6; ++p) {
      const CMat m = random_complex(rng, p);
      const auto s = sym_polys(m);
      for (int n = 0; n < 20; ++n) {
        const Complex t(d(rng), d(rng));
        Complex poly = 0.0, tk = 1.0;
        for (const Complex& c : s) {
          poly += tk * c;
          tk *= t;
        }
        const Complex det = (CMat::Identity(p, p) + t * m).determinant();
        CHECK(std::abs(poly - det) < 1e-10 * (1.0 + std::abs(det)));
      }
    }
  }

  TEST_CASE("homogeneity") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int n = 0; n < 20; ++n) {
      const int p = 1 + n % 6;
      const Mat a = oracle::random_matrix(rng, p, p);
      const double s = d(rng);
      const auto base = sym_polys(a);
      const auto scaled = sym_polys(Mat(s * a));
      for (int k = 0; k <= p; ++k) {
        const Complex expected = std::pow(s, k) * base[static_cast<std::size_t>(k)];
        CHECK(std::abs(scaled[static_cast<std::size_t>(k)] - expected) < 1e-10 * (1.0 + std::abs(expected)));
      }
    }
  }

  TEST_CASE("s-derivatives") {
    std::mt19937_64 rng(15);
    SUBCASE("zeroth derivative is the invariants of B") {
      const CMat a = random_complex(rng, 4), b = random_complex(rng, 4);
      CHECK(max_gap(sigma_s_derivatives(a, b, 0), sym_polys(b)) < 1e-12);
    }
    SUBCASE("B = 0 isolates j! s_j(A)") {
      const CMat a = random_complex(rng, 4);
      const CMat zero = CMat::Zero(4, 4);
      const auto sa = sym_polys(a);
      for (int j = 0; j <= 4; ++j) {
        const auto d = sigma_s_derivatives(a, zero, j);
        for (int k = 0; k <= 4; ++k) {
          const Complex expected = k == j ? factorial(j) * sa[static_cast<std::size_t>(k)] : Complex(0.0);
          CHECK(std::abs(d[static_cast<std::size_t>(k)] - expected) < 1e-11);
        }
      }
    }
    SUBCASE("second derivative matches central differences") {
      const Mat a = oracle::random_matrix(rng, 3, 3), b = oracle::random_matrix(rng, 3, 3);
      const auto d = sigma_s_derivatives(a.cast<Complex>(), b.cast<Complex>(), 2);
      for (int k = 0; k <= 3; ++k) {
        const auto f = [&](double s) { return oracle::minor_sym_polys((b + s * a).cast<Complex>())[static_cast<std::size_t>(k)].real(); };
        CHECK(std::abs(d[static_cast<std::size_t>(k)].real() - oracle::second_difference(f, 0.0, 1e-3)) < 1e-6);
      }
    }
    CHECK_THROWS_AS(sigma_s_derivatives(CMat::Identity(2, 2), CMat::Identity(2, 2), 3), std::invalid_argument);
    CHECK_THROWS_AS(sigma_s_derivatives(CMat::Identity(2, 2), CMat::Identity(3, 3), 1), std::invalid_argument);
  }

  TEST_CASE("identity examples") {
    std::mt19937_64 rng(16);
    const CMat a4 = oracle::random_matrix(rng, 4, 4).cast<Complex>();
    const CMat b4 = oracle::random_matrix(rng, 4, 4).cast<Complex>();
    CHECK(lemma_residual(a4, b4, 0, Complex(0.3, 0.7)) < 1e-12);
    for (int j = 0; j <= 4; ++j) CHECK(lemma_residual(a4, b4, j, Complex(0.0, 1.0)) < 1e-9);
    const CMat a5 = oracle::random_matrix(rng, 5, 5).cast<Complex>();
    const CMat b5 = oracle::random_matrix(rng, 5, 5).cast<Complex>();
    for (int j = 0; j <= 5; ++j) CHECK(lemma_residual(a5, b5, j, Complex(0.0, -1.0)) < 1e-9);
  }

  TEST_CASE("identity fuzz over 1000 instances") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> dim(1, 5);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    double worst = 0.0;
    int instances = 0;
    while (instances < 1000) {
      const int p = dim(rng);
      const CMat a = oracle::random_matrix(rng, p, p).cast<Complex>();
      const CMat b = oracle::random_matrix(rng, p, p).cast<Complex>();
      const Complex choices[3] = {Complex(0, 1), Complex(0, -1), Complex(d(rng), d(rng))};
      const Complex t = choices[instances % 3];
      Eigen::JacobiSVD<CMat> svd(CMat::Identity(p, p) + t * b);
      const auto sv = svd.singularValues();
      if (sv(0) / sv(p - 1) > 1e3) continue;
      const int j = instances % (p + 1);
      worst = std::max(worst, lemma_residual(a, b, j, t));
      ++instances;
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("singular shift is reported") {
    const CMat b = CMat::Identity(2, 2);
    CHECK_THROWS_AS(lemma_residual(CMat::Identity(2, 2), b, 1, Complex(-1.0, 0.0)), SingularMatrixError);
  }

  TEST_CASE("symmetry flag") {
    Mat m(2, 2);
    m << 1, 2, 2, 3;
    CHECK(is_symmetric(m));
    m(0, 1) += 1e-9;
    CHECK_FALSE(is_symmetric(m));
  }
}
