#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "twistcal/octonion.hpp"

using namespace twistcal;

namespace {

Octonion unit(const char* label) {
  const auto [index, sign] = oracle::decode(label);
  return static_cast<double>(sign) * Octonion::basis(static_cast<std::size_t>(index));
}

Octonion random_octonion(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Octonion o;
  for (std::size_t k = 0; k < 8; ++k) o[k] = d(rng);
  return o;
}

double distance(const Octonion& a, const Octonion& b) { return (a - b).norm(); }

}  // namespace

TEST_SUITE("octonion") {
  TEST_CASE("all 64 basis products are integer exact") {
    for (std::size_t r = 0; r < 8; ++r) {
      for (std::size_t c = 0; c < 8; ++c) {
        const Octonion product = Octonion::basis(r) * Octonion::basis(c);
        const Octonion expected = unit(oracle::kTable[r][c].c_str());
        CAPTURE(oracle::kLabels[r]);
        CAPTURE(oracle::kLabels[c]);
        CHECK(product == expected);
        const SignedBasis entry = basis_product(r, c);
        CHECK(entry.index == static_cast<std::size_t>(oracle::decode(oracle::kTable[r][c]).first));
        CHECK(entry.sign == oracle::decode(oracle::kTable[r][c]).second);
      }
    }
  }

  TEST_CASE("named products") {
    CHECK(unit("i") * unit("j") == unit("k"));
    CHECK(unit("e") * unit("ie") == unit("i"));
    CHECK(unit("j") * unit("je") == unit("-e"));
    std::mt19937_64 rng(1);
    const Octonion x = random_octonion(rng);
    CHECK(Octonion::scalar(1.0) * x == x);
  }

  TEST_CASE("bilinear product agrees with the label table on random inputs") {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 100; ++n) {
      const Octonion a = random_octonion(rng);
      const Octonion b = random_octonion(rng);
      const auto expected = oracle::table_multiply(a.coefficients(), b.coefficients());
      CHECK(distance(a * b, Octonion(expected)) < 1e-12);
    }
  }

  TEST_CASE("conjugation") {
    Octonion x = Octonion::scalar(3.0) + 2.0 * unit("i");
    CHECK(conjugate(x) == Octonion::scalar(3.0) - 2.0 * unit("i"));
    CHECK(conjugate(Octonion::scalar(1.0)) == Octonion::scalar(1.0));
    std::mt19937_64 rng(3);
    for (int n = 0; n < 100; ++n) {
      const Octonion a = random_octonion(rng);
      const Octonion b = random_octonion(rng);
      CHECK(conjugate(conjugate(a)) == a);
      CHECK(distance(conjugate(a * b), conjugate(b) * conjugate(a)) < 1e-12 * (1.0 + a.norm() * b.norm()));
    }
  }

  TEST_CASE("norm is multiplicative") {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 1000; ++n) {
      const Octonion a = random_octonion(rng);
      const Octonion b = random_octonion(rng);
      CHECK(std::abs((a * b).norm() - a.norm() * b.norm()) <= 1e-12 * a.norm() * b.norm());
    }
  }

  TEST_CASE("associator examples and alternativity") {
    CHECK(associator(unit("i"), unit("j"), unit("k")).norm() == 0.0);
    CHECK(associator(unit("i"), unit("j"), unit("e")) == 2.0 * unit("ke"));
    CHECK(associator(unit("i"), unit("j"), unit("e")).norm() > 0.0);
    std::mt19937_64 rng(5);
    for (int n = 0; n < 1000; ++n) {
      const Octonion a = random_octonion(rng);
      const Octonion b = random_octonion(rng);
      const double scale = a.norm() * a.norm() * b.norm();
      CHECK(associator(a, a, b).norm() < 1e-12 * scale);
      CHECK(associator(b, a, a).norm() < 1e-12 * scale);
    }
  }

  TEST_CASE("fourfold imaginary product") {
    CHECK(fourfold_imaginary(unit("1"), unit("i"), unit("j"), unit("k")).norm() < 1e-15);
    CHECK(distance(fourfold_imaginary(unit("i"), unit("j"), unit("e"), unit("ie")), unit("j")) < 1e-15);
    CHECK(fourfold_imaginary(unit("e"), unit("ie"), unit("je"), unit("ke")).norm() < 1e-15);
    // Direct formula on orthogonal basis elements.
    const Octonion direct = conjugate(unit("i")) * (unit("j") * (conjugate(unit("e")) * unit("ie")));
    CHECK(distance(direct.imaginary(), unit("j")) < 1e-15);

    std::mt19937_64 rng(6);
    for (int n = 0; n < 50; ++n) {
      const Octonion a = random_octonion(rng);
      const Octonion b = random_octonion(rng);
      const Octonion c = random_octonion(rng);
      const Octonion d = random_octonion(rng);
      CHECK(fourfold_imaginary(a, a, c, d).norm() < 1e-10);
      const Octonion base = fourfold_imaginary(a, b, c, d);
      const double scale = 1e-10 * (1.0 + a.norm() * b.norm() * c.norm() * d.norm());
      CHECK(distance(fourfold_imaginary(b, a, c, d), -base) < scale);
      CHECK(distance(fourfold_imaginary(a, c, b, d), -base) < scale);
      CHECK(distance(fourfold_imaginary(a, b, d, c), -base) < scale);
      CHECK(distance(fourfold_imaginary(d, b, c, a), -base) < scale);
      CHECK(distance(fourfold_imaginary(c, b, a, d), -base) < scale);
      CHECK(distance(fourfold_imaginary(a, d, c, b), -base) < scale);
      CHECK(base.real() == 0.0);
    }
  }

  TEST_CASE("fourfold product agrees with the direct formula on orthogonal inputs") {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 50; ++n) {
      Eigen::MatrixXd m = oracle::random_rotation(rng, 8).leftCols(4);
      Octonion v[4];
      for (int k = 0; k < 4; ++k) {
        for (std::size_t c = 0; c < 8; ++c) v[k][c] = m(static_cast<Eigen::Index>(c), k);
      }
      const Octonion direct = (conjugate(v[0]) * (v[1] * (conjugate(v[2]) * v[3]))).imaginary();
      CHECK(distance(fourfold_imaginary(v[0], v[1], v[2], v[3]), direct) < 1e-12);
      CHECK(distance(fourfold_imaginary_orthogonal(v[0], v[1], v[2], v[3]), direct) < 1e-12);
    }
  }

  TEST_CASE("clifford action") {
    // e (ie 1) and (e ie) 1 are separate code paths that happen to agree here.
    const Octonion nested = clifford_act(unit("e"), clifford_act(unit("ie"), unit("1")));
    const Octonion composed = (unit("e") * unit("ie")) * unit("1");
    CHECK(nested == unit("i"));
    CHECK(composed == unit("i"));
    CHECK(clifford_act(unit("e"), unit("1")) == unit("e"));
    CHECK_THROWS_AS(clifford_act(unit("i"), unit("1")), std::invalid_argument);
    CHECK_THROWS_AS(clifford_act(unit("e") + 1e-6 * unit("1"), unit("1")), std::invalid_argument);
    CHECK_NOTHROW(clifford_act(unit("e") + 1e-14 * unit("1"), unit("1")));
    // He maps H to He and back.
    std::mt19937_64 rng(8);
    for (int n = 0; n < 20; ++n) {
      Octonion alpha, s;
      const Octonion r1 = random_octonion(rng), r2 = random_octonion(rng);
      for (std::size_t k = 4; k < 8; ++k) alpha[k] = r1[k];
      for (std::size_t k = 0; k < 4; ++k) s[k] = r2[k];
      const Octonion image = clifford_act(alpha, s);
      for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(image[k]) < 1e-14);
    }
  }

  TEST_CASE("printed table uses the basis order") {
    const std::string table = format_multiplication_table();
    CHECK(table.find("ke") != std::string::npos);
    std::size_t pos = 0;
    for (const auto& label : oracle::kLabels) {
      const std::size_t found = table.find(label, pos);
      REQUIRE(found != std::string::npos);
      pos = found;
    }
  }
}
