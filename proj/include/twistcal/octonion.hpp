#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

namespace twistcal {

// Basis order used throughout: 1, i, j, k, e, ie, je, ke.
// H = span{1, i, j, k} and He = span{e, ie, je, ke}.
inline constexpr std::size_t kOctonionDim = 8;

class Octonion {
 public:
  constexpr Octonion() noexcept = default;
  constexpr explicit Octonion(const std::array<double, kOctonionDim>& c) noexcept : c_(c) {}

  static constexpr Octonion basis(std::size_t index) noexcept {
    Octonion o;
    o.c_[index] = 1.0;
    return o;
  }
  static constexpr Octonion scalar(double r) noexcept {
    Octonion o;
    o.c_[0] = r;
    return o;
  }

  constexpr double operator[](std::size_t i) const noexcept { return c_[i]; }
  constexpr double& operator[](std::size_t i) noexcept { return c_[i]; }
  constexpr const std::array<double, kOctonionDim>& coefficients() const noexcept { return c_; }

  constexpr double real() const noexcept { return c_[0]; }
  // Same octonion with the real part zeroed.
  constexpr Octonion imaginary() const noexcept {
    Octonion o = *this;
    o.c_[0] = 0.0;
    return o;
  }

  double norm() const noexcept;
  constexpr double norm_squared() const noexcept {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return s;
  }

  constexpr Octonion& operator+=(const Octonion& o) noexcept {
    for (std::size_t i = 0; i < kOctonionDim; ++i) c_[i] += o.c_[i];
    return *this;
  }
  constexpr Octonion& operator-=(const Octonion& o) noexcept {
    for (std::size_t i = 0; i < kOctonionDim; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  constexpr Octonion& operator*=(double s) noexcept {
    for (double& v : c_) v *= s;
    return *this;
  }

  friend constexpr Octonion operator+(Octonion a, const Octonion& b) noexcept { return a += b; }
  friend constexpr Octonion operator-(Octonion a, const Octonion& b) noexcept { return a -= b; }
  friend constexpr Octonion operator-(Octonion a) noexcept { return a *= -1.0; }
  friend constexpr Octonion operator*(Octonion a, double s) noexcept { return a *= s; }
  friend constexpr Octonion operator*(double s, Octonion a) noexcept { return a *= s; }
  friend constexpr bool operator==(const Octonion&, const Octonion&) noexcept = default;

 private:
  std::array<double, kOctonionDim> c_{};
};

// One entry of the multiplication table: basis[row] * basis[col] = sign * basis[index].
struct SignedBasis {
  std::size_t index;
  int sign;
};

SignedBasis basis_product(std::size_t row, std::size_t col) noexcept;
std::string_view basis_label(std::size_t index) noexcept;

// Bilinear extension of the basis table.
Octonion multiply(const Octonion& a, const Octonion& b) noexcept;
inline Octonion operator*(const Octonion& a, const Octonion& b) noexcept { return multiply(a, b); }

Octonion conjugate(const Octonion& a) noexcept;
double dot(const Octonion& a, const Octonion& b) noexcept;

// (ab)c - a(bc)
Octonion associator(const Octonion& a, const Octonion& b, const Octonion& c) noexcept;

// Imaginary part of the 4-fold cross product, extended from orthogonal arguments to
// arbitrary ones by alternating multilinearity. Linearly dependent inputs give zero.
Octonion fourfold_imaginary(const Octonion& a, const Octonion& b, const Octonion& c,
                            const Octonion& d) noexcept;

// Im(conj(a) (b (conj(c) d))) with no orthogonalisation; valid for orthogonal inputs only.
Octonion fourfold_imaginary_orthogonal(const Octonion& a, const Octonion& b, const Octonion& c,
                                       const Octonion& d) noexcept;

// Clifford multiplication of a covector alpha in He on a spinor s: alpha * s.
// Throws std::invalid_argument if alpha has components in H above 1e-12.
Octonion clifford_act(const Octonion& alpha, const Octonion& s);

// The 8x8 table, rows/columns in basis order, for printing.
std::string format_multiplication_table();

std::ostream& operator<<(std::ostream& os, const Octonion& o);

}  // namespace twistcal
