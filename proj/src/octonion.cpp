#include "twistcal/octonion.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace twistcal {
namespace {

// basis[row] * basis[col] as a signed basis index; entry = sign * (index + 1).
constexpr int kTable[8][8] = {
    //  1   i   j   k   e  ie  je  ke
    {+1, +2, +3, +4, +5, +6, +7, +8},  // 1
    {+2, -1, +4, -3, +6, -5, -8, +7},  // i
    {+3, -4, -1, +2, +7, +8, -5, -6},  // j
    {+4, +3, -2, -1, +8, -7, +6, -5},  // k
    {+5, -6, -7, -8, -1, +2, +3, +4},  // e
    {+6, +5, -8, +7, -2, -1, -4, +3},  // ie
    {+7, +8, +5, -6, -3, +4, -1, -2},  // je
    {+8, -7, +6, +5, -4, -3, +2, -1},  // ke
};

constexpr std::string_view kLabels[8] = {"1", "i", "j", "k", "e", "ie", "je", "ke"};

constexpr double kCliffordTolerance = 1e-12;
constexpr double kPivotThreshold = 1e-12;

}  // namespace

SignedBasis basis_product(std::size_t row, std::size_t col) noexcept {
  const int entry = kTable[row][col];
  return {static_cast<std::size_t>(std::abs(entry) - 1), entry > 0 ? 1 : -1};
}

std::string_view basis_label(std::size_t index) noexcept { return kLabels[index]; }

double Octonion::norm() const noexcept { return std::sqrt(norm_squared()); }

Octonion multiply(const Octonion& a, const Octonion& b) noexcept {
  Octonion out;
  for (std::size_t r = 0; r < kOctonionDim; ++r) {
    if (a[r] == 0.0) continue;
    for (std::size_t c = 0; c < kOctonionDim; ++c) {
      const int entry = kTable[r][c];
      const std::size_t idx = static_cast<std::size_t>(std::abs(entry) - 1);
      const double term = a[r] * b[c];
      out[idx] += entry > 0 ? term : -term;
    }
  }
  return out;
}

Octonion conjugate(const Octonion& a) noexcept {
  Octonion out = -a;
  out[0] = a[0];
  return out;
}

double dot(const Octonion& a, const Octonion& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < kOctonionDim; ++i) s += a[i] * b[i];
  return s;
}

Octonion associator(const Octonion& a, const Octonion& b, const Octonion& c) noexcept {
  return (a * b) * c - a * (b * c);
}

Octonion fourfold_imaginary_orthogonal(const Octonion& a, const Octonion& b, const Octonion& c,
                                       const Octonion& d) noexcept {
  return (conjugate(a) * (b * (conjugate(c) * d))).imaginary();
}

Octonion fourfold_imaginary(const Octonion& a, const Octonion& b, const Octonion& c,
                            const Octonion& d) noexcept {
  // Modified Gram-Schmidt without normalisation: each step subtracts multiples of earlier
  // vectors, which leaves an alternating multilinear form unchanged.
  std::array<Octonion, 4> v{a, b, c, d};
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double original = v[k].norm();
    for (std::size_t m = 0; m < k; ++m) {
      v[k] -= v[m] * (dot(v[k], v[m]) / v[m].norm_squared());
    }
    if (original == 0.0 || v[k].norm() < kPivotThreshold * original) return Octonion{};
  }
  return fourfold_imaginary_orthogonal(v[0], v[1], v[2], v[3]);
}

Octonion clifford_act(const Octonion& alpha, const Octonion& s) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::abs(alpha[i]) > kCliffordTolerance) {
      throw std::invalid_argument("clifford_act: covector has a component along " +
                                  std::string(kLabels[i]) + " outside He");
    }
  }
  return alpha * s;
}

std::string format_multiplication_table() {
  std::ostringstream os;
  constexpr int w = 5;
  os << std::setw(w) << "" << " |";
  for (std::size_t c = 0; c < kOctonionDim; ++c) os << std::setw(w) << kLabels[c];
  os << '\n' << std::string(w + 2 + w * kOctonionDim, '-') << '\n';
  for (std::size_t r = 0; r < kOctonionDim; ++r) {
    os << std::setw(w) << kLabels[r] << " |";
    for (std::size_t c = 0; c < kOctonionDim; ++c) {
      const SignedBasis p = basis_product(r, c);
      os << std::setw(w) << ((p.sign < 0 ? "-" : "") + std::string(kLabels[p.index]));
    }
    os << '\n';
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Octonion& o) {
  os << '(';
  for (std::size_t i = 0; i < kOctonionDim; ++i) os << (i ? ", " : "") << o[i];
  return os << ')';
}

}  // namespace twistcal
