#pragma once

#include <vector>

#include "twistcal/linalg.hpp"

namespace twistcal {

inline constexpr Eigen::Index kMaxInvariantDim = 8;

// Elementary symmetric polynomials [s_0, ..., s_p] of a p x p matrix, defined by
// det(I + tM) = sum_k t^k s_k(M). Computed from the eigenvalues.
std::vector<Complex> sym_polys(const CMat& m);
std::vector<Complex> sym_polys(const Mat& m);

// Single invariant s_k(M); k may exceed p, in which case the result is zero.
Complex sym_poly(const CMat& m, int k);

// k-th entry: (d^j/ds^j)|_{s=0} s_k(B + sA) for k = 0..p. The polynomial in s is recovered
// from p + 1 samples on the unit circle.
std::vector<Complex> sigma_s_derivatives(const CMat& a, const CMat& b, int j);

// Normalised gap between both sides of
//   sum_k t^k (d^j/ds^j)|_0 s_k(B + sA) = j! t^j det(I + tB) s_j(A (I + tB)^{-1}).
// Throws SingularMatrixError when I + tB has condition number above 1e12.
double lemma_residual(const CMat& a, const CMat& b, int j, Complex t);

bool is_symmetric(const Mat& m, double tol = 1e-12);

double factorial(int n);

}  // namespace twistcal
