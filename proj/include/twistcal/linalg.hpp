#pragma once

#include <complex>

#include <Eigen/Dense>

namespace twistcal {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Columns orthonormalised in order (two-pass modified Gram-Schmidt). Columns whose residual
// falls below `pivot` relative to their original norm are dropped.
Mat orthonormal_basis(const Mat& columns, double pivot = 1e-12);

// sqrt(det(V^T V)) for the column vectors of V.
double gram_volume(const Mat& columns);

// Largest principal angle between the column spans of `a` and `b` (equal dimensions),
// computed through the sine so that small angles keep full precision.
double max_principal_angle(const Mat& a, const Mat& b);

// Reciprocal 2-norm condition number estimate via SVD.
double condition_number(const CMat& m);

}  // namespace twistcal
