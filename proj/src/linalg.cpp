#include "twistcal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twistcal {

Mat orthonormal_basis(const Mat& columns, double pivot) {
  Mat q(columns.rows(), columns.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Vec v = columns.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    const double n = v.norm();
    if (n < pivot * original) continue;
    q.col(kept++) = v / n;
  }
  return q.leftCols(kept);
}

double gram_volume(const Mat& columns) {
  if (columns.cols() == 0) return 1.0;
  // QR is better conditioned than forming the Gram matrix.
  Eigen::HouseholderQR<Mat> qr(columns);
  const Mat r = qr.matrixQR().topRows(columns.cols()).triangularView<Eigen::Upper>();
  double v = 1.0;
  for (Eigen::Index i = 0; i < r.cols(); ++i) v *= std::abs(r(i, i));
  return v;
}

double max_principal_angle(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_principal_angle: subspaces of different shape");
  }
  const Mat qa = orthonormal_basis(a);
  const Mat qb = orthonormal_basis(b);
  if (qa.cols() != a.cols() || qb.cols() != b.cols()) {
    throw std::invalid_argument("max_principal_angle: rank-deficient frame");
  }
  // Singular values of (I - Qa Qa^T) Qb are the sines of the principal angles.
  const Mat residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Mat> svd(residual);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

double condition_number(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smallest = s(s.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

}  // namespace twistcal
