#include "twistcal/calibration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "twistcal/errors.hpp"

namespace twistcal {

namespace {

constexpr double kDegenerateVolume = 1e-12;

void require_size(const Vec& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + " coordinates, got " +
                                std::to_string(v.size()));
  }
}

double checked_volume(const Mat& vs) {
  const double vol = gram_volume(vs);
  if (!(vol > kDegenerateVolume)) throw GeometryError("degenerate span: volume " + std::to_string(vol));
  return vol;
}

// Orthonormal basis of the column span; the span must be nondegenerate.
Mat orthonormal_span(const Mat& vs) {
  checked_volume(vs);
  Eigen::HouseholderQR<Mat> qr(vs);
  return qr.householderQ() * Mat::Identity(vs.rows(), vs.cols());
}

}  // namespace

std::string_view geometry_name(Geometry g) noexcept {
  switch (g) {
    case Geometry::special_lagrangian: return "special_lagrangian";
    case Geometry::g2: return "g2";
    case Geometry::spin7: return "spin7";
  }
  return "?";
}

Octonion g2_to_octonion(const Vec& v) {
  require_size(v, 7, "G2 vector");
  Octonion o;
  for (std::size_t k = 0; k < 7; ++k) o[k + 1] = v(static_cast<Eigen::Index>(k));
  return o;
}

Octonion spin7_to_octonion(const Vec& v) {
  require_size(v, 8, "Spin(7) vector");
  Octonion o;
  for (std::size_t k = 0; k < 8; ++k) o[k] = v(static_cast<Eigen::Index>(k));
  return o;
}

Vec octonion_to_vec(const Octonion& o) {
  Vec v(8);
  for (std::size_t k = 0; k < 8; ++k) v(static_cast<Eigen::Index>(k)) = o[k];
  return v;
}

double symplectic_eval(const Vec& v, const Vec& w) {
  if (v.size() != w.size() || v.size() % 2 != 0) throw std::invalid_argument("symplectic pairing needs equal even sizes");
  const Eigen::Index n = v.size() / 2;
  return v.head(n).dot(w.tail(n)) - v.tail(n).dot(w.head(n));
}

Complex holo_volume_eval(const Mat& vs) {
  const Eigen::Index n = vs.cols();
  if (vs.rows() != 2 * n) throw std::invalid_argument("holomorphic volume needs n vectors in R^{2n}");
  CMat z(n, n);
  z.real() = vs.topRows(n);
  z.imag() = vs.bottomRows(n);
  return z.determinant();
}

double lagrangian_defect(const Mat& vs) {
  const Mat qm = orthonormal_span(vs);
  double sum = 0.0;
  for (Eigen::Index a = 0; a < qm.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < qm.cols(); ++b) {
      const double w = symplectic_eval(qm.col(a), qm.col(b));
      sum += w * w;
    }
  }
  return std::sqrt(sum);
}

SlResidualParts sl_residual_parts(const Mat& vs, double theta) {
  const double vol = checked_volume(vs);
  const Complex omega = holo_volume_eval(vs);
  SlResidualParts parts;
  parts.phase = std::abs((std::polar(1.0, -theta) * omega).imag()) / vol;
  parts.symplectic = lagrangian_defect(vs);
  return parts;
}

double sl_residual(const Mat& vs, double theta) { return sl_residual_parts(vs, theta).total(); }

double g2_phi_eval(const Vec& u, const Vec& v, const Vec& w) {
  return dot(g2_to_octonion(u), g2_to_octonion(v) * g2_to_octonion(w));
}

double associative_residual(const Vec& u, const Vec& v, const Vec& w) {
  Mat vs(7, 3);
  vs << u, v, w;
  const double vol = checked_volume(vs);
  return associator(g2_to_octonion(u), g2_to_octonion(v), g2_to_octonion(w)).norm() / vol;
}

double coassociative_residual(const Mat& vs) {
  if (vs.rows() != 7 || vs.cols() != 4) throw std::invalid_argument("coassociative residual needs 4 vectors in R^7");
  const Mat qm = orthonormal_span(vs);
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (int c = b + 1; c < 4; ++c) {
        const double phi = g2_phi_eval(qm.col(a), qm.col(b), qm.col(c));
        sum += phi * phi;
      }
    }
  }
  return std::sqrt(sum);
}

double cayley_residual(const Mat& vs) {
  if (vs.rows() != 8 || vs.cols() != 4) throw std::invalid_argument("Cayley residual needs 4 vectors in R^8");
  const double vol = checked_volume(vs);
  const Octonion im = fourfold_imaginary(spin7_to_octonion(vs.col(0)), spin7_to_octonion(vs.col(1)),
                                         spin7_to_octonion(vs.col(2)), spin7_to_octonion(vs.col(3)));
  return im.norm() / vol;
}

}  // namespace twistcal
