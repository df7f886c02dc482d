#pragma once

#include <string_view>

#include "twistcal/linalg.hpp"
#include "twistcal/octonion.hpp"

namespace twistcal {

// Ambient spaces of the four calibrations.
//   special_lagrangian: R^{2n} with coordinates (x^1..x^n, xi_1..xi_n), complex coordinates x + i xi.
//   g2:                 R^7 with fibre coordinates first, (a1, a2, a3, x1, x2, x3, x4).
//   spin7:              R^8 with spinor coordinates first, (s0, s1, s2, s3, x1, x2, x3, x4).
enum class Geometry { special_lagrangian, g2, spin7 };

std::string_view geometry_name(Geometry g) noexcept;

// Im O embedding of a G2 vector: a1 i + a2 j + a3 k + x1 e + x2 ie + x3 je + x4 ke.
Octonion g2_to_octonion(const Vec& v);
// O embedding of a Spin(7) vector, coordinates taken in basis order.
Octonion spin7_to_octonion(const Vec& v);
Vec octonion_to_vec(const Octonion& o);

// Canonical symplectic form sum_k dx^k ^ dxi_k.
double symplectic_eval(const Vec& v, const Vec& w);
// Holomorphic volume form dz^1 ^ ... ^ dz^n on the columns of `vs` (2n x n).
Complex holo_volume_eval(const Mat& vs);

struct SlResidualParts {
  double phase = 0.0;       // |Im(e^{-i theta} Omega)| / vol
  double symplectic = 0.0;  // root-sum-square of omega on an orthonormal basis of the span
  double total() const { return phase + symplectic; }
};
// Throws GeometryError when the span is degenerate (vol < 1e-12).
SlResidualParts sl_residual_parts(const Mat& vs, double theta);
double sl_residual(const Mat& vs, double theta);
// Root-sum-square of omega restricted to an orthonormal basis of span(vs).
double lagrangian_defect(const Mat& vs);

// The G2 3-form phi(u, v, w) = <u, v w> in the Im O embedding.
double g2_phi_eval(const Vec& u, const Vec& v, const Vec& w);
// |[u, v, w]| / vol.
double associative_residual(const Vec& u, const Vec& v, const Vec& w);
// Norm of phi restricted to the span of the four columns (7 x 4), measured on an orthonormal basis.
double coassociative_residual(const Mat& vs);
// |Im(v1 x v2 x v3 x v4)| / vol for the columns of an 8 x 4 matrix.
double cayley_residual(const Mat& vs);

}  // namespace twistcal
