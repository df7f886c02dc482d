#pragma once

#include <map>
#include <string>
#include <vector>

#include "twistcal/expression.hpp"
#include "twistcal/field.hpp"
#include "twistcal/linalg.hpp"

namespace twistcal {

inline constexpr int kMaxDomainDim = 4;
inline constexpr int kMaxAmbientDim = 8;

// A parametrized map from p parameters into R^n, one expression per ambient coordinate.
class Immersion {
 public:
  explicit Immersion(std::vector<Expr> components);

  static Immersion parse(const std::vector<std::string>& components, std::vector<std::string> variables,
                         const std::map<std::string, double>& constants = {});

  int p() const noexcept { return p_; }
  int n() const noexcept { return static_cast<int>(components_.size()); }
  int q() const noexcept { return n() - p_; }
  const std::vector<std::string>& variables() const { return components_.front().variables(); }
  const std::vector<Expr>& components() const noexcept { return components_; }

  struct Jets {
    Vec x;                      // point in R^n
    Mat jacobian;               // n x p, columns are the coordinate tangents
    std::vector<Mat> hessians;  // one p x p matrix per ambient coordinate
  };
  Jets jets(const Vec& u) const;
  Vec point(const Vec& u) const;

 private:
  std::vector<Expr> components_;
  int p_ = 0;
};

// Orthonormal tangent and normal frames with their first-order data at one parameter value.
struct FramePoint {
  Vec u;
  Vec x;
  Mat e;    // n x p tangent frame
  Mat nu;   // n x q normal frame; (e, nu) is positively oriented
  // Coordinates of e in the coordinate tangents: e = jacobian * chart_jacobian. Upper triangular.
  Mat chart_jacobian;
  std::vector<Mat> A;  // second fundamental forms A[a](i, j) = <d_{e_i} nu_a, e_j>
  Mat g;               // first fundamental form in coordinates
  Mat jacobian;
  std::vector<Mat> hessians;
  // tangent_connection[i](k, l) = <d_{e_i} e_l, e_k>; normal_connection[i](a, b) = <d_{e_i} nu_b, nu_a>.
  std::vector<Mat> tangent_connection;
  std::vector<Mat> normal_connection;

  int p() const { return static_cast<int>(e.cols()); }
  int q() const { return static_cast<int>(nu.cols()); }
  // Parameter-space direction whose image is e_i.
  Vec direction(int i) const { return chart_jacobian.col(i); }
  // A^nu for nu = sum_a t_a nu_a.
  Mat shape_operator(const Vec& t) const;
};

// Throws GeometryError when the Jacobian has smallest singular value below 1e-8 or the normal
// completion breaks down.
FramePoint adapted_frame(const Immersion& imm, const Vec& u);

// Harvey-Lawson sign: A[a](i, j) = -<d^2x(e_i, e_j), nu_a>.
std::vector<Mat> second_fundamental_forms(const FramePoint& fp);

struct ClassifierResiduals {
  double minimal = 0.0;
  double austere = 0.0;
  // Pairing A^nu_12 = A^perp_11, A^nu_22 = A^perp_12 with perp the rotation by +90 degrees in the
  // normal plane of the positively oriented frame (neg) or of the reversed one (pos).
  double superminimal_pos = 0.0;
  double superminimal_neg = 0.0;
  bool superminimal_defined = false;  // only for surfaces in R^4
};

// Unit normal directions used for the austerity test, in normal-frame coordinates.
std::vector<Vec> austerity_directions(int q);

ClassifierResiduals classify_point(const FramePoint& fp);
// Maximum of each residual over the grid. Superminimal entries require p = 2 and n = 4.
ClassifierResiduals classify_residuals(const Immersion& imm, const std::vector<Vec>& grid);

struct OneFormCalculus {
  Mat nabla;   // nabla(i, j) = (nabla_{e_i} mu)(e_j)
  Mat B;       // symmetric part
  Mat dmu;     // dmu(i, j) = nabla(i, j) - nabla(j, i)
  double codifferential = 0.0;  // -trace(B)
  Vec mu_frame;                 // mu(e_i)
  Vec mu_ambient;               // tangent vector in R^n dual to mu
};

// Levi-Civita derivative of mu through Christoffel symbols of the induced metric.
OneFormCalculus one_form_calculus(const FramePoint& fp, const OneForm& mu);
OneFormCalculus one_form_calculus(const Immersion& imm, const OneForm& mu, const Vec& u);

// Parameter grid on the box [lower, upper] with `resolution` points per axis, first axis slowest.
std::vector<Vec> box_grid(const Vec& lower, const Vec& upper, int resolution);

}  // namespace twistcal
