#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twistcal/calibration.hpp"
#include "twistcal/field.hpp"
#include "twistcal/immersion.hpp"
#include "twistcal/octonion.hpp"

namespace twistcal {

// Conormal bundle of an immersion translated by a 1-form, inside T*R^n.
struct SLTwist {
  Immersion immersion;
  OneForm mu;
  double theta = 0.0;
};
// Ruled 3-fold t omega^1 + alpha omega^2 + beta omega^3 over a surface in R^4, inside R^7.
struct AssocTwist {
  Immersion immersion;
  ScalarField alpha;
  ScalarField beta;
};
// 4-fold gamma omega^1 + span{omega^2, omega^3} over a surface in R^4, inside R^7.
struct CoassocTwist {
  Immersion immersion;
  ScalarField gamma;
};
// 4-fold span{q1, q2} + alpha q3 + beta q4 over a surface in R^4, inside R^8.
struct CayleyTwist {
  Immersion immersion;
  ScalarField alpha;
  ScalarField beta;
};

using TwistSpec = std::variant<SLTwist, AssocTwist, CoassocTwist, CayleyTwist>;

const Immersion& base_immersion(const TwistSpec& spec);
Geometry geometry_of(const TwistSpec& spec);
std::string variant_name(const TwistSpec& spec);
int fibre_dim(const TwistSpec& spec);
int ambient_dim(const TwistSpec& spec);
// Throws ConfigError when the immersion dimensions or field arities do not fit the variant.
void validate(const TwistSpec& spec);

// Anti-self-dual frame omega^1..omega^3 (columns, coordinates in the fixed Lambda^2_- basis
// dx12 - dx34, dx13 - dx42, dx14 - dx23) built from a surface frame in R^4.
Mat asd_frame(const FramePoint& fp);
// Derivative of the anti-self-dual frame along e_i from the second fundamental forms and the
// connection coefficients.
Mat asd_frame_derivative(const FramePoint& fp, int i);

// Tangent vector of R^4 as an element of He.
Octonion tangent_octonion(const Vec& x);
// Octonion in H from a vector of Im H coordinates.
Octonion im_quaternion(const Vec& v);
// Spinor frame q1..q4 (columns, H coordinates): q1 = 1, q2 = e^1 (e^2 1), q3 = omega^2 in Im H,
// q4 = q2 q3.
Mat spinor_frame(const FramePoint& fp);
Mat spinor_frame_derivative(const FramePoint& fp, int i);

// Point of the twisted submanifold over parameter u at fibre coordinates t.
Vec ambient_point(const TwistSpec& spec, const Vec& u, const Vec& t);
std::function<Vec(const Vec&, const Vec&)> build_ambient_immersion(const TwistSpec& spec);

enum class FrameRoute { closed_form, numeric };

struct TwistedFrame {
  Mat E;  // images of the base frame directions e_i
  Mat F;  // fibre directions
  Geometry geometry = Geometry::special_lagrangian;
  Mat span() const;
};

struct FrameOptions {
  double step = 1e-5;
  int richardson_levels = 1;
};

TwistedFrame twisted_frame(const TwistSpec& spec, const Vec& u, const Vec& t, FrameRoute route,
                           const FrameOptions& options = {});
// Largest principal angle between the closed-form and numeric tangent spaces.
double route_agreement(const TwistSpec& spec, const Vec& u, const Vec& t, const FrameOptions& options = {});

struct CalibrationResidual {
  double value = 0.0;
  std::vector<std::pair<std::string, double>> components;
};
// Geometry-appropriate calibration residual on a twisted frame.
CalibrationResidual calibration_residual(const TwistSpec& spec, const TwistedFrame& frame);

struct LagrangianCheck {
  double residual = 0.0;      // max over samples of omega on an orthonormal basis of the tangent space
  double raw = 0.0;           // max over samples and pairs of |omega(E_i, E_j)|
  double identity_gap = 0.0;  // max |omega(E_i, E_j) + dmu(e_i, e_j)|
};
LagrangianCheck lagrangian_residual(const SLTwist& spec, const std::vector<Vec>& grid,
                                    const std::vector<Vec>& fibre_samples, const FrameOptions& options = {});

// pi q / 2 - theta.
double phase_offset(int q, double theta);

struct SlTheoremResidual {
  std::vector<double> raw;         // entry 0: |Im(e^{i phi} det(I + iB))|; entry j: the j-th gap
  std::vector<double> normalized;  // raw divided by 1 + magnitudes of the compared quantities
};
SlTheoremResidual sl_theorem_residual(const Mat& a, const Mat& b, double phi);

// Im(e^{-i theta} i^q det(I + i(sA + B))).
double sl_scaling_function(const Mat& a, const Mat& b, double theta, int q, double s);
double sl_scaling_scan(const Mat& a, const Mat& b, double theta, int q, const std::vector<double>& s_samples);
double sl_scaling_scan(const SLTwist& spec, const Vec& u, const Vec& normal_direction,
                       const std::vector<double>& s_samples);

struct SpecialCaseResiduals {
  double j0 = 0.0;
  double j1 = 0.0;
  double jp = 0.0;
};
SpecialCaseResiduals sl_special_case_residuals(const Mat& a, const Mat& b, double phi);

struct SampleResult {
  Vec u;
  Vec t;
  double residual = 0.0;
  std::vector<std::pair<std::string, double>> components;
  double route_angle = 0.0;
  std::string error;  // empty when the sample evaluated cleanly
  bool ok() const { return error.empty(); }
};

struct VerdictOptions {
  FrameOptions frame;
  bool check_routes = true;
  int jobs = 1;
};

struct CalibrationVerdict {
  std::string condition;
  double tolerance = 0.0;
  std::vector<SampleResult> samples;
  double max = 0.0;
  double mean = 0.0;
  std::size_t argmax = 0;
  std::size_t failed_samples = 0;
  double route_angle_max = 0.0;
  bool pass = false;
};

// Evaluates the calibration residual on numeric-route frames at every (u, t) pair. Samples are
// stored in grid-major order and reduced in that order, whatever the number of jobs.
CalibrationVerdict calibration_verdict(const TwistSpec& spec, const std::vector<Vec>& grid,
                                       const std::vector<Vec>& fibre_samples, double tol,
                                       const VerdictOptions& options = {});

// Runs fn(k) for k in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace twistcal
