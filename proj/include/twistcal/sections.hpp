#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "twistcal/field.hpp"
#include "twistcal/immersion.hpp"

namespace twistcal {

// Orthonormal frame field of a subbundle of a trivial fibre, evaluated from the base frame.
// Rank 2 fields are (s2, s3) with complex structure s2 -> s3 -> -s2; rank 1 fields are (s1).
struct BundleFrameField {
  std::string name;
  std::function<Mat(const FramePoint&)> frames;  // fibre_dim x rank
};

BundleFrameField asd_complement_bundle();  // (omega^2, omega^3)
BundleFrameField asd_line_bundle();        // (omega^1)
BundleFrameField negative_spinor_bundle(); // (q3, q4)
BundleFrameField constant_bundle(Mat frame, std::string name = "constant");

struct DifferenceOptions {
  double step = 1e-5;
  int richardson_levels = 1;
};

// |pi_F(nabla_{e_1} sigma) + J pi_F(nabla_{e_2} sigma)| for sigma = alpha s2 + beta s3, measured
// as the Euclidean norm of its two frame coordinates.
double dbar_residual(const Immersion& imm, const BundleFrameField& frames, const ScalarField& alpha,
                     const ScalarField& beta, const Vec& u, const DifferenceOptions& options = {});

// sum_i |pi_E(nabla_{e_i}(gamma s1))|.
double parallel_residual(const Immersion& imm, const BundleFrameField& frame, const ScalarField& gamma, const Vec& u,
                         const DifferenceOptions& options = {});

struct HarmonicResidual {
  double closedness = 0.0;    // max |dmu| entry in coordinates, the curl of the coefficients
  double coclosedness = 0.0;  // max |sigma_1(B)|
};
HarmonicResidual harmonic_residual(const Immersion& imm, const OneForm& mu, const std::vector<Vec>& grid);

// (alpha, beta) on a uniform x grid solving alpha' = -k alpha, beta' = beta_sign k beta with
// k = 2e^{2x}/(1+e^{2x}), integrated from x = 0 by the classical 4-stage scheme.
struct YIndependentFamily {
  std::vector<double> x;
  std::vector<double> alpha;
  std::vector<double> beta;
  double beta_sign = 1.0;

  // Fields over the (x, y) plane, cubic Hermite interpolation in x; throw DomainError outside the table.
  ScalarField alpha_field(std::vector<std::string> variables) const;
  ScalarField beta_field(std::vector<std::string> variables) const;
  // Columns x, alpha, beta with 17 significant digits.
  void write_csv(std::ostream& out) const;
};

// Rate k(x) of the family ODE.
double family_rate(double x);

YIndependentFamily solve_y_independent_family(double alpha0, double beta0, double x_min, double x_max,
                                              double step = 1e-3, double beta_sign = 1.0);

}  // namespace twistcal
