#pragma once

// SLD and QFI for multimode Gaussian states, in two parameterizations:
// moments (covariance Gamma, mean delta) and quadratic generator
// (rho = exp(-1/2 r^T Omega r + r^T eta - lnZ)). The SLD of a Gaussian
// family is itself quadratic, L = r^T Phi r + r^T zeta + nu.

#include <Eigen/Dense>

#include "qfikit/errors.hpp"
#include "qfikit/symplectic.hpp"

namespace qfikit::gaussian {

using symplectic::RealMatrix;
using symplectic::RealVector;

// Modes with symplectic eigenvalue within pure_floor of 1 are treated as
// pure; the generator form diverges there.
inline constexpr double pure_floor = 1e-9;

// Gamma_jk = tr(rho {r_j - delta_j, r_k - delta_k}), so vacuum has
// Gamma = I. Validated symmetric and physical (Gamma + iJ >= -1e-8).
struct GaussianMoments {
  RealMatrix gamma;
  RealVector delta;

  GaussianMoments(RealMatrix gamma_in, RealVector delta_in);
  int modes() const { return static_cast<int>(delta.size()) / 2; }
};

// rho = exp(-1/2 r^T Omega r + r^T eta - log_z) with Omega symmetric
// positive definite. log_z is validated against the closed-form
// normalization within 1e-8.
struct GaussianGenerator {
  RealMatrix omega;
  RealVector eta;
  double log_z;

  GaussianGenerator(RealMatrix omega_in, RealVector eta_in, double log_z_in);
  static GaussianGenerator normalized(RealMatrix omega_in, RealVector eta_in);
  int modes() const { return static_cast<int>(eta.size()) / 2; }
};

struct MomentDerivatives {
  RealMatrix dgamma;
  RealVector ddelta;
};

struct GeneratorDerivatives {
  RealMatrix domega;
  RealVector deta;
};

// L = r^T phi r + r^T zeta + nu with phi symmetric; nu is fixed by
// tr(rho L) = 0.
struct QuadraticSLD {
  RealMatrix phi;
  RealVector zeta;
  double nu = 0.0;
};

GaussianMoments generator_to_moments(const GaussianGenerator& g);

// Requires every mode mixed: symplectic eigenvalues above 1 + pure_floor.
GaussianGenerator moments_to_generator(const GaussianMoments& m);

// Generator route: normal-mode + ladder-basis weights f(eps_j -+ eps_k).
QuadraticSLD sld_from_generator(const GaussianGenerator& g, const GeneratorDerivatives& d);
double qfi_from_generator(const GaussianGenerator& g, const GeneratorDerivatives& d);

// Moment route: entrywise solve in the Williamson frame. Handles mixed
// spectra and pure modes whose derivative respects purity; a
// purity-breaking derivative on a pure mode raises DomainError.
QuadraticSLD sld_from_moments(const GaussianMoments& m, const MomentDerivatives& d);
double qfi_from_moments(const GaussianMoments& m, const MomentDerivatives& d);

// Fully pure state (all symplectic eigenvalues within pure_floor of 1).
// The two closed forms 1/2 Gamma^-1 dGamma Gamma^-1 and -1/2 J dGamma J^T
// must agree within 1e-6; their average is returned.
QuadraticSLD sld_pure(const GaussianMoments& m, const MomentDerivatives& d);
double qfi_pure(const GaussianMoments& m, const MomentDerivatives& d);

// Isothermal (degenerate) spectrum Lambda = lambda > 1: single closed form,
// no Williamson decomposition needed.
QuadraticSLD sld_degenerate(const GaussianMoments& m, const MomentDerivatives& d);
double qfi_degenerate(const GaussianMoments& m, const MomentDerivatives& d);

// High-temperature approximation Phi ~ Gamma^-1 dGamma Gamma^-1; relative
// error falls off as the inverse square of the smallest symplectic
// eigenvalue. Advisory domain: min Lambda >= 2.
double qfi_noisy_approx(const GaussianMoments& m, const MomentDerivatives& d);

// Residuals of the defining equations, for reporting and validation:
//   gamma_eq: || dGamma - (Gamma phi Gamma - J phi J^T) || / max(1, ||dGamma||)
//   delta_eq: || ddelta - 1/2 Gamma (zeta + 2 phi delta) || / max(1, ||ddelta||)
//   mean_eq:  | tr(rho L) |
struct GaussianResiduals {
  double gamma_eq = 0.0;
  double delta_eq = 0.0;
  double mean_eq = 0.0;
};

GaussianResiduals sld_residuals(const GaussianMoments& m, const MomentDerivatives& d,
                                const QuadraticSLD& sld);

}  // namespace qfikit::gaussian
