#pragma once

// Parameterized state families. Each family maps the estimated parameter
// theta to a state in one representation (exponential or Gaussian) together
// with its derivative -- analytically wherever a closed form exists, by
// guarded central differences otherwise.

#include <complex>
#include <functional>
#include <variant>

#include "qfikit/expstate.hpp"
#include "qfikit/fockspace.hpp"
#include "qfikit/gaussian.hpp"

namespace qfikit::families {

enum class Kind {
  QubitExponential,
  ExplicitExponential,
  UnitaryRotation,
  ThermalBeta,
  SingleModeGaussian,
  TwoModeSqueezed,
  ExplicitMoments,
};

enum class Representation { Exponential, Gaussian };

// Which knob of the single-mode Gaussian family theta drives; the
// constructor arguments fix every other knob at its base value.
enum class GaussianEstimate { Nbar, Epsilon, Squeeze, Phase, Displacement };

struct FdOptions {
  double step = 0.0;        // 0 -> representation-appropriate default
  bool richardson = false;  // one extrapolation level (step and step/2)
  bool force_fd = false;    // bypass analytic derivatives (for validation)
};

struct FiniteEval {
  expstate::ExponentialState state;
  numkit::HermitianOperator gdot;
};

struct MomentsEval {
  gaussian::GaussianMoments moments;
  gaussian::MomentDerivatives deriv;
};

struct GeneratorEval {
  gaussian::GaussianGenerator generator;
  gaussian::GeneratorDerivatives deriv;
};

class Family {
 public:
  // gamma(theta) = gamma0 + gamma_dot * theta along sigma_3 in a frame
  // rotating so that the derivative picks up tau1 sigma_1 + tau2 sigma_2 at
  // theta = 0. Requires gamma0 != 0 whenever tau is nonzero.
  static Family qubit_exponential(double gamma0, double gamma_dot, double tau1, double tau2);

  // G(theta) = g0 + theta g1, renormalized at every theta.
  static Family explicit_exponential(numkit::Matrix g0, numkit::Matrix g1);

  // rho(theta) = exp(-i theta h) rho0 exp(i theta h), rho0 = exp(normalize(g0)).
  static Family unitary_rotation(numkit::Matrix g0, numkit::Matrix h);

  // rho(theta) = exp(-theta h)/Z(theta); theta is inverse temperature.
  static Family thermal_beta(numkit::Matrix h);

  // Single-mode displaced squeezed thermal state.
  static Family single_mode_gaussian(double nbar, double r, double phi,
                                     std::complex<double> alpha, GaussianEstimate estimate);

  // Two-mode squeezed thermal state; theta is the squeeze parameter.
  static Family two_mode_squeezed(double nbar);

  // Affine moments Gamma0 + theta Gamma1, delta0 + theta delta1.
  static Family explicit_moments(gaussian::RealMatrix gamma0, gaussian::RealVector delta0,
                                 gaussian::RealMatrix gamma1, gaussian::RealVector delta1);

  Kind kind() const { return kind_; }
  Representation representation() const;

  expstate::ExponentialState evaluate_exponential(double theta) const;
  numkit::HermitianOperator differentiate_exponential(double theta,
                                                      const FdOptions& fd = {}) const;
  FiniteEval eval_exponential(double theta, const FdOptions& fd = {}) const;

  gaussian::GaussianMoments evaluate_moments(double theta) const;
  gaussian::MomentDerivatives differentiate_moments(double theta,
                                                    const FdOptions& fd = {}) const;
  MomentsEval eval_moments(double theta, const FdOptions& fd = {}) const;

  gaussian::GaussianGenerator evaluate_generator(double theta) const;
  // Analytic for the epsilon estimate; otherwise finite differences of the
  // moments-to-generator conversion with Richardson extrapolation on by
  // default (base step 1e-3 * max(1, |theta|)). deta is assembled as
  // domega * delta + omega * ddelta from exact pieces.
  gaussian::GeneratorDerivatives differentiate_generator(double theta,
                                                         const FdOptions& fd = {}) const;
  GeneratorEval eval_generator(double theta, const FdOptions& fd = {}) const;

  // Density-matrix renderer for the finite-difference oracle. fock_dim sets
  // the truncation for Gaussian kinds (per mode) and is ignored for
  // exponential kinds, whose dimension is fixed by the family.
  std::function<numkit::Matrix(double)> fock_renderer(int fock_dim) const;

 private:
  struct QubitParams {
    double gamma0, gamma_dot, tau1, tau2;
  };
  struct ExplicitExpParams {
    numkit::Matrix g0, g1;
  };
  struct UnitaryParams {
    numkit::Matrix g0, h;
  };
  struct ThermalParams {
    numkit::Matrix h;
  };
  struct SmgParams {
    double nbar, r, phi;
    std::complex<double> alpha;
    GaussianEstimate estimate;
  };
  struct TmsParams {
    double nbar;
  };
  struct ExplicitMomParams {
    gaussian::RealMatrix gamma0;
    gaussian::RealVector delta0;
    gaussian::RealMatrix gamma1;
    gaussian::RealVector delta1;
  };
  using Params = std::variant<QubitParams, ExplicitExpParams, UnitaryParams, ThermalParams,
                              SmgParams, TmsParams, ExplicitMomParams>;

  Family(Kind kind, Params params) : kind_(kind), params_(std::move(params)) {}

  Kind kind_;
  Params params_;
};

}  // namespace qfikit::families
