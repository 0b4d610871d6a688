#include "qfikit/families.hpp"

#include <cmath>
#include <string>

namespace qfikit::families {

namespace {

using expstate::ExponentialState;
using gaussian::GaussianGenerator;
using gaussian::GaussianMoments;
using gaussian::GeneratorDerivatives;
using gaussian::MomentDerivatives;
using gaussian::RealMatrix;
using gaussian::RealVector;
using numkit::Complex;
using numkit::HermitianOperator;
using numkit::Matrix;

Matrix pauli(int k) {
  Matrix s(2, 2);
  const Complex i(0.0, 1.0);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

// log(2 cosh(g)) without overflow for large |g|
double log_2cosh(double g) {
  const double a = std::abs(g);
  return a + std::log1p(std::exp(-2.0 * a));
}

// exp(-i theta h) for Hermitian h, via the spectral decomposition
Matrix rotation_unitary(const Matrix& h, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw DomainError("rotation_unitary: eigensolve failed for dimension " +
                      std::to_string(h.rows()));
  }
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases[j] = std::exp(Complex(0.0, -theta * es.eigenvalues()[j]));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// P(r, phi) = cosh(2r) I + sinh(2r) [[cos phi, sin phi], [sin phi, -cos phi]]:
// the covariance of the squeezed vacuum, determinant one.
RealMatrix squeeze_quadratic(double r, double phi) {
  const double c = std::cosh(2.0 * r);
  const double s = std::sinh(2.0 * r);
  RealMatrix p(2, 2);
  p << c + s * std::cos(phi), s * std::sin(phi), s * std::sin(phi), c - s * std::cos(phi);
  return p;
}

RealMatrix rotation2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  RealMatrix r(2, 2);
  r << c, s, -s, c;
  return r;
}

}  // namespace

Family Family::qubit_exponential(double gamma0, double gamma_dot, double tau1, double tau2) {
  if (gamma0 == 0.0 && (tau1 != 0.0 || tau2 != 0.0)) {
    throw ArgumentError(
        "qubit_exponential: transverse derivative components require gamma0 != 0");
  }
  return Family(Kind::QubitExponential, QubitParams{gamma0, gamma_dot, tau1, tau2});
}

Family Family::explicit_exponential(Matrix g0, Matrix g1) {
  HermitianOperator check0(g0);
  HermitianOperator check1(g1);
  if (g0.rows() != g1.rows()) {
    throw ArgumentError("explicit_exponential: g0 and g1 dimensions differ");
  }
  return Family(Kind::ExplicitExponential, ExplicitExpParams{std::move(g0), std::move(g1)});
}

Family Family::unitary_rotation(Matrix g0, Matrix h) {
  HermitianOperator check0(g0);
  HermitianOperator check1(h);
  if (g0.rows() != h.rows()) {
    throw ArgumentError("unitary_rotation: state and rotation generator dimensions differ");
  }
  return Family(Kind::UnitaryRotation, UnitaryParams{std::move(g0), std::move(h)});
}

Family Family::thermal_beta(Matrix h) {
  HermitianOperator check(h);
  return Family(Kind::ThermalBeta, ThermalParams{std::move(h)});
}

Family Family::single_mode_gaussian(double nbar, double r, double phi, Complex alpha,
                                    GaussianEstimate estimate) {
  if (nbar < 0.0) {
    throw ArgumentError("single_mode_gaussian: nbar must be nonnegative, got " +
                        std::to_string(nbar));
  }
  return Family(Kind::SingleModeGaussian, SmgParams{nbar, r, phi, alpha, estimate});
}

Family Family::two_mode_squeezed(double nbar) {
  if (nbar < 0.0) {
    throw ArgumentError("two_mode_squeezed: nbar must be nonnegative, got " +
                        std::to_string(nbar));
  }
  return Family(Kind::TwoModeSqueezed, TmsParams{nbar});
}

Family Family::explicit_moments(RealMatrix gamma0, RealVector delta0, RealMatrix gamma1,
                                RealVector delta1) {
  if (gamma0.rows() != gamma1.rows() || delta0.size() != delta1.size() ||
      delta0.size() != gamma0.rows()) {
    throw ArgumentError("explicit_moments: inconsistent base/slope dimensions");
  }
  if ((gamma1 - gamma1.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ArgumentError("explicit_moments: slope matrix is not symmetric within 1e-10");
  }
  return Family(Kind::ExplicitMoments,
                ExplicitMomParams{std::move(gamma0), std::move(delta0), std::move(gamma1),
                                  std::move(delta1)});
}

Representation Family::representation() const {
  switch (kind_) {
    case Kind::QubitExponential:
    case Kind::ExplicitExponential:
    case Kind::UnitaryRotation:
    case Kind::ThermalBeta:
      return Representation::Exponential;
    default:
      return Representation::Gaussian;
  }
}

ExponentialState Family::evaluate_exponential(double theta) const {
  switch (kind_) {
    case Kind::QubitExponential: {
      const auto& p = std::get<QubitParams>(params_);
      const double gamma = p.gamma0 + p.gamma_dot * theta;
      Matrix core = gamma * pauli(3);
      if (p.tau1 != 0.0 || p.tau2 != 0.0) {
        const Matrix k = (-p.tau2 / (2.0 * p.gamma0)) * pauli(1) +
                         (p.tau1 / (2.0 * p.gamma0)) * pauli(2);
        const Matrix u = rotation_unitary(k, theta);
        core = u * core * u.adjoint();
      }
      const Matrix g = core - log_2cosh(gamma) * pauli(0);
      return ExponentialState(HermitianOperator::closest(g));
    }
    case Kind::ExplicitExponential: {
      const auto& p = std::get<ExplicitExpParams>(params_);
      return ExponentialState::normalized(HermitianOperator(p.g0 + theta * p.g1));
    }
    case Kind::UnitaryRotation: {
      const auto& p = std::get<UnitaryParams>(params_);
      const ExponentialState base = ExponentialState::normalized(HermitianOperator(p.g0));
      const Matrix u = rotation_unitary(p.h, theta);
      return ExponentialState(
          HermitianOperator::closest(u * base.generator().matrix() * u.adjoint()));
    }
    case Kind::ThermalBeta: {
      const auto& p = std::get<ThermalParams>(params_);
      return ExponentialState::normalized(HermitianOperator(-theta * p.h));
    }
    default:
      throw ArgumentError("evaluate_exponential: family is Gaussian; use the moment or "
                          "generator interface");
  }
}

HermitianOperator Family::differentiate_exponential(double theta, const FdOptions& fd) const {
  if (representation() != Representation::Exponential) {
    throw ArgumentError("differentiate_exponential: family is Gaussian");
  }
  if (fd.force_fd) {
    const double h = fd.step > 0.0 ? fd.step : 1e-5 * std::max(1.0, std::abs(theta));
    auto central = [&](double step) {
      const Matrix gp = evaluate_exponential(theta + step).generator().matrix();
      const Matrix gm = evaluate_exponential(theta - step).generator().matrix();
      return ((gp - gm) / (2.0 * step)).eval();
    };
    Matrix d = central(h);
    if (fd.richardson) {
      d = (4.0 * central(0.5 * h) - d) / 3.0;
    }
    return HermitianOperator::closest(d);
  }
  switch (kind_) {
    case Kind::QubitExponential: {
      const auto& p = std::get<QubitParams>(params_);
      const double gamma = p.gamma0 + p.gamma_dot * theta;
      // transverse components scale with gamma as the frame rotates
      const double scale = p.gamma0 != 0.0 ? gamma / p.gamma0 : 0.0;
      Matrix inner =
          p.gamma_dot * pauli(3) + scale * (p.tau1 * pauli(1) + p.tau2 * pauli(2));
      if (p.tau1 != 0.0 || p.tau2 != 0.0) {
        const Matrix k = (-p.tau2 / (2.0 * p.gamma0)) * pauli(1) +
                         (p.tau1 / (2.0 * p.gamma0)) * pauli(2);
        const Matrix u = rotation_unitary(k, theta);
        inner = u * inner * u.adjoint();
      }
      const Matrix gdot = inner - p.gamma_dot * std::tanh(gamma) * pauli(0);
      return HermitianOperator::closest(gdot);
    }
    case Kind::ExplicitExponential: {
      const auto& p = std::get<ExplicitExpParams>(params_);
      const ExponentialState state = evaluate_exponential(theta);
      const double mean = (state.density() * p.g1).trace().real();
      return HermitianOperator::closest(
          p.g1 - mean * Matrix::Identity(p.g1.rows(), p.g1.cols()));
    }
    case Kind::UnitaryRotation: {
      const auto& p = std::get<UnitaryParams>(params_);
      const Matrix g = evaluate_exponential(theta).generator().matrix();
      const Complex i(0.0, 1.0);
      return HermitianOperator::closest(i * (g * p.h - p.h * g));
    }
    default: {  // ThermalBeta
      const auto& p = std::get<ThermalParams>(params_);
      const ExponentialState state = evaluate_exponential(theta);
      const double mean = (state.density() * p.h).trace().real();
      return HermitianOperator::closest(
          -p.h + mean * Matrix::Identity(p.h.rows(), p.h.cols()));
    }
  }
}

FiniteEval Family::eval_exponential(double theta, const FdOptions& fd) const {
  return FiniteEval{evaluate_exponential(theta), differentiate_exponential(theta, fd)};
}

namespace {

// Resolved single-mode knobs at a given theta: base values with the
// estimated one replaced, plus any passive rotation.
struct SmgPoint {
  double nbar, r, phi;
  Complex alpha;
  double rot;
};

SmgPoint resolve_smg(double nbar, double r, double phi, Complex alpha,
                     GaussianEstimate estimate, double theta) {
  switch (estimate) {
    case GaussianEstimate::Nbar:
      return SmgPoint{theta, r, phi, alpha, 0.0};
    case GaussianEstimate::Epsilon: {
      if (theta <= 0.0) {
        throw DomainError("single_mode_gaussian: mode frequency must be positive, got " +
                          std::to_string(theta));
      }
      return SmgPoint{1.0 / std::expm1(theta), r, phi, alpha, 0.0};
    }
    case GaussianEstimate::Squeeze:
      return SmgPoint{nbar, theta, phi, alpha, 0.0};
    case GaussianEstimate::Phase:
      return SmgPoint{nbar, r, phi, alpha, theta};
    default:  // Displacement
      return SmgPoint{nbar, r, phi, alpha + theta, 0.0};
  }
}

GaussianMoments smg_moments(const SmgPoint& pt) {
  const RealMatrix p = squeeze_quadratic(pt.r, pt.phi);
  RealMatrix gamma = (2.0 * pt.nbar + 1.0) * p;
  RealVector delta(2);
  delta << std::sqrt(2.0) * pt.alpha.real(), std::sqrt(2.0) * pt.alpha.imag();
  if (pt.rot != 0.0) {
    const RealMatrix rmat = rotation2(pt.rot);
    gamma = rmat * gamma * rmat.transpose();
    delta = rmat * delta;
  }
  return GaussianMoments(std::move(gamma), std::move(delta));
}

}  // namespace

GaussianMoments Family::evaluate_moments(double theta) const {
  switch (kind_) {
    case Kind::SingleModeGaussian: {
      const auto& p = std::get<SmgParams>(params_);
      return smg_moments(resolve_smg(p.nbar, p.r, p.phi, p.alpha, p.estimate, theta));
    }
    case Kind::TwoModeSqueezed: {
      const auto& p = std::get<TmsParams>(params_);
      const double scale = 2.0 * p.nbar + 1.0;
      const double c = scale * std::cosh(2.0 * theta);
      const double s = scale * std::sinh(2.0 * theta);
      RealMatrix gamma = RealMatrix::Zero(4, 4);
      gamma(0, 0) = gamma(1, 1) = gamma(2, 2) = gamma(3, 3) = c;
      gamma(0, 1) = gamma(1, 0) = s;
      gamma(2, 3) = gamma(3, 2) = -s;
      return GaussianMoments(std::move(gamma), RealVector::Zero(4));
    }
    case Kind::ExplicitMoments: {
      const auto& p = std::get<ExplicitMomParams>(params_);
      return GaussianMoments(p.gamma0 + theta * p.gamma1, p.delta0 + theta * p.delta1);
    }
    default:
      throw ArgumentError("evaluate_moments: family is finite-dimensional; use the "
                          "exponential interface");
  }
}

MomentDerivatives Family::differentiate_moments(double theta, const FdOptions& fd) const {
  if (representation() != Representation::Gaussian) {
    throw ArgumentError("differentiate_moments: family is finite-dimensional");
  }
  if (fd.force_fd) {
    const double h = fd.step > 0.0 ? fd.step : 1e-5 * std::max(1.0, std::abs(theta));
    auto central = [&](double step) {
      const GaussianMoments mp = evaluate_moments(theta + step);
      const GaussianMoments mm = evaluate_moments(theta - step);
      return MomentDerivatives{(mp.gamma - mm.gamma) / (2.0 * step),
                               (mp.delta - mm.delta) / (2.0 * step)};
    };
    MomentDerivatives d = central(h);
    if (fd.richardson) {
      const MomentDerivatives dh = central(0.5 * h);
      d.dgamma = (4.0 * dh.dgamma - d.dgamma) / 3.0;
      d.ddelta = (4.0 * dh.ddelta - d.ddelta) / 3.0;
    }
    return d;
  }
  switch (kind_) {
    case Kind::SingleModeGaussian: {
      const auto& p = std::get<SmgParams>(params_);
      const SmgPoint pt = resolve_smg(p.nbar, p.r, p.phi, p.alpha, p.estimate, theta);
      switch (p.estimate) {
        case GaussianEstimate::Nbar:
          return MomentDerivatives{2.0 * squeeze_quadratic(pt.r, pt.phi),
                                   RealVector::Zero(2)};
        case GaussianEstimate::Epsilon: {
          const double sh = std::sinh(0.5 * theta);
          return MomentDerivatives{
              (-1.0 / (2.0 * sh * sh)) * squeeze_quadratic(pt.r, pt.phi),
              RealVector::Zero(2)};
        }
        case GaussianEstimate::Squeeze: {
          const double c = std::cosh(2.0 * theta);
          const double s = std::sinh(2.0 * theta);
          RealMatrix dp(2, 2);
          dp << 2.0 * s + 2.0 * c * std::cos(pt.phi), 2.0 * c * std::sin(pt.phi),
              2.0 * c * std::sin(pt.phi), 2.0 * s - 2.0 * c * std::cos(pt.phi);
          return MomentDerivatives{(2.0 * pt.nbar + 1.0) * dp, RealVector::Zero(2)};
        }
        case GaussianEstimate::Phase: {
          const GaussianMoments m = smg_moments(pt);
          const RealMatrix j = symplectic::symplectic_form(1);
          return MomentDerivatives{j * m.gamma - m.gamma * j, j * m.delta};
        }
        default: {  // Displacement
          RealVector dd(2);
          dd << std::sqrt(2.0), 0.0;
          return MomentDerivatives{RealMatrix::Zero(2, 2), dd};
        }
      }
    }
    case Kind::TwoModeSqueezed: {
      const auto& p = std::get<TmsParams>(params_);
      const double scale = 2.0 * p.nbar + 1.0;
      const double dc = scale * 2.0 * std::sinh(2.0 * theta);
      const double ds = scale * 2.0 * std::cosh(2.0 * theta);
      RealMatrix dgamma = RealMatrix::Zero(4, 4);
      dgamma(0, 0) = dgamma(1, 1) = dgamma(2, 2) = dgamma(3, 3) = dc;
      dgamma(0, 1) = dgamma(1, 0) = ds;
      dgamma(2, 3) = dgamma(3, 2) = -ds;
      return MomentDerivatives{std::move(dgamma), RealVector::Zero(4)};
    }
    default: {  // ExplicitMoments
      const auto& p = std::get<ExplicitMomParams>(params_);
      return MomentDerivatives{p.gamma1, p.delta1};
    }
  }
}

MomentsEval Family::eval_moments(double theta, const FdOptions& fd) const {
  return MomentsEval{evaluate_moments(theta), differentiate_moments(theta, fd)};
}

GaussianGenerator Family::evaluate_generator(double theta) const {
  if (representation() != Representation::Gaussian) {
    throw ArgumentError("evaluate_generator: family is finite-dimensional");
  }
  if (kind_ == Kind::SingleModeGaussian) {
    const auto& p = std::get<SmgParams>(params_);
    if (p.estimate == GaussianEstimate::Epsilon) {
      if (theta <= 0.0) {
        throw DomainError("single_mode_gaussian: mode frequency must be positive, got " +
                          std::to_string(theta));
      }
      // Omega = theta * P^-1 directly; P^-1 = cosh(2r) I - sinh(2r) M
      const RealMatrix pinv = squeeze_quadratic(-p.r, p.phi);
      RealVector delta(2);
      delta << std::sqrt(2.0) * p.alpha.real(), std::sqrt(2.0) * p.alpha.imag();
      RealMatrix omega = theta * pinv;
      RealVector eta = omega * delta;
      return GaussianGenerator::normalized(std::move(omega), std::move(eta));
    }
  }
  return gaussian::moments_to_generator(evaluate_moments(theta));
}

GeneratorDerivatives Family::differentiate_generator(double theta, const FdOptions& fd) const {
  if (representation() != Representation::Gaussian) {
    throw ArgumentError("differentiate_generator: family is finite-dimensional");
  }
  if (kind_ == Kind::SingleModeGaussian && !fd.force_fd) {
    const auto& p = std::get<SmgParams>(params_);
    if (p.estimate == GaussianEstimate::Epsilon) {
      const RealMatrix pinv = squeeze_quadratic(-p.r, p.phi);
      RealVector delta(2);
      delta << std::sqrt(2.0) * p.alpha.real(), std::sqrt(2.0) * p.alpha.imag();
      return GeneratorDerivatives{pinv, pinv * delta};
    }
  }
  // Finite differences of the moments-to-generator conversion, with two
  // Richardson levels (sixth order); deta is assembled from exact pieces
  // instead of differencing eta directly.
  const double h = fd.step > 0.0 ? fd.step : 1e-3 * std::max(1.0, std::abs(theta));
  auto omega_at = [&](double t) { return evaluate_generator(t).omega; };
  auto central = [&](double step) {
    return ((omega_at(theta + step) - omega_at(theta - step)) / (2.0 * step)).eval();
  };
  const RealMatrix c1 = central(h);
  const RealMatrix c2 = central(0.5 * h);
  const RealMatrix c4 = central(0.25 * h);
  const RealMatrix r1 = (4.0 * c2 - c1) / 3.0;
  const RealMatrix r2 = (4.0 * c4 - c2) / 3.0;
  const RealMatrix domega = (16.0 * r2 - r1) / 15.0;
  const GaussianGenerator g = evaluate_generator(theta);
  const GaussianMoments m = evaluate_moments(theta);
  const MomentDerivatives md = differentiate_moments(theta);
  return GeneratorDerivatives{domega, domega * m.delta + g.omega * md.ddelta};
}

GeneratorEval Family::eval_generator(double theta, const FdOptions& fd) const {
  return GeneratorEval{evaluate_generator(theta), differentiate_generator(theta, fd)};
}

std::function<Matrix(double)> Family::fock_renderer(int fock_dim) const {
  switch (kind_) {
    case Kind::SingleModeGaussian: {
      const auto p = std::get<SmgParams>(params_);
      return [p, fock_dim](double theta) {
        const SmgPoint pt = resolve_smg(p.nbar, p.r, p.phi, p.alpha, p.estimate, theta);
        // a passive rotation folds into the squeeze angle and the
        // displacement phase
        return fock::gaussian_fock(pt.nbar, pt.r, pt.phi - 2.0 * pt.rot,
                                   pt.alpha * std::exp(Complex(0.0, -pt.rot)), fock_dim);
      };
    }
    case Kind::TwoModeSqueezed: {
      const auto p = std::get<TmsParams>(params_);
      return [p, fock_dim](double theta) {
        return fock::two_mode_squeezed_fock(theta, p.nbar, fock_dim);
      };
    }
    case Kind::ExplicitMoments:
      throw ArgumentError("fock_renderer: no Fock renderer for explicit moment families");
    default: {
      const Family copy = *this;
      return [copy](double theta) { return copy.evaluate_exponential(theta).density(); };
    }
  }
}

}  // namespace qfikit::families
