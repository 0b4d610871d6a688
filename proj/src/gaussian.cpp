#include "qfikit/gaussian.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "qfikit/expstate.hpp"  // f_scalar

namespace qfikit::gaussian {

namespace {

using symplectic::ComplexMatrix;
using symplectic::normal_modes;
using symplectic::symplectic_form;
using symplectic::SymplecticDecomposition;
using symplectic::williamson;

void check_pair(const RealMatrix& mat, const RealVector& vec, const char* who) {
  if (mat.rows() == 0 || mat.rows() != mat.cols() || mat.rows() % 2 != 0) {
    throw ArgumentError(std::string(who) + ": expected a square matrix of even dimension, got " +
                        std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()));
  }
  if (vec.size() != mat.rows()) {
    throw ArgumentError(std::string(who) + ": vector length " + std::to_string(vec.size()) +
                        " does not match matrix dimension " + std::to_string(mat.rows()));
  }
}

RealMatrix require_symmetric(const RealMatrix& m, double tol, const char* who) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw ArgumentError(std::string(who) + ": matrix is not symmetric within " +
                        std::to_string(tol));
  }
  return 0.5 * (m + m.transpose());
}

// S^-1 for symplectic S, using the group structure instead of a solve.
RealMatrix symplectic_inverse(const RealMatrix& s) {
  const RealMatrix j = symplectic_form(static_cast<int>(s.rows()) / 2);
  return -j * s.transpose() * j;
}

double coth_half(double eps) { return 1.0 / std::tanh(0.5 * eps); }

// Everything the generator route needs in the normal-mode ladder basis:
// frequencies eps, the congruence S, the weighted quadratic coefficient
// Phi' and linear coefficient zeta' (displaced frame).
struct LadderFrame {
  SymplecticDecomposition nm;
  ComplexMatrix phi_l;
  Eigen::VectorXcd zeta_l;
  RealVector delta;
};

LadderFrame generator_ladder_frame(const GaussianGenerator& g, const GeneratorDerivatives& d,
                                   const char* who) {
  check_pair(d.domega, d.deta, who);
  if (d.domega.rows() != g.omega.rows()) {
    throw ArgumentError(std::string(who) + ": derivative dimension " +
                        std::to_string(d.domega.rows()) + " does not match generator dimension " +
                        std::to_string(g.omega.rows()));
  }
  const RealMatrix domega = require_symmetric(d.domega, 1e-10, who);
  const int n = g.modes();
  LadderFrame fr;
  fr.nm = normal_modes(g.omega);
  fr.delta = g.omega.ldlt().solve(g.eta);
  // Displace to the zero-mean frame before applying the ladder rules: the
  // closed forms assume no linear term in G itself.
  const RealVector deta_eff = d.deta - domega * fr.delta;
  const RealMatrix sinv = symplectic_inverse(fr.nm.s);
  const RealMatrix domega_s = sinv.transpose() * domega * sinv;
  const RealVector deta_s = sinv.transpose() * deta_eff;
  const ComplexMatrix v = symplectic::ladder_map(n);
  const ComplexMatrix vd = v.adjoint();
  const ComplexMatrix domega_l = vd * domega_s.cast<std::complex<double>>() * v;
  const Eigen::VectorXcd deta_l = vd * deta_s.cast<std::complex<double>>();
  fr.phi_l.resize(2 * n, 2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    const double ej = fr.nm.spectrum[j % n];
    for (int k = 0; k < 2 * n; ++k) {
      const double ek = fr.nm.spectrum[k % n];
      const bool same_block = (j < n) == (k < n);
      const double arg = same_block ? ej - ek : ej + ek;
      fr.phi_l(j, k) = -0.5 * expstate::f_scalar(arg) * domega_l(j, k);
    }
  }
  fr.zeta_l.resize(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    fr.zeta_l[j] = expstate::f_scalar(fr.nm.spectrum[j % n]) * deta_l[j];
  }
  return fr;
}

RealMatrix gamma_from_normal_modes(const SymplecticDecomposition& nm) {
  const int n = static_cast<int>(nm.spectrum.size());
  const RealMatrix sinv = symplectic_inverse(nm.s);
  RealVector cth(2 * n);
  for (int j = 0; j < n; ++j) cth[j] = cth[j + n] = coth_half(nm.spectrum[j]);
  RealMatrix gamma = sinv * cth.asDiagonal() * sinv.transpose();
  return 0.5 * (gamma + gamma.transpose());
}

double mean_fix_nu(const RealMatrix& gamma, const RealVector& delta, const RealMatrix& phi,
                   const RealVector& zeta) {
  return -(0.5 * (gamma * phi).trace() + delta.dot(phi * delta) + delta.dot(zeta));
}

// Lab-frame zeta and nu from the displaced-frame linear coefficient.
QuadraticSLD assemble_lab(const RealMatrix& gamma, const RealVector& delta, RealMatrix phi,
                          const RealVector& zeta_disp) {
  QuadraticSLD out;
  out.phi = 0.5 * (phi + phi.transpose());
  out.zeta = zeta_disp - 2.0 * out.phi * delta;
  out.nu = mean_fix_nu(gamma, delta, out.phi, out.zeta);
  return out;
}

}  // namespace

GaussianMoments::GaussianMoments(RealMatrix gamma_in, RealVector delta_in)
    : gamma(std::move(gamma_in)), delta(std::move(delta_in)) {
  check_pair(gamma, delta, "GaussianMoments");
  gamma = require_symmetric(gamma, 1e-10, "GaussianMoments");
  const int n = modes();
  ComplexMatrix test = gamma.cast<std::complex<double>>() +
                       std::complex<double>(0.0, 1.0) *
                           symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(test);
  if (es.eigenvalues()[0] < -1e-8) {
    throw DomainError("GaussianMoments: unphysical covariance, min eig(Gamma + iJ) = " +
                      std::to_string(es.eigenvalues()[0]));
  }
}

GaussianGenerator::GaussianGenerator(RealMatrix omega_in, RealVector eta_in, double log_z_in)
    : omega(std::move(omega_in)), eta(std::move(eta_in)), log_z(log_z_in) {
  check_pair(omega, eta, "GaussianGenerator");
  omega = require_symmetric(omega, 1e-10, "GaussianGenerator");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(omega);
  if (es.eigenvalues()[0] <= 0.0) {
    throw DomainError("GaussianGenerator: generator matrix not positive definite (eigenvalue " +
                      std::to_string(es.eigenvalues()[0]) + ")");
  }
  const SymplecticDecomposition nm = normal_modes(omega);
  const RealVector delta = omega.ldlt().solve(eta);
  double ref = 0.5 * delta.dot(eta);
  for (int j = 0; j < modes(); ++j) ref -= std::log(2.0 * std::sinh(0.5 * nm.spectrum[j]));
  if (std::abs(log_z - ref) > 1e-8) {
    throw ArgumentError("GaussianGenerator: log normalization " + std::to_string(log_z) +
                        " inconsistent with closed form " + std::to_string(ref));
  }
}

GaussianGenerator GaussianGenerator::normalized(RealMatrix omega_in, RealVector eta_in) {
  check_pair(omega_in, eta_in, "GaussianGenerator::normalized");
  RealMatrix omega = require_symmetric(omega_in, 1e-10, "GaussianGenerator::normalized");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(omega);
  if (es.eigenvalues()[0] <= 0.0) {
    throw DomainError(
        "GaussianGenerator::normalized: generator matrix not positive definite (eigenvalue " +
        std::to_string(es.eigenvalues()[0]) + ")");
  }
  const SymplecticDecomposition nm = normal_modes(omega);
  const RealVector delta = omega.ldlt().solve(eta_in);
  double log_z = 0.5 * delta.dot(eta_in);
  const int n = static_cast<int>(eta_in.size()) / 2;
  for (int j = 0; j < n; ++j) log_z -= std::log(2.0 * std::sinh(0.5 * nm.spectrum[j]));
  return GaussianGenerator(std::move(omega), std::move(eta_in), log_z);
}

GaussianMoments generator_to_moments(const GaussianGenerator& g) {
  const SymplecticDecomposition nm = normal_modes(g.omega);
  return GaussianMoments(gamma_from_normal_modes(nm), g.omega.ldlt().solve(g.eta));
}

GaussianGenerator moments_to_generator(const GaussianMoments& m) {
  const SymplecticDecomposition w = williamson(m.gamma);
  const int n = m.modes();
  const double lam_min = w.spectrum[n - 1];
  if (lam_min <= 1.0 + pure_floor) {
    throw DomainError("moments_to_generator: pure or near-pure mode (symplectic eigenvalue " +
                      std::to_string(lam_min) + "), generator form diverges");
  }
  RealVector eps(2 * n);
  for (int j = 0; j < n; ++j) {
    eps[j] = eps[j + n] = std::log((w.spectrum[j] + 1.0) / (w.spectrum[j] - 1.0));
  }
  RealMatrix omega = w.s.transpose() * eps.asDiagonal() * w.s;
  omega = 0.5 * (omega + omega.transpose());
  RealVector eta = omega * m.delta;
  double log_z = 0.5 * m.delta.dot(eta);
  for (int j = 0; j < n; ++j) log_z -= std::log(2.0 * std::sinh(0.5 * eps[j]));
  return GaussianGenerator(std::move(omega), std::move(eta), log_z);
}

QuadraticSLD sld_from_generator(const GaussianGenerator& g, const GeneratorDerivatives& d) {
  const LadderFrame fr = generator_ladder_frame(g, d, "sld_from_generator");
  const int n = g.modes();
  const ComplexMatrix v = symplectic::ladder_map(n);
  ComplexMatrix phi_s_c = v * fr.phi_l * v.adjoint();
  const RealMatrix phi_s = phi_s_c.real();
  const RealMatrix phi = fr.nm.s.transpose() * phi_s * fr.nm.s;
  const Eigen::VectorXcd zeta_s_c = v * fr.zeta_l;
  const RealVector zeta_disp = fr.nm.s.transpose() * zeta_s_c.real();
  return assemble_lab(gamma_from_normal_modes(fr.nm), fr.delta, phi, zeta_disp);
}

double qfi_from_generator(const GaussianGenerator& g, const GeneratorDerivatives& d) {
  const LadderFrame fr = generator_ladder_frame(g, d, "qfi_from_generator");
  const int n = g.modes();
  double qfi = 0.0;
  for (int j = 0; j < n; ++j) {
    const double cj = coth_half(fr.nm.spectrum[j]);
    for (int k = 0; k < n; ++k) {
      const double ck = coth_half(fr.nm.spectrum[k]);
      const double in_block = std::norm(fr.phi_l(j, k));
      const double cross_block = std::norm(fr.phi_l(j, k + n));
      qfi += (in_block + cross_block) * cj * ck + cross_block - in_block;
    }
    qfi += std::norm(fr.zeta_l[j]) * cj;
  }
  return qfi;
}

QuadraticSLD sld_from_moments(const GaussianMoments& m, const MomentDerivatives& d) {
  check_pair(d.dgamma, d.ddelta, "sld_from_moments");
  if (d.dgamma.rows() != m.gamma.rows()) {
    throw ArgumentError("sld_from_moments: derivative dimension does not match state");
  }
  const RealMatrix dgamma = require_symmetric(d.dgamma, 1e-9, "sld_from_moments");
  const SymplecticDecomposition w = williamson(m.gamma);
  const int n = m.modes();
  const int dim = 2 * n;
  RealVector lam(dim);
  for (int j = 0; j < n; ++j) lam[j] = lam[j + n] = w.spectrum[j];
  const RealMatrix j = symplectic_form(n);
  const RealMatrix gd_s = w.s * dgamma * w.s.transpose();
  const RealMatrix jgj = j * gd_s * j.transpose();
  const RealMatrix num = lam.asDiagonal() * gd_s * lam.asDiagonal() + jgj;
  const double vanish_tol = 1e-6 * std::max(1.0, gd_s.norm());
  RealMatrix phi_s(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      const bool pure_pair =
          lam[r] <= 1.0 + pure_floor && lam[c] <= 1.0 + pure_floor;
      if (pure_pair) {
        // Unitary limit: both closed forms agree entrywise when the numerator
        // vanishes; anything else means the derivative breaks purity.
        if (std::abs(num(r, c)) > vanish_tol) {
          throw DomainError(
              "sld_from_moments: purity-breaking derivative on pure mode pair (" +
              std::to_string(r) + "," + std::to_string(c) + "), residual " +
              std::to_string(num(r, c)));
        }
        phi_s(r, c) = 0.25 * (gd_s(r, c) - jgj(r, c));
      } else {
        phi_s(r, c) = num(r, c) / (lam[r] * lam[r] * lam[c] * lam[c] - 1.0);
      }
    }
  }
  const RealMatrix phi = w.s.transpose() * phi_s * w.s;
  const RealVector zeta_disp = 2.0 * m.gamma.ldlt().solve(d.ddelta);
  return assemble_lab(m.gamma, m.delta, phi, zeta_disp);
}

double qfi_from_moments(const GaussianMoments& m, const MomentDerivatives& d) {
  const QuadraticSLD sld = sld_from_moments(m, d);
  const RealMatrix dgamma = 0.5 * (d.dgamma + d.dgamma.transpose());
  const RealVector gd = m.gamma.ldlt().solve(d.ddelta);
  return 0.5 * (dgamma * sld.phi).trace() + 2.0 * d.ddelta.dot(gd);
}

QuadraticSLD sld_pure(const GaussianMoments& m, const MomentDerivatives& d) {
  check_pair(d.dgamma, d.ddelta, "sld_pure");
  if (d.dgamma.rows() != m.gamma.rows()) {
    throw ArgumentError("sld_pure: derivative dimension does not match state");
  }
  const RealMatrix dgamma = require_symmetric(d.dgamma, 1e-9, "sld_pure");
  const SymplecticDecomposition w = williamson(m.gamma);
  if (w.spectrum[0] > 1.0 + pure_floor) {
    throw ArgumentError("sld_pure: state is not pure (symplectic eigenvalue " +
                        std::to_string(w.spectrum[0]) + "); use sld_from_moments");
  }
  const int n = m.modes();
  const RealMatrix j = symplectic_form(n);
  auto ldlt = m.gamma.ldlt();
  const RealMatrix a = ldlt.solve(ldlt.solve(dgamma).transpose()).transpose();
  const RealMatrix b = -j * dgamma * j.transpose();
  const double defect = (a - b).norm();
  if (defect > 1e-6 * std::max(1.0, dgamma.norm())) {
    throw DomainError("sld_pure: purity-breaking derivative, closed forms differ by " +
                      std::to_string(defect));
  }
  const RealMatrix phi = 0.25 * (a + b);
  const RealVector zeta_disp = 2.0 * ldlt.solve(d.ddelta);
  return assemble_lab(m.gamma, m.delta, phi, zeta_disp);
}

double qfi_pure(const GaussianMoments& m, const MomentDerivatives& d) {
  const RealMatrix dgamma = require_symmetric(d.dgamma, 1e-9, "qfi_pure");
  const SymplecticDecomposition w = williamson(m.gamma);
  if (w.spectrum[0] > 1.0 + pure_floor) {
    throw ArgumentError("qfi_pure: state is not pure (symplectic eigenvalue " +
                        std::to_string(w.spectrum[0]) + "); use qfi_from_moments");
  }
  auto ldlt = m.gamma.ldlt();
  const RealMatrix x = ldlt.solve(dgamma);
  const RealMatrix j = symplectic_form(m.modes());
  const RealMatrix a = ldlt.solve(x.transpose());
  const double defect = (a + j * dgamma * j.transpose()).norm();
  if (defect > 1e-6 * std::max(1.0, dgamma.norm())) {
    throw DomainError("qfi_pure: purity-breaking derivative, closed forms differ by " +
                      std::to_string(defect));
  }
  const RealVector gd = ldlt.solve(d.ddelta);
  return 0.25 * (x * x).trace() + 2.0 * d.ddelta.dot(gd);
}

QuadraticSLD sld_degenerate(const GaussianMoments& m, const MomentDerivatives& d) {
  check_pair(d.dgamma, d.ddelta, "sld_degenerate");
  if (d.dgamma.rows() != m.gamma.rows()) {
    throw ArgumentError("sld_degenerate: derivative dimension does not match state");
  }
  const RealMatrix dgamma = require_symmetric(d.dgamma, 1e-9, "sld_degenerate");
  const SymplecticDecomposition w = williamson(m.gamma);
  const int n = m.modes();
  const double spread = w.spectrum[0] - w.spectrum[n - 1];
  if (spread > 1e-8) {
    throw ArgumentError("sld_degenerate: symplectic spectrum not degenerate (range " +
                        std::to_string(spread) + "); use sld_from_moments");
  }
  const double lam = w.spectrum[0];
  if (lam <= 1.0 + pure_floor) {
    throw ArgumentError("sld_degenerate: degenerate spectrum is pure; use sld_pure");
  }
  const double l4 = lam * lam * lam * lam;
  const RealMatrix j = symplectic_form(n);
  auto ldlt = m.gamma.ldlt();
  const RealMatrix a = ldlt.solve(ldlt.solve(dgamma).transpose()).transpose();
  const RealMatrix b = j * dgamma * j.transpose();
  const RealMatrix phi = (l4 * a + b) / (l4 - 1.0);
  const RealVector zeta_disp = 2.0 * ldlt.solve(d.ddelta);
  return assemble_lab(m.gamma, m.delta, phi, zeta_disp);
}

double qfi_degenerate(const GaussianMoments& m, const MomentDerivatives& d) {
  check_pair(d.dgamma, d.ddelta, "qfi_degenerate");
  if (d.dgamma.rows() != m.gamma.rows()) {
    throw ArgumentError("qfi_degenerate: derivative dimension does not match state");
  }
  const RealMatrix dgamma = require_symmetric(d.dgamma, 1e-9, "qfi_degenerate");
  const SymplecticDecomposition w = williamson(m.gamma);
  const int n = m.modes();
  if (w.spectrum[0] - w.spectrum[n - 1] > 1e-8) {
    throw ArgumentError("qfi_degenerate: symplectic spectrum not degenerate; use qfi_from_moments");
  }
  const double lam = w.spectrum[0];
  if (lam <= 1.0 + pure_floor) {
    throw ArgumentError("qfi_degenerate: degenerate spectrum is pure; use qfi_pure");
  }
  const double l4 = lam * lam * lam * lam;
  const RealMatrix j = symplectic_form(n);
  const RealMatrix x = m.gamma.ldlt().solve(dgamma);
  const RealMatrix gj = dgamma * j;
  const RealVector gd = m.gamma.ldlt().solve(d.ddelta);
  return (l4 * (x * x).trace() - (gj * gj).trace()) / (2.0 * (l4 - 1.0)) +
         2.0 * d.ddelta.dot(gd);
}

double qfi_noisy_approx(const GaussianMoments& m, const MomentDerivatives& d) {
  check_pair(d.dgamma, d.ddelta, "qfi_noisy_approx");
  if (d.dgamma.rows() != m.gamma.rows()) {
    throw ArgumentError("qfi_noisy_approx: derivative dimension does not match state");
  }
  const RealMatrix dgamma = require_symmetric(d.dgamma, 1e-9, "qfi_noisy_approx");
  const RealMatrix x = m.gamma.ldlt().solve(dgamma);
  const RealVector gd = m.gamma.ldlt().solve(d.ddelta);
  return 0.5 * (x * x).trace() + 2.0 * d.ddelta.dot(gd);
}

GaussianResiduals sld_residuals(const GaussianMoments& m, const MomentDerivatives& d,
                                const QuadraticSLD& sld) {
  const RealMatrix dgamma = 0.5 * (d.dgamma + d.dgamma.transpose());
  const RealMatrix j = symplectic_form(m.modes());
  GaussianResiduals res;
  const RealMatrix gamma_rhs =
      m.gamma * sld.phi * m.gamma - j * sld.phi * j.transpose();
  res.gamma_eq = (dgamma - gamma_rhs).norm() / std::max(1.0, dgamma.norm());
  const RealVector delta_rhs = 0.5 * m.gamma * (sld.zeta + 2.0 * sld.phi * m.delta);
  res.delta_eq = (d.ddelta - delta_rhs).norm() / std::max(1.0, d.ddelta.norm());
  res.mean_eq = std::abs(0.5 * (m.gamma * sld.phi).trace() + m.delta.dot(sld.phi * m.delta) +
                         m.delta.dot(sld.zeta) + sld.nu);
  return res;
}

}  // namespace qfikit::gaussian
