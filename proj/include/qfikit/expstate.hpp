#pragma once

// Symmetric logarithmic derivative and quantum Fisher information for
// finite-dimensional states kept in exponential form rho = exp(G).
// Four independent routes to the SLD (eigenbasis weights, direct solve from
// rhodot, truncated operator series, unitary-family closed form) plus the
// integral representation of rhodot used as a reference oracle.

#include <boost/multiprecision/cpp_int.hpp>

#include "qfikit/numkit.hpp"

namespace qfikit::expstate {

using numkit::EigenSystem;
using numkit::HermitianOperator;
using numkit::Matrix;

// Full-rank state rho = exp(G) with G Hermitian and tr(exp(G)) = 1 within
// 1e-9. The eigendecomposition of G is computed once and cached.
class ExponentialState {
 public:
  explicit ExponentialState(const HermitianOperator& g);

  // Shifts an arbitrary Hermitian H by -log(tr exp(H)) * I so the result is a
  // valid generator; the eigenbasis is reused, only the eigenvalues move.
  static ExponentialState normalized(const HermitianOperator& h);

  const HermitianOperator& generator() const { return g_; }
  const EigenSystem& eigensystem() const { return es_; }
  Eigen::Index dim() const { return g_.dim(); }
  double spectral_spread() const;

  Matrix density() const;

 private:
  ExponentialState(HermitianOperator g, EigenSystem es);
  HermitianOperator g_;
  EigenSystem es_;
};

struct SLDResult {
  HermitianOperator sld;
  double qfi = 0.0;
};

using Rational = boost::multiprecision::cpp_rational;

// Bernoulli number B_m (B_1 = -1/2 convention), exact.
Rational bernoulli(int m);

// Taylor coefficient f_n of tanh(t/2)/(t/2) = sum f_n t^n, exact. Zero for
// odd n; supported through n = 60.
Rational f_coefficient(int n);
double f_coefficient_d(int n);

// tanh(t/2)/(t/2), even in t, with a series branch for |t| < 1e-4. Values lie
// in (0, 1].
double f_scalar(double t);

// L_jk = f(g_j - g_k) Gdot_jk in the eigenbasis of G. Requires tr(rho Gdot)
// = 0 within 1e-8; the residual trace component is projected out.
SLDResult sld_eigenbasis(const ExponentialState& state, const HermitianOperator& gdot);

// Reference route: solves rhodot = (L rho + rho L)/2 entrywise in the
// eigenbasis of rho. Requires rho full rank (above numkit::rank_floor) and
// tr(rhodot) = 0 within 1e-8.
SLDResult sld_direct(const HermitianOperator& rho, const HermitianOperator& rhodot);

// Truncated nested-commutator series sum_n f_n C^n(Gdot). Valid only while
// the spectral spread of G stays below pi; order is capped at 60.
SLDResult sld_series(const ExponentialState& state, const HermitianOperator& gdot,
                     int order = 40);

// Closed form for rho(theta) = exp(-i theta H) rho exp(i theta H):
// L_jk = 2i tanh((g_j - g_k)/2) H_jk, zero on the diagonal.
SLDResult sld_unitary_family(const ExponentialState& state, const HermitianOperator& h);

// rhodot = integral_0^1 exp(sG) Gdot exp((1-s)G) ds by Gauss-Legendre in the
// eigenbasis. quad_order must lie in [8, 64].
Matrix rhodot_wilcox(const ExponentialState& state, const HermitianOperator& gdot,
                     int quad_order = 32);

// Same quantity in closed form, rhodot_jk = e^{g_k} h(g_j - g_k) Gdot_jk with
// h(t) = (e^t - 1)/t. Used for residual checks.
Matrix rhodot_eigen(const ExponentialState& state, const HermitianOperator& gdot);

// Cramer-Rao variance bound 1/(trials * qfi).
double crb(double qfi, long trials = 1);

}  // namespace qfikit::expstate
