#pragma once

// Real symplectic linear algebra for Gaussian states: the symplectic form,
// Williamson normal forms of covariance and generator matrices, the
// quadrature-to-ladder change of basis, and seeded random symplectics.
//
// Mode convention throughout: quadratures ordered r = (x_1..x_n, p_1..p_n).

#include <cstdint>

#include <Eigen/Dense>

#include "qfikit/errors.hpp"

namespace qfikit::symplectic {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

// J = [[0, I], [-I, 0]].
RealMatrix symplectic_form(int modes);

// Frobenius norm of S J S^T - J; zero iff S is exactly symplectic.
double is_symplectic(const RealMatrix& s);

struct SymplecticDecomposition {
  RealMatrix s;         // symplectic congruence
  RealVector spectrum;  // one entry per mode
};

// Williamson normal form of a positive-definite covariance matrix:
// S Gamma S^T = diag(Lambda, Lambda) with S symplectic and the symplectic
// eigenvalues Lambda sorted descending. Physical states need Lambda_j >= 1;
// values below 1 - 1e-6 raise DomainError. The per-mode rotation gauge is
// fixed by aligning each mode's x-row against the first quadrature axis
// (or the axis of largest support), making S deterministic for
// nondegenerate spectra.
SymplecticDecomposition williamson(const RealMatrix& gamma);

// Normal modes of a positive-definite quadratic generator:
// Omega = S^T diag(eps, eps) S with S symplectic and the mode frequencies
// eps sorted ascending -- so that coth(eps/2) is descending and the mode
// order matches williamson() of the corresponding covariance.
SymplecticDecomposition normal_modes(const RealMatrix& omega);

// Unitary V mapping ladder operators to quadratures, r = V a with
// a = (a_1..a_n, a^dag_1..a^dag_n); V^dag = (1/sqrt2) [[I, iI], [I, -iI]].
ComplexMatrix ladder_map(int modes);

// Seeded random symplectic: orthogonal-symplectic * squeeze * orthogonal-
// symplectic with Haar orthogonal factors and squeeze exponents in
// [-0.7, 0.7]. Supports 1 to 4 modes; deterministic per seed.
RealMatrix random_symplectic(int modes, std::uint64_t seed);

}  // namespace qfikit::symplectic
