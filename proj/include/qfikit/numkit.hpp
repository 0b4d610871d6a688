#pragma once

// Dense Hermitian linear algebra used by every other module: validated
// Hermitian wrapper, eigendecomposition, spectral functions, and
// Gauss-Legendre rules for the operator integrals.

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "qfikit/errors.hpp"

namespace qfikit::numkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Eigenvalues of a density matrix at or below rank_floor (relative to the
// largest eigenvalue) are treated as numerically zero.
inline constexpr double rank_floor = 1e-12;

// Square complex matrix checked to be Hermitian entrywise within 1e-12
// (absolute) at construction. The raw entries are stored untouched.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);

  // For matrices assembled from floating-point arithmetic: replaces m by
  // (m + m^dagger)/2 before validating, so roundoff asymmetry cannot reject.
  static HermitianOperator closest(const Matrix& m);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  struct Trusted {};
  HermitianOperator(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

// Spectral data of a Hermitian matrix: values ascending, vectors the matching
// orthonormal columns.
struct EigenSystem {
  RealVector values;
  Matrix vectors;
};

EigenSystem eig_hermitian(const HermitianOperator& a);

// U f(diag) U^dagger. Throws DomainError naming the offending eigenvalue if
// fn is not finite there.
HermitianOperator matrix_function(const HermitianOperator& a,
                                  const std::function<double(double)>& fn);
HermitianOperator matrix_function(const EigenSystem& es,
                                  const std::function<double(double)>& fn);

// Generator G with exp(G) = rho for a full-rank density matrix. Requires
// tr(rho) = 1 within 1e-10 and all eigenvalues above rank_floor relative to
// the largest.
HermitianOperator log_density(const HermitianOperator& rho);

// Nodes and weights on [0, 1], exact for polynomials of degree 2*order - 1.
struct Quadrature {
  RealVector nodes;
  RealVector weights;
};

Quadrature gauss_legendre(int order);

}  // namespace qfikit::numkit
