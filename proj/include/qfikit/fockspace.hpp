#pragma once

// Truncated Fock-space machinery: ladder operators, exactly-unitary
// displacement and squeeze operators, displaced squeezed thermal states, and
// a finite-difference QFI oracle that is independent of every closed-form
// route in the library.

#include <functional>
#include <vector>

#include "qfikit/numkit.hpp"

namespace qfikit::fock {

using numkit::Complex;
using numkit::Matrix;

// a |n> = sqrt(n) |n-1> on an N-dimensional truncation.
Matrix lowering(int dim);
Matrix number_op(int dim);

// x = (a + a^dag)/sqrt2, p = -i (a - a^dag)/sqrt2, so that vacuum has unit
// covariance in the convention Gamma_jk = tr(rho {Dr_j, Dr_k}).
struct Quadratures {
  Matrix x;
  Matrix p;
};
Quadratures quadratures(int dim);

// Diagonal thermal state, p_n = nbar^n / (nbar+1)^{n+1}. The truncated tail
// mass (nbar/(nbar+1))^N must not exceed 1e-6.
Matrix thermal_density(double nbar, int dim);

// exp(alpha a^dag - conj(alpha) a), exactly unitary on the truncation.
Matrix displacement(Complex alpha, int dim);

// exp((xi a^dag^2 - conj(xi) a^2)/2), exactly unitary on the truncation.
Matrix squeeze(Complex xi, int dim);

// D(alpha) S(r e^{i phi}) rho_thermal S^dag D^dag.
Matrix gaussian_fock(double nbar, double r, double phi, Complex alpha, int dim);

// Two-mode squeezed thermal state exp(r(a^dag b^dag - ab)) acting on a
// symmetric thermal input, on a dim^2 truncation (mode ordering a, b).
Matrix two_mode_squeezed_fock(double r, double nbar, int dim_per_mode);

// First and second moments measured from a density matrix against a list of
// quadrature operators ordered (x_1..x_n, p_1..p_n).
struct MomentSample {
  Eigen::VectorXd delta;
  Eigen::MatrixXd gamma;
};
MomentSample measure_moments(const Matrix& rho, const std::vector<Matrix>& quads);
MomentSample measure_moments(const Matrix& rho);  // single mode

// Central-difference QFI oracle: rhodot = (rho(t+h) - rho(t-h)) / 2h, then
// the SLD solve in the eigenbasis of rho(t) with entries suppressed where
// the pair weight p_j + p_k falls below rank_floor (cross terms between
// support and kernel are kept, so pure states are handled). fd_step must lie
// in [1e-6, 1e-2].
struct OracleResult {
  double qfi = 0.0;
  Matrix sld;
};
OracleResult oracle_qfi(const std::function<Matrix(double)>& render, double theta,
                        double fd_step);

}  // namespace qfikit::fock
