#include "qfikit/symplectic.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <string>

namespace qfikit::symplectic {

namespace {

void check_even_square(const RealMatrix& m, const char* who) {
  if (m.rows() == 0 || m.rows() != m.cols() || m.rows() % 2 != 0) {
    throw ArgumentError(std::string(who) + ": expected a square matrix of even dimension, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void check_symmetric(const RealMatrix& m, const char* who) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ArgumentError(std::string(who) + ": matrix is not symmetric within 1e-10");
  }
}

// Shared Williamson engine for a symmetric positive-definite M: returns
// symplectic T and per-mode values lambda (ascending) with M = T D T^T,
// D = diag(lambda, lambda). Built from the spectral decomposition of
// K = M^{1/2} J M^{1/2}: for each eigenpair iK w = lambda w the real and
// imaginary parts of w give one normal-mode plane.
struct CoreResult {
  RealMatrix t;
  RealVector lambda;
};

CoreResult williamson_core(const RealMatrix& m, const char* who) {
  const int dim = static_cast<int>(m.rows());
  const int n = dim / 2;
  Eigen::SelfAdjointEigenSolver<RealMatrix> ms(m);
  if (ms.info() != Eigen::Success) {
    throw DomainError(std::string(who) + ": eigensolve failed for dimension " +
                      std::to_string(dim));
  }
  if (ms.eigenvalues()[0] <= 0.0) {
    throw DomainError(std::string(who) + ": matrix not positive definite (eigenvalue " +
                      std::to_string(ms.eigenvalues()[0]) + ")");
  }
  const RealMatrix msqrt = ms.eigenvectors() *
                           ms.eigenvalues().cwiseSqrt().asDiagonal() *
                           ms.eigenvectors().transpose();
  const RealMatrix j = symplectic_form(n);
  const RealMatrix k = msqrt * j * msqrt;
  ComplexMatrix ik = std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ks(ik);
  if (ks.info() != Eigen::Success) {
    throw DomainError(std::string(who) + ": normal-mode eigensolve failed for dimension " +
                      std::to_string(dim));
  }
  // Eigenvalues of iK come in +-lambda pairs; the positive half sits in the
  // upper block of the ascending spectrum. K u = lambda v and K v = -lambda u
  // for w = u + iv, so sqrt(2) v spans the x-column and sqrt(2) u the
  // p-column of the orthogonal normal-mode frame.
  RealMatrix o(dim, dim);
  RealVector lambda(n);
  for (int mode = 0; mode < n; ++mode) {
    const Eigen::VectorXcd w = ks.eigenvectors().col(n + mode);
    lambda[mode] = ks.eigenvalues()[n + mode];
    o.col(mode) = std::sqrt(2.0) * w.imag();
    o.col(mode + n) = std::sqrt(2.0) * w.real();
  }
  RealVector dinv(dim);
  for (int mode = 0; mode < n; ++mode) {
    dinv[mode] = dinv[mode + n] = 1.0 / std::sqrt(lambda[mode]);
  }
  RealMatrix t = msqrt * o * dinv.asDiagonal();
  // Fix the per-mode rotation gauge: rotate each (x, p) column pair so the
  // x-column's overlap with a reference axis is nonnegative and the
  // p-column's overlap there vanishes. Reference is the first quadrature
  // axis unless the pair has essentially no support on it.
  for (int mode = 0; mode < n; ++mode) {
    Eigen::VectorXd xc = t.col(mode);
    Eigen::VectorXd pc = t.col(mode + n);
    int axis = 0;
    double best = std::hypot(xc[0], pc[0]);
    const double scale = std::sqrt(xc.squaredNorm() + pc.squaredNorm());
    if (best <= 1e-9 * scale) {
      for (int cand = 1; cand < dim; ++cand) {
        const double mag = std::hypot(xc[cand], pc[cand]);
        if (mag > best) {
          best = mag;
          axis = cand;
        }
      }
    }
    const double phi = std::atan2(pc[axis], xc[axis]);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    t.col(mode) = c * xc + s * pc;
    t.col(mode + n) = -s * xc + c * pc;
  }
  return CoreResult{std::move(t), std::move(lambda)};
}

}  // namespace

RealMatrix symplectic_form(int modes) {
  if (modes < 1) {
    throw ArgumentError("symplectic_form: mode count must be positive, got " +
                        std::to_string(modes));
  }
  RealMatrix j = RealMatrix::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    j(k, k + modes) = 1.0;
    j(k + modes, k) = -1.0;
  }
  return j;
}

double is_symplectic(const RealMatrix& s) {
  check_even_square(s, "is_symplectic");
  const RealMatrix j = symplectic_form(static_cast<int>(s.rows()) / 2);
  return (s * j * s.transpose() - j).norm();
}

SymplecticDecomposition williamson(const RealMatrix& gamma) {
  check_even_square(gamma, "williamson");
  check_symmetric(gamma, "williamson");
  CoreResult core = williamson_core(gamma, "williamson");
  const int n = static_cast<int>(core.lambda.size());
  if (core.lambda[0] < 1.0 - 1e-6) {
    throw DomainError("williamson: unphysical covariance, symplectic eigenvalue " +
                      std::to_string(core.lambda[0]) + " < 1");
  }
  // Descending symplectic eigenvalues; reorder the (x, p) column pairs of T
  // to match, then invert symplectically: T^-1 = -J T^T J.
  RealMatrix t(2 * n, 2 * n);
  RealVector spectrum(n);
  for (int mode = 0; mode < n; ++mode) {
    const int src = n - 1 - mode;
    spectrum[mode] = core.lambda[src];
    t.col(mode) = core.t.col(src);
    t.col(mode + n) = core.t.col(src + n);
  }
  const RealMatrix j = symplectic_form(n);
  SymplecticDecomposition out;
  out.s = -j * t.transpose() * j;
  out.spectrum = std::move(spectrum);
  return out;
}

SymplecticDecomposition normal_modes(const RealMatrix& omega) {
  check_even_square(omega, "normal_modes");
  check_symmetric(omega, "normal_modes");
  CoreResult core = williamson_core(omega, "normal_modes");
  // Omega = T D T^T with D = diag(eps, eps), so S = T^T gives
  // Omega = S^T D S. Frequencies stay in ascending core order.
  SymplecticDecomposition out;
  out.s = core.t.transpose();
  out.spectrum = std::move(core.lambda);
  return out;
}

ComplexMatrix ladder_map(int modes) {
  if (modes < 1) {
    throw ArgumentError("ladder_map: mode count must be positive, got " +
                        std::to_string(modes));
  }
  const std::complex<double> i(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ComplexMatrix v = ComplexMatrix::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    v(k, k) = inv_sqrt2;
    v(k, k + modes) = inv_sqrt2;
    v(k + modes, k) = -i * inv_sqrt2;
    v(k + modes, k + modes) = i * inv_sqrt2;
  }
  return v;
}

RealMatrix random_symplectic(int modes, std::uint64_t seed) {
  if (modes < 1 || modes > 4) {
    throw ArgumentError("random_symplectic: mode count must lie in [1, 4], got " +
                        std::to_string(modes));
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  };
  auto normal = [&]() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  // Haar unitary via QR of a complex Ginibre matrix with the phases of the
  // diagonal of R folded back in.
  auto haar_unitary = [&](int n) {
    ComplexMatrix z(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) z(r, c) = std::complex<double>(normal(), normal());
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    const ComplexMatrix r = qr.matrixQR();
    for (int c = 0; c < n; ++c) {
      const std::complex<double> d = r(c, c);
      if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
    }
    return q;
  };
  // K(U) = [[Re U, -Im U], [Im U, Re U]] is orthogonal and symplectic.
  auto ortho_symplectic = [&](const ComplexMatrix& u) {
    const int n = static_cast<int>(u.rows());
    RealMatrix k(2 * n, 2 * n);
    k.topLeftCorner(n, n) = u.real();
    k.topRightCorner(n, n) = -u.imag();
    k.bottomLeftCorner(n, n) = u.imag();
    k.bottomRightCorner(n, n) = u.real();
    return k;
  };
  const RealMatrix k1 = ortho_symplectic(haar_unitary(modes));
  const RealMatrix k2 = ortho_symplectic(haar_unitary(modes));
  RealVector squeeze(2 * modes);
  for (int m = 0; m < modes; ++m) {
    const double z = 1.4 * (uniform() - 0.5);  // in [-0.7, 0.7]
    squeeze[m] = std::exp(z);
    squeeze[m + modes] = std::exp(-z);
  }
  return k1 * squeeze.asDiagonal() * k2;
}

}  // namespace qfikit::symplectic
