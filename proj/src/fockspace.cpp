#include "qfikit/fockspace.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace qfikit::fock {

namespace {

void check_dim(int dim, const char* who) {
  if (dim < 2) {
    throw ArgumentError(std::string(who) + ": truncation dimension must be at least 2, got " +
                        std::to_string(dim));
  }
}

// exp(A) for anti-Hermitian A, via the spectral decomposition of the
// Hermitian matrix -iA; exactly unitary up to roundoff.
Matrix exp_antihermitian(const Matrix& a) {
  const Complex mi(0.0, -1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(mi * a);
  if (es.info() != Eigen::Success) {
    throw DomainError("exp_antihermitian: eigensolve failed for dimension " +
                      std::to_string(a.rows()));
  }
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases[j] = std::exp(Complex(0.0, es.eigenvalues()[j]));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Matrix lowering(int dim) {
  check_dim(dim, "lowering");
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix number_op(int dim) {
  check_dim(dim, "number_op");
  Matrix n = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Quadratures quadratures(int dim) {
  const Matrix a = lowering(dim);
  const Matrix ad = a.adjoint();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Quadratures q;
  q.x = inv_sqrt2 * (a + ad);
  q.p = Complex(0.0, -1.0) * inv_sqrt2 * (a - ad);
  return q;
}

Matrix thermal_density(double nbar, int dim) {
  check_dim(dim, "thermal_density");
  if (nbar < 0.0) {
    throw ArgumentError("thermal_density: nbar must be nonnegative, got " +
                        std::to_string(nbar));
  }
  Matrix rho = Matrix::Zero(dim, dim);
  if (nbar == 0.0) {
    rho(0, 0) = 1.0;
    return rho;
  }
  const double ratio = nbar / (nbar + 1.0);
  const double leak = std::pow(ratio, dim);
  if (leak > 1e-6) {
    const int needed =
        static_cast<int>(std::ceil(std::log(1e-6) / std::log(ratio)));
    throw DomainError("thermal_density: truncated tail mass " + std::to_string(leak) +
                      " exceeds 1e-6 at dimension " + std::to_string(dim) +
                      "; increase truncation to at least " + std::to_string(needed));
  }
  double p = 1.0 / (nbar + 1.0);
  for (int n = 0; n < dim; ++n) {
    rho(n, n) = p;
    p *= ratio;
  }
  return rho;
}

Matrix displacement(Complex alpha, int dim) {
  check_dim(dim, "displacement");
  const Matrix a = lowering(dim);
  return exp_antihermitian(alpha * a.adjoint() - std::conj(alpha) * a);
}

Matrix squeeze(Complex xi, int dim) {
  check_dim(dim, "squeeze");
  const Matrix a = lowering(dim);
  const Matrix a2 = a * a;
  return exp_antihermitian(0.5 * (xi * a2.adjoint() - std::conj(xi) * a2));
}

Matrix gaussian_fock(double nbar, double r, double phi, Complex alpha, int dim) {
  const Matrix rho_th = thermal_density(nbar, dim);
  const Matrix s = squeeze(std::polar(r, phi), dim);
  const Matrix d = displacement(alpha, dim);
  const Matrix u = d * s;
  return u * rho_th * u.adjoint();
}

Matrix two_mode_squeezed_fock(double r, double nbar, int dim_per_mode) {
  check_dim(dim_per_mode, "two_mode_squeezed_fock");
  const Matrix a = lowering(dim_per_mode);
  const Matrix id = Matrix::Identity(dim_per_mode, dim_per_mode);
  const Matrix a1 = Eigen::kroneckerProduct(a, id).eval();
  const Matrix a2 = Eigen::kroneckerProduct(id, a).eval();
  const Matrix gen = r * (a1.adjoint() * a2.adjoint() - a1 * a2);
  const Matrix u = exp_antihermitian(gen);
  const Matrix rho_th = Eigen::kroneckerProduct(thermal_density(nbar, dim_per_mode),
                                                thermal_density(nbar, dim_per_mode))
                            .eval();
  return u * rho_th * u.adjoint();
}

MomentSample measure_moments(const Matrix& rho, const std::vector<Matrix>& quads) {
  const Eigen::Index m = static_cast<Eigen::Index>(quads.size());
  MomentSample out;
  out.delta.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    out.delta[j] = (rho * quads[j]).trace().real();
  }
  out.gamma.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j; k < m; ++k) {
      const Matrix anticomm = quads[j] * quads[k] + quads[k] * quads[j];
      const double raw = (rho * anticomm).trace().real();
      out.gamma(j, k) = out.gamma(k, j) = raw - 2.0 * out.delta[j] * out.delta[k];
    }
  }
  return out;
}

MomentSample measure_moments(const Matrix& rho) {
  const Quadratures q = quadratures(static_cast<int>(rho.rows()));
  return measure_moments(rho, {q.x, q.p});
}

OracleResult oracle_qfi(const std::function<Matrix(double)>& render, double theta,
                        double fd_step) {
  if (!(fd_step >= 1e-6 && fd_step <= 1e-2)) {
    throw ArgumentError("oracle_qfi: fd_step must lie in [1e-6, 1e-2], got " +
                        std::to_string(fd_step));
  }
  const Matrix r0 = render(theta);
  const Matrix rp = render(theta + fd_step);
  const Matrix rm = render(theta - fd_step);
  if (r0.rows() != r0.cols() || rp.rows() != r0.rows() || rm.rows() != r0.rows()) {
    throw ArgumentError("oracle_qfi: renderer returned inconsistent dimensions");
  }
  const Matrix rdot = (rp - rm) / (2.0 * fd_step);
  const numkit::EigenSystem es =
      numkit::eig_hermitian(numkit::HermitianOperator::closest(r0));
  const Eigen::Index n = es.values.size();
  const double pmax = es.values[n - 1];
  if (pmax <= 0.0) {
    throw DomainError("oracle_qfi: state has no positive eigenvalue");
  }
  Matrix rt = es.vectors.adjoint() * (0.5 * (rdot + rdot.adjoint())) * es.vectors;
  // project out the trace component so tr(rho L) stays pinned at zero
  double t = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) t += rt(j, j).real();
  for (Eigen::Index j = 0; j < n; ++j) rt(j, j) -= t * es.values[j];
  const double floor = numkit::rank_floor * pmax;
  Matrix lt = Matrix::Zero(n, n);
  double qfi = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pj = std::max(es.values[j], 0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double pk = std::max(es.values[k], 0.0);
      // keep support-kernel cross terms, drop kernel-kernel noise
      if (pj + pk > floor) {
        lt(j, k) = 2.0 * rt(j, k) / (pj + pk);
        qfi += pj * std::norm(lt(j, k));
      }
    }
  }
  OracleResult out;
  out.qfi = qfi;
  out.sld = es.vectors * lt * es.vectors.adjoint();
  return out;
}

}  // namespace qfikit::fock
