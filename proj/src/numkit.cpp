#include "qfikit/numkit.hpp"

#include <cmath>
#include <string>

namespace qfikit::numkit {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ArgumentError(std::string(what) + ": expected a nonempty square matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  check_square(m_, "HermitianOperator");
  for (Eigen::Index j = 0; j < m_.rows(); ++j) {
    for (Eigen::Index k = j; k < m_.cols(); ++k) {
      if (std::abs(m_(j, k) - std::conj(m_(k, j))) > 1e-12) {
        throw ArgumentError("HermitianOperator: matrix is not Hermitian at entry (" +
                            std::to_string(j) + "," + std::to_string(k) + ")");
      }
    }
  }
}

HermitianOperator HermitianOperator::closest(const Matrix& m) {
  check_square(m, "HermitianOperator::closest");
  Matrix sym = 0.5 * (m + m.adjoint());
  return HermitianOperator(std::move(sym), Trusted{});
}

EigenSystem eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw DomainError("eig_hermitian: eigensolver failed to converge for dimension " +
                      std::to_string(a.dim()));
  }
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator matrix_function(const EigenSystem& es,
                                  const std::function<double(double)>& fn) {
  RealVector mapped(es.values.size());
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    const double y = fn(es.values[j]);
    if (!std::isfinite(y)) {
      throw DomainError("matrix_function: function not finite at eigenvalue " +
                        std::to_string(es.values[j]));
    }
    mapped[j] = y;
  }
  Matrix out = es.vectors * mapped.asDiagonal() * es.vectors.adjoint();
  return HermitianOperator::closest(out);
}

HermitianOperator matrix_function(const HermitianOperator& a,
                                  const std::function<double(double)>& fn) {
  return matrix_function(eig_hermitian(a), fn);
}

HermitianOperator log_density(const HermitianOperator& rho) {
  const double tr = rho.matrix().trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw ArgumentError("log_density: trace is " + std::to_string(tr) +
                        ", expected 1 within 1e-10");
  }
  EigenSystem es = eig_hermitian(rho);
  const double pmax = es.values[es.values.size() - 1];
  if (pmax <= 0.0 || es.values[0] <= rank_floor * pmax) {
    throw DomainError("log_density: state not full rank (smallest eigenvalue " +
                      std::to_string(es.values[0]) + ")");
  }
  return matrix_function(es, [](double p) { return std::log(p); });
}

Quadrature gauss_legendre(int order) {
  if (order < 1 || order > 64) {
    throw ArgumentError("gauss_legendre: order must lie in [1, 64], got " +
                        std::to_string(order));
  }
  // Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix with
  // off-diagonals b_k = k / sqrt(4k^2 - 1) are the nodes on [-1, 1]; weights
  // are 2 * (first eigenvector component)^2. Shift everything to [0, 1].
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) {
    throw DomainError("gauss_legendre: Jacobi eigensolve failed for order " +
                      std::to_string(order));
  }
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  for (int j = 0; j < order; ++j) {
    q.nodes[j] = 0.5 * (solver.eigenvalues()[j] + 1.0);
    const double v0 = solver.eigenvectors()(0, j);
    q.weights[j] = v0 * v0;  // 2 v0^2 on [-1,1], halved by the interval map
  }
  return q;
}

}  // namespace qfikit::numkit
