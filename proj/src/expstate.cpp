#include "qfikit/expstate.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qfikit::expstate {

namespace {

using boost::multiprecision::cpp_int;

constexpr int max_series_order = 60;

struct CoefficientTables {
  std::vector<Rational> b;    // B_0 .. B_62
  std::vector<Rational> f;    // f_0 .. f_60
  std::vector<double> f_dbl;
};

CoefficientTables build_tables() {
  const int bmax = max_series_order + 2;
  CoefficientTables t;
  t.b.assign(bmax + 1, Rational(0));
  t.b[0] = 1;
  // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j, exact over the rationals.
  for (int m = 1; m <= bmax; ++m) {
    Rational acc = 0;
    cpp_int binom = 1;  // C(m+1, j), starting at j = 0
    for (int j = 0; j < m; ++j) {
      acc += Rational(binom) * t.b[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    t.b[m] = -acc / (m + 1);
  }
  // f_n = 4 (4^{n/2+1} - 1) B_{n+2} / (n+2)! for even n, zero for odd n.
  std::vector<cpp_int> fact(bmax + 1);
  fact[0] = 1;
  for (int k = 1; k <= bmax; ++k) fact[k] = fact[k - 1] * k;
  t.f.assign(max_series_order + 1, Rational(0));
  t.f_dbl.assign(max_series_order + 1, 0.0);
  cpp_int pow4 = 4;  // 4^{n/2 + 1}
  for (int n = 0; n <= max_series_order; n += 2) {
    t.f[n] = Rational(4) * Rational(pow4 - 1) * t.b[n + 2] / Rational(fact[n + 2]);
    t.f_dbl[n] = t.f[n].convert_to<double>();
    pow4 *= 4;
  }
  return t;
}

const CoefficientTables& tables() {
  static const CoefficientTables t = build_tables();
  return t;
}

// Transform gdot into the eigenbasis of G, enforce the normalization
// constraint tr(rho gdot) = 0, and project the residual trace component out.
Matrix eigenbasis_traceless(const ExponentialState& state, const HermitianOperator& gdot,
                            const std::string& who) {
  if (gdot.dim() != state.dim()) {
    throw ArgumentError(who + ": derivative dimension " + std::to_string(gdot.dim()) +
                        " does not match state dimension " + std::to_string(state.dim()));
  }
  const EigenSystem& es = state.eigensystem();
  Matrix gt = es.vectors.adjoint() * gdot.matrix() * es.vectors;
  double c = 0.0;
  for (Eigen::Index j = 0; j < gt.rows(); ++j) {
    c += std::exp(es.values[j]) * gt(j, j).real();
  }
  if (std::abs(c) > 1e-8) {
    throw ArgumentError(who + ": tr(rho * Gdot) = " + std::to_string(c) +
                        ", expected 0 within 1e-8 for a normalized family");
  }
  for (Eigen::Index j = 0; j < gt.rows(); ++j) gt(j, j) -= c;
  return gt;
}

// tr(rho L^2) evaluated as a weighted sum over eigenbasis entries; never
// forms the product rho L^2.
double qfi_weighted(const numkit::RealVector& weights, const Matrix& lt) {
  double qfi = 0.0;
  for (Eigen::Index j = 0; j < lt.rows(); ++j) {
    for (Eigen::Index k = 0; k < lt.cols(); ++k) {
      qfi += weights[j] * std::norm(lt(j, k));
    }
  }
  return qfi;
}

numkit::RealVector exp_of(const numkit::RealVector& v) {
  return v.array().exp();
}

}  // namespace

ExponentialState::ExponentialState(HermitianOperator g, EigenSystem es)
    : g_(std::move(g)), es_(std::move(es)) {}

ExponentialState::ExponentialState(const HermitianOperator& g)
    : g_(g), es_(numkit::eig_hermitian(g)) {
  double z = 0.0;
  for (Eigen::Index j = 0; j < es_.values.size(); ++j) z += std::exp(es_.values[j]);
  if (std::abs(z - 1.0) > 1e-9) {
    throw ArgumentError("ExponentialState: tr(exp(G)) = " + std::to_string(z) +
                        ", expected 1 within 1e-9; use ExponentialState::normalized");
  }
}

ExponentialState ExponentialState::normalized(const HermitianOperator& h) {
  EigenSystem es = numkit::eig_hermitian(h);
  const double gmax = es.values.maxCoeff();
  double z = 0.0;
  for (Eigen::Index j = 0; j < es.values.size(); ++j) z += std::exp(es.values[j] - gmax);
  const double lognorm = gmax + std::log(z);
  es.values.array() -= lognorm;
  Matrix shifted = h.matrix() - lognorm * Matrix::Identity(h.dim(), h.dim());
  return ExponentialState(HermitianOperator(std::move(shifted)), std::move(es));
}

double ExponentialState::spectral_spread() const {
  return es_.values.maxCoeff() - es_.values.minCoeff();
}

Matrix ExponentialState::density() const {
  return numkit::matrix_function(es_, [](double g) { return std::exp(g); }).matrix();
}

Rational bernoulli(int m) {
  if (m < 0 || m > max_series_order + 2) {
    throw ArgumentError("bernoulli: index must lie in [0, " +
                        std::to_string(max_series_order + 2) + "], got " + std::to_string(m));
  }
  return tables().b[m];
}

Rational f_coefficient(int n) {
  if (n < 0 || n > max_series_order) {
    throw ArgumentError("f_coefficient: order must lie in [0, " +
                        std::to_string(max_series_order) + "], got " + std::to_string(n));
  }
  return tables().f[n];
}

double f_coefficient_d(int n) {
  if (n < 0 || n > max_series_order) {
    throw ArgumentError("f_coefficient_d: order must lie in [0, " +
                        std::to_string(max_series_order) + "], got " + std::to_string(n));
  }
  return tables().f_dbl[n];
}

double f_scalar(double t) {
  const double a = std::abs(t);  // f is even; |t| keeps that exact in floating point
  if (a < 1e-4) {
    const double t2 = a * a;
    return 1.0 +
           t2 * (-1.0 / 12 +
                 t2 * (1.0 / 120 + t2 * (-17.0 / 20160 + t2 * (31.0 / 362880))));
  }
  const double half = 0.5 * a;
  return std::tanh(half) / half;
}

SLDResult sld_eigenbasis(const ExponentialState& state, const HermitianOperator& gdot) {
  const EigenSystem& es = state.eigensystem();
  Matrix lt = eigenbasis_traceless(state, gdot, "sld_eigenbasis");
  for (Eigen::Index j = 0; j < lt.rows(); ++j) {
    for (Eigen::Index k = 0; k < lt.cols(); ++k) {
      lt(j, k) *= f_scalar(es.values[j] - es.values[k]);
    }
  }
  const double qfi = qfi_weighted(exp_of(es.values), lt);
  Matrix l = es.vectors * lt * es.vectors.adjoint();
  return SLDResult{HermitianOperator::closest(l), qfi};
}

SLDResult sld_direct(const HermitianOperator& rho, const HermitianOperator& rhodot) {
  if (rhodot.dim() != rho.dim()) {
    throw ArgumentError("sld_direct: rhodot dimension does not match rho");
  }
  EigenSystem es = numkit::eig_hermitian(rho);
  const Eigen::Index n = es.values.size();
  const double pmax = es.values[n - 1];
  if (pmax <= 0.0 || es.values[0] <= numkit::rank_floor * pmax) {
    throw DomainError("sld_direct: state not full rank (smallest eigenvalue " +
                      std::to_string(es.values[0]) + ")");
  }
  const double tr = rho.matrix().trace().real();
  if (std::abs(tr - 1.0) > 1e-6) {
    throw ArgumentError("sld_direct: tr(rho) = " + std::to_string(tr) +
                        ", expected 1 within 1e-6");
  }
  Matrix rt = es.vectors.adjoint() * rhodot.matrix() * es.vectors;
  double t = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) t += rt(j, j).real();
  if (std::abs(t) > 1e-8) {
    throw ArgumentError("sld_direct: tr(rhodot) = " + std::to_string(t) +
                        ", expected 0 within 1e-8");
  }
  for (Eigen::Index j = 0; j < n; ++j) rt(j, j) -= t * es.values[j];
  Matrix lt(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      lt(j, k) = 2.0 * rt(j, k) / (es.values[j] + es.values[k]);
    }
  }
  const double qfi = qfi_weighted(es.values, lt);
  Matrix l = es.vectors * lt * es.vectors.adjoint();
  return SLDResult{HermitianOperator::closest(l), qfi};
}

SLDResult sld_series(const ExponentialState& state, const HermitianOperator& gdot,
                     int order) {
  if (order < 0 || order > max_series_order) {
    throw ArgumentError("sld_series: order must lie in [0, " +
                        std::to_string(max_series_order) + "], got " + std::to_string(order));
  }
  const double spread = state.spectral_spread();
  if (spread >= std::numbers::pi) {
    throw DomainError("sld_series: spectral spread " + std::to_string(spread) +
                      " >= pi, series diverges; use the eigenbasis route");
  }
  if (gdot.dim() != state.dim()) {
    throw ArgumentError("sld_series: derivative dimension does not match state");
  }
  const EigenSystem& es = state.eigensystem();
  // Normalization constraint: subtract the trace component tr(rho Gdot) I
  // before iterating (the identity drops out of every commutator anyway).
  double c = 0.0;
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    c += std::exp(es.values[j]) *
         (es.vectors.col(j).adjoint() * gdot.matrix() * es.vectors.col(j))(0).real();
  }
  if (std::abs(c) > 1e-8) {
    throw ArgumentError("sld_series: tr(rho * Gdot) = " + std::to_string(c) +
                        ", expected 0 within 1e-8 for a normalized family");
  }
  const Matrix a =
      gdot.matrix() - c * Matrix::Identity(state.dim(), state.dim());
  const Matrix& g = state.generator().matrix();
  Matrix l = a;  // f_0 = 1
  Matrix term = a;
  for (int n = 1; n <= order; ++n) {
    term = g * term - term * g;
    if (n % 2 == 0) l += f_coefficient_d(n) * term;
  }
  Matrix lt = es.vectors.adjoint() * l * es.vectors;
  const double qfi = qfi_weighted(exp_of(es.values), lt);
  return SLDResult{HermitianOperator::closest(l), qfi};
}

SLDResult sld_unitary_family(const ExponentialState& state, const HermitianOperator& h) {
  if (h.dim() != state.dim()) {
    throw ArgumentError("sld_unitary_family: generator dimension does not match state");
  }
  const EigenSystem& es = state.eigensystem();
  const Eigen::Index n = es.values.size();
  Matrix ht = es.vectors.adjoint() * h.matrix() * es.vectors;
  Matrix lt = Matrix::Zero(n, n);
  const numkit::Complex two_i(0.0, 2.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      lt(j, k) = two_i * std::tanh(0.5 * (es.values[j] - es.values[k])) * ht(j, k);
      lt(k, j) = std::conj(lt(j, k));
    }
  }
  const double qfi = qfi_weighted(exp_of(es.values), lt);
  Matrix l = es.vectors * lt * es.vectors.adjoint();
  return SLDResult{HermitianOperator::closest(l), qfi};
}

Matrix rhodot_wilcox(const ExponentialState& state, const HermitianOperator& gdot,
                     int quad_order) {
  if (quad_order < 8 || quad_order > 64) {
    throw ArgumentError("rhodot_wilcox: quadrature order must lie in [8, 64], got " +
                        std::to_string(quad_order));
  }
  if (gdot.dim() != state.dim()) {
    throw ArgumentError("rhodot_wilcox: derivative dimension does not match state");
  }
  const EigenSystem& es = state.eigensystem();
  const numkit::Quadrature q = numkit::gauss_legendre(quad_order);
  Matrix gt = es.vectors.adjoint() * gdot.matrix() * es.vectors;
  for (Eigen::Index j = 0; j < gt.rows(); ++j) {
    for (Eigen::Index k = 0; k < gt.cols(); ++k) {
      double w = 0.0;
      for (int m = 0; m < quad_order; ++m) {
        w += q.weights[m] *
             std::exp(q.nodes[m] * es.values[j] + (1.0 - q.nodes[m]) * es.values[k]);
      }
      gt(j, k) *= w;
    }
  }
  return es.vectors * gt * es.vectors.adjoint();
}

Matrix rhodot_eigen(const ExponentialState& state, const HermitianOperator& gdot) {
  if (gdot.dim() != state.dim()) {
    throw ArgumentError("rhodot_eigen: derivative dimension does not match state");
  }
  const EigenSystem& es = state.eigensystem();
  Matrix gt = es.vectors.adjoint() * gdot.matrix() * es.vectors;
  for (Eigen::Index j = 0; j < gt.rows(); ++j) {
    for (Eigen::Index k = 0; k < gt.cols(); ++k) {
      const double d = es.values[j] - es.values[k];
      const double h = (d == 0.0) ? 1.0 : std::expm1(d) / d;
      gt(j, k) *= std::exp(es.values[k]) * h;
    }
  }
  return es.vectors * gt * es.vectors.adjoint();
}

double crb(double qfi, long trials) {
  if (trials < 1) {
    throw ArgumentError("crb: trials must be >= 1, got " + std::to_string(trials));
  }
  if (!(qfi > 0.0)) {
    throw DomainError("crb: variance bound undefined for nonpositive information " +
                      std::to_string(qfi));
  }
  return 1.0 / (qfi * static_cast<double>(trials));
}

}  // namespace qfikit::expstate
