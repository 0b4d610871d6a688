#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "qfikit/fockspace.hpp"

using namespace qfikit;
using namespace qfikit::fock;

namespace {
const Complex i_unit(0.0, 1.0);
}

TEST_CASE("ladder and number operators") {
  const Matrix a = lowering(4);
  REQUIRE(a(0, 1) == Complex(1.0, 0.0));
  REQUIRE(std::abs(a(1, 2) - Complex(std::sqrt(2.0), 0.0)) < 1e-15);
  REQUIRE(std::abs(a(2, 3) - Complex(std::sqrt(3.0), 0.0)) < 1e-15);
  REQUIRE(a.diagonal().norm() == 0.0);

  const Matrix n = number_op(4);
  REQUIRE((n - (a.adjoint() * a)).norm() < 1e-15);
  REQUIRE(n(3, 3).real() == 3.0);
}

TEST_CASE("canonical commutator holds away from the truncation edge") {
  const int dim = 12;
  const Quadratures q = quadratures(dim);
  const Matrix comm = q.x * q.p - q.p * q.x;
  // [x, p] = iI except in the last Fock level, which absorbs the truncation.
  for (int j = 0; j + 1 < dim; ++j) {
    REQUIRE(std::abs(comm(j, j) - i_unit) < 1e-14);
  }
  REQUIRE((q.x - q.x.adjoint()).norm() < 1e-14);
  REQUIRE((q.p - q.p.adjoint()).norm() < 1e-14);
}

TEST_CASE("thermal density: normalization, geometric ratio, limits") {
  const Matrix rho = thermal_density(1.0, 60);
  REQUIRE(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-12);
  for (int n = 0; n + 1 < 8; ++n) {
    REQUIRE(rho(n + 1, n + 1).real() / rho(n, n).real() == Catch::Approx(0.5).epsilon(1e-12));
  }
  REQUIRE(rho(0, 0).real() == Catch::Approx(0.5).epsilon(1e-12));

  const Matrix vac = thermal_density(0.0, 10);
  REQUIRE(std::abs(vac(0, 0) - Complex(1.0, 0.0)) < 1e-15);
  REQUIRE(vac.norm() == Catch::Approx(1.0).margin(1e-15));

  // nbar = 3 on 8 levels leaks (3/4)^8 = 0.1 of the mass: rejected, and the
  // message names the dimension that would suffice.
  REQUIRE_THROWS_AS(thermal_density(3.0, 8), DomainError);
  REQUIRE_THROWS_WITH(thermal_density(3.0, 8),
                      Catch::Matchers::ContainsSubstring("increase truncation"));
}

TEST_CASE("displacement operator: unitarity and coherent overlap") {
  const Complex alpha(0.6, -0.4);
  const int dim = 40;
  const Matrix d = displacement(alpha, dim);
  REQUIRE((d * d.adjoint() - Matrix::Identity(dim, dim)).norm() < 1e-12);

  // <0|D|0> = exp(-|alpha|^2/2).
  REQUIRE(std::abs(d(0, 0) - Complex(std::exp(-0.5 * std::norm(alpha)), 0.0)) < 1e-12);

  // Mean quadratures of the coherent state: delta = sqrt2 (Re, Im).
  Matrix vac = Matrix::Zero(dim, dim);
  vac(0, 0) = 1.0;
  const MomentSample s = measure_moments(d * vac * d.adjoint());
  REQUIRE(s.delta[0] == Catch::Approx(std::sqrt(2.0) * alpha.real()).margin(1e-10));
  REQUIRE(s.delta[1] == Catch::Approx(std::sqrt(2.0) * alpha.imag()).margin(1e-10));
  REQUIRE((s.gamma - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("squeeze operator: unitarity and covariance") {
  const double r = 0.5;
  const int dim = 50;
  const Matrix s = squeeze(Complex(r, 0.0), dim);
  REQUIRE((s * s.adjoint() - Matrix::Identity(dim, dim)).norm() < 1e-11);

  Matrix vac = Matrix::Zero(dim, dim);
  vac(0, 0) = 1.0;
  const MomentSample m = measure_moments(s * vac * s.adjoint());
  // S(r) with real r stretches x: Gamma = diag(e^{2r}, e^{-2r}).
  REQUIRE(m.gamma(0, 0) == Catch::Approx(std::exp(2.0 * r)).epsilon(1e-9));
  REQUIRE(m.gamma(1, 1) == Catch::Approx(std::exp(-2.0 * r)).epsilon(1e-9));
  REQUIRE(std::abs(m.gamma(0, 1)) < 1e-10);
  REQUIRE(m.delta.norm() < 1e-12);
}

TEST_CASE("displaced squeezed thermal state reproduces its target moments") {
  const double nbar = 0.5;
  const double r = 0.3;
  const double phi = 0.7;
  const Complex alpha(0.4, 0.2);
  const MomentSample m = measure_moments(gaussian_fock(nbar, r, phi, alpha, 70));

  // Gamma = (2 nbar + 1) [cosh(2r) I + sinh(2r) (cos phi sigma_z' + sin phi sigma_x')]
  // in the (x, p) basis.
  const double scale = 2.0 * nbar + 1.0;
  Eigen::MatrixXd expected(2, 2);
  const double ch = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  expected << scale * (ch + sh * std::cos(phi)), scale * sh * std::sin(phi),
      scale * sh * std::sin(phi), scale * (ch - sh * std::cos(phi));
  REQUIRE((m.gamma - expected).norm() < 1e-8);
  REQUIRE(m.delta[0] == Catch::Approx(std::sqrt(2.0) * alpha.real()).margin(1e-8));
  REQUIRE(m.delta[1] == Catch::Approx(std::sqrt(2.0) * alpha.imag()).margin(1e-8));
}

TEST_CASE("two-mode squeezed thermal state covariance") {
  const double r = 0.4;
  const double nbar = 0.2;
  const int dim = 18;
  const Matrix rho = two_mode_squeezed_fock(r, nbar, dim);
  REQUIRE(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-9);

  const Quadratures q = quadratures(dim);
  const Matrix id = Matrix::Identity(dim, dim);
  std::vector<Matrix> quads = {
      Eigen::kroneckerProduct(q.x, id).eval(), Eigen::kroneckerProduct(id, q.x).eval(),
      Eigen::kroneckerProduct(q.p, id).eval(), Eigen::kroneckerProduct(id, q.p).eval()};
  const MomentSample m = measure_moments(rho, quads);

  const double scale = 2.0 * nbar + 1.0;
  const double ch = scale * std::cosh(2.0 * r);
  const double sh = scale * std::sinh(2.0 * r);
  Eigen::MatrixXd expected(4, 4);
  expected << ch, sh, 0.0, 0.0,  //
      sh, ch, 0.0, 0.0,          //
      0.0, 0.0, ch, -sh,         //
      0.0, 0.0, -sh, ch;
  REQUIRE((m.gamma - expected).norm() < 1e-6);
  REQUIRE(m.delta.norm() < 1e-10);
}

TEST_CASE("finite-difference oracle against closed-form QFI") {
  SECTION("thermal occupation estimation") {
    auto render = [](double theta) { return thermal_density(theta, 60); };
    const OracleResult res = oracle_qfi(render, 1.0, 1e-4);
    // 1/(nbar(nbar+1)) = 0.5 at nbar = 1.
    REQUIRE(res.qfi == Catch::Approx(0.5).margin(1e-5));
    // SLD is Hermitian with zero mean on the state.
    REQUIRE((res.sld - res.sld.adjoint()).norm() < 1e-9);
    const Matrix rho = render(1.0);
    REQUIRE(std::abs((rho * res.sld).trace()) < 1e-6);
  }

  SECTION("pure squeezed vacuum under phase rotation") {
    const int dim = 50;
    auto render = [dim](double theta) {
      return gaussian_fock(0.0, 0.5, -2.0 * theta, Complex(0.0, 0.0), dim);
    };
    const double expected = 2.0 * std::sinh(1.0) * std::sinh(1.0);
    const OracleResult res = oracle_qfi(render, 0.0, 1e-4);
    REQUIRE(res.qfi == Catch::Approx(expected).epsilon(1e-4));
  }

  SECTION("coherent displacement of the vacuum") {
    const int dim = 40;
    auto render = [dim](double theta) {
      return gaussian_fock(0.0, 0.0, 0.0, Complex(theta, 0.0), dim);
    };
    const OracleResult res = oracle_qfi(render, 0.2, 1e-4);
    REQUIRE(res.qfi == Catch::Approx(4.0).epsilon(1e-5));
  }

  SECTION("step validation") {
    auto render = [](double theta) { return thermal_density(theta, 40); };
    REQUIRE_THROWS_AS(oracle_qfi(render, 1.0, 1e-7), ArgumentError);
    REQUIRE_THROWS_AS(oracle_qfi(render, 1.0, 0.5), ArgumentError);
    REQUIRE_THROWS_AS(oracle_qfi(render, 1.0, 0.0), ArgumentError);
  }
}
