#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "polydg/quad1d.hpp"

using namespace polydg;

namespace {

Real integrate(const QuadratureRule1D& r, const std::function<Real(Real)>& f) {
  Real s = 0.0;
  for (int i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

Real monomial_integral(int k) { return (k % 2 == 0) ? 2.0 / (k + 1) : 0.0; }

}  // namespace

TEST_CASE("legendre_gauss analytic low orders") {
  auto r1 = legendre_gauss(1);
  CHECK(r1.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  auto r2 = legendre_gauss(2);
  CHECK(r2.nodes[0] == doctest::Approx(-0.5773502691896258).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(0.5773502691896258).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));

  auto r3 = legendre_gauss(3);
  CHECK(r3.nodes[0] == doctest::Approx(-std::sqrt(3.0 / 5.0)).epsilon(1e-14));
  CHECK(r3.nodes[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(r3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));

  CHECK_THROWS_AS(legendre_gauss(0), std::invalid_argument);
}

TEST_CASE("gauss rule invariants: weight sum, symmetry, interior nodes") {
  for (int n = 1; n <= 12; ++n) {
    auto r = legendre_gauss(n);
    CHECK(std::abs(r.weights.sum() - 2.0) < 1e-14);
    for (int i = 0; i < n; ++i) {
      CHECK(r.nodes[i] > -1.0);
      CHECK(r.nodes[i] < 1.0);
      CHECK(r.weights[i] > 0.0);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
      CHECK(r.nodes[i] == doctest::Approx(-r.nodes[n - 1 - i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("gauss exactness on random polynomials up to degree 2n-1") {
  std::mt19937 gen(1234);
  std::uniform_real_distribution<Real> coef(-1.0, 1.0);
  for (int n = 1; n <= 12; ++n) {
    auto r = legendre_gauss(n);
    CHECK(r.exactness_degree == 2 * n - 1);
    std::vector<Real> c(2 * n);
    Real exact = 0.0;
    for (int k = 0; k < 2 * n; ++k) {
      c[k] = coef(gen);
      exact += c[k] * monomial_integral(k);
    }
    Real quad = integrate(r, [&](Real x) {
      Real acc = 0.0, xp = 1.0;
      for (int k = 0; k < 2 * n; ++k, xp *= x) acc += c[k] * xp;
      return acc;
    });
    CHECK(std::abs(quad - exact) < 1e-12 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("gauss_jacobi reproduces weighted analytic integrals") {
  // alpha=0, beta=0 reduces to Legendre-Gauss
  auto gj = gauss_jacobi(1, 0, 0);
  CHECK(gj.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gj.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  // int (1-x) x dx = -2/3 over [-1,1]
  auto r21 = gauss_jacobi(2, 1, 0);
  Real got = integrate(r21, [](Real x) { return x; });
  CHECK(std::abs(got - (-2.0 / 3.0)) < 1e-14);

  // int (1-x)^2 x^4 dx = 2/5 + 2/7 = 24/35
  auto r32 = gauss_jacobi(3, 2, 0);
  got = integrate(r32, [](Real x) { return x * x * x * x; });
  CHECK(std::abs(got - 24.0 / 35.0) < 1e-13);

  CHECK_THROWS_AS(gauss_jacobi(2, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_jacobi(2, 0.0, -1.5), std::invalid_argument);
}

TEST_CASE("gauss_jacobi exactness for (1-x)^a weighted polynomials") {
  std::mt19937 gen(77);
  std::uniform_real_distribution<Real> coef(-1.0, 1.0);
  for (int a = 1; a <= 3; ++a) {
    for (int n = 1; n <= 8; ++n) {
      auto r = gauss_jacobi(n, a, 0);
      // oracle: expand (1-x)^a * x^k into monomials and integrate analytically
      for (int k = 0; k <= 2 * n - 1; ++k) {
        Real exact = 0.0;
        Real binom = 1.0;
        for (int j = 0; j <= a; ++j) {
          exact += binom * ((j % 2) ? -1.0 : 1.0) * monomial_integral(k + j);
          binom = binom * (a - j) / (j + 1);
        }
        Real quad = integrate(r, [&](Real x) { return std::pow(x, k); });
        CHECK(std::abs(quad - exact) < 1e-13);
      }
    }
  }
}

TEST_CASE("normalized jacobi values and orthonormality") {
  CHECK(jacobi_eval(0, 0, 0, 0.37) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(jacobi_eval(0, 0, 1, 1.0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));

  // Gram matrix of P~_0..P~_5^(1,0) under gauss_jacobi(6,1,0) is the identity
  auto r = gauss_jacobi(6, 1, 0);
  Mat gram = Mat::Zero(6, 6);
  for (int q = 0; q < 6; ++q) {
    Vec p = jacobi_all(1, 0, 5, r.nodes[q]);
    gram += r.weights[q] * p * p.transpose();
  }
  CHECK((gram - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jacobi derivative against central differences") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<Real> xs(-0.9, 0.9);
  for (int k = 1; k <= 6; ++k) {
    for (int t = 0; t < 5; ++t) {
      Real x = xs(gen);
      Real h = 1e-6;
      Real fd = (jacobi_eval(1, 0, k, x + h) - jacobi_eval(1, 0, k, x - h)) / (2 * h);
      CHECK(jacobi_deriv(1, 0, k, x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("lagrange cardinal property and partition of unity") {
  auto r = legendre_gauss(4);
  Vec bary = barycentric_weights(r.nodes);
  for (int i = 0; i < 4; ++i) {
    Vec l = lagrange_eval(r.nodes, bary, r.nodes[i]);
    for (int j = 0; j < 4; ++j) CHECK(l[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  std::mt19937 gen(9);
  std::uniform_real_distribution<Real> xs(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Vec l = lagrange_eval(r.nodes, bary, xs(gen));
    CHECK(std::abs(l.sum() - 1.0) < 1e-13);
  }

  // single node: constant interpolation
  Vec one(1);
  one[0] = 0.3;
  Vec l0 = lagrange_eval(one, barycentric_weights(one), -0.5);
  CHECK(l0[0] == doctest::Approx(1.0));

  // symmetry at the midpoint of the 2-node rule
  auto r2 = legendre_gauss(2);
  Vec lm = lagrange_eval(r2.nodes, barycentric_weights(r2.nodes), 0.0);
  CHECK(lm[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lm[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lagrange stays finite within 1e-14 of a node") {
  auto r = legendre_gauss(5);
  Vec bary = barycentric_weights(r.nodes);
  Vec l = lagrange_eval(r.nodes, bary, r.nodes[2] + 0.9e-14);
  CHECK(std::isfinite(l.sum()));
  for (int j = 0; j < 5; ++j) CHECK(l[j] == doctest::Approx(j == 2 ? 1.0 : 0.0));
}

TEST_CASE("diff matrix: hand-derived 2-point case, row sums, exactness") {
  auto r = legendre_gauss(2);
  auto d = diff_matrix(r);
  const Real v = std::sqrt(3.0) / 2.0;
  CHECK(d.entries(0, 0) == doctest::Approx(-v).epsilon(1e-14));
  CHECK(d.entries(0, 1) == doctest::Approx(v).epsilon(1e-14));
  CHECK(d.entries(1, 0) == doctest::Approx(-v).epsilon(1e-14));
  CHECK(d.entries(1, 1) == doctest::Approx(v).epsilon(1e-14));

  for (int n = 2; n <= 9; ++n) {
    auto rule = legendre_gauss(n);
    auto dm = diff_matrix(rule);
    CHECK(dm.entries.rowwise().sum().cwiseAbs().maxCoeff() < 1e-13);
    // exact differentiation of monomials x^k, k <= n-1
    for (int k = 0; k < n; ++k) {
      Vec f(n), df(n);
      for (int i = 0; i < n; ++i) {
        f[i] = std::pow(rule.nodes[i], k);
        df[i] = k == 0 ? 0.0 : k * std::pow(rule.nodes[i], k - 1);
      }
      CHECK(((dm.entries * f) - df).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  Vec dup(3);
  dup << -0.5, -0.5, 0.5;
  CHECK_THROWS_AS(diff_matrix(dup), std::invalid_argument);
}

TEST_CASE("diff matrix consistent with finite differences of the interpolant") {
  auto r = legendre_gauss(6);
  Vec bary = barycentric_weights(r.nodes);
  auto d = diff_matrix(r);
  Vec f(6);
  for (int i = 0; i < 6; ++i) f[i] = std::sin(1.7 * r.nodes[i]);
  Vec df = d.entries * f;
  const Real h = 1e-7;
  for (int i = 0; i < 6; ++i) {
    const Real x = r.nodes[i];
    Real fp = lagrange_eval(r.nodes, bary, x + h).dot(f);
    Real fm = lagrange_eval(r.nodes, bary, x - h).dot(f);
    CHECK(std::abs((fp - fm) / (2 * h) - df[i]) < 1e-6);
  }
}
