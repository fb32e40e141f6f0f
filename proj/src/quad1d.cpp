#include "polydg/quad1d.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace polydg {

namespace {

// Squared norm of the constant w.r.t. (1-x)^a (1+x)^b: 2^(a+b+1) B(a+1, b+1).
Real weight_mass(Real a, Real b) {
  return std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) -
                  std::lgamma(a + b + 2));
}

void check_jacobi_params(Real alpha, Real beta) {
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw std::invalid_argument("jacobi: alpha and beta must exceed -1");
  }
}

// Recurrence coefficients of the orthonormal family:
//   x P_i = a_i P_{i-1} + b_i P_i + a_{i+1} P_{i+1}
Real jacobi_a(Real al, Real be, int i) {
  const Real h1 = 2 * i + al + be;
  return 2.0 / (h1 + 2.0) *
         std::sqrt((i + 1) * (i + 1 + al + be) * (i + 1 + al) * (i + 1 + be) /
                   ((h1 + 1.0) * (h1 + 3.0)));
}

Real jacobi_b(Real al, Real be, int i) {
  const Real h1 = 2 * i + al + be;
  if (al == be) return 0.0;
  return -(al * al - be * be) / (h1 * (h1 + 2.0));
}

}  // namespace

Vec jacobi_all(Real alpha, Real beta, int k, Real x) {
  check_jacobi_params(alpha, beta);
  Vec p(k + 1);
  p[0] = 1.0 / std::sqrt(weight_mass(alpha, beta));
  if (k == 0) return p;
  const Real gamma1 =
      (alpha + 1) * (beta + 1) / (alpha + beta + 3) * weight_mass(alpha, beta);
  p[1] = ((alpha + beta + 2) * x / 2 + (alpha - beta) / 2) / std::sqrt(gamma1);
  Real aold = 2.0 / (2.0 + alpha + beta) *
              std::sqrt((alpha + 1) * (beta + 1) / (alpha + beta + 3));
  for (int i = 1; i < k; ++i) {
    const Real anew = jacobi_a(alpha, beta, i);
    const Real bnew = jacobi_b(alpha, beta, i);
    p[i + 1] = ((x - bnew) * p[i] - aold * p[i - 1]) / anew;
    aold = anew;
  }
  return p;
}

Real jacobi_eval(Real alpha, Real beta, int k, Real x) {
  return jacobi_all(alpha, beta, k, x)[k];
}

Real jacobi_deriv(Real alpha, Real beta, int k, Real x) {
  if (k == 0) return 0.0;
  return std::sqrt(k * (k + alpha + beta + 1)) * jacobi_eval(alpha + 1, beta + 1, k - 1, x);
}

QuadratureRule1D legendre_gauss(int n) {
  if (n < 1) throw std::invalid_argument("legendre_gauss: need at least one node");
  QuadratureRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on the orthonormal Legendre polynomial.
    Real x = -std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * n));
    for (int it = 0; it < 100; ++it) {
      const Real f = jacobi_eval(0, 0, n, x);
      const Real df = jacobi_deriv(0, 0, n, x);
      const Real dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    Vec p = jacobi_all(0, 0, n - 1, x);
    rule.weights[i] = 1.0 / p.squaredNorm();  // Christoffel function
  }
  // Enforce exact symmetry about the origin.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const Real node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const Real w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -node;
    rule.nodes[j] = node;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule1D gauss_jacobi(int n, Real alpha, Real beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one node");
  check_jacobi_params(alpha, beta);
  if (alpha == 0.0 && beta == 0.0) return legendre_gauss(n);

  // Golub-Welsch start from the symmetric tridiagonal recurrence matrix,
  // then Newton polish on the recurrence-evaluated polynomial.
  Mat J = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = jacobi_b(alpha, beta, i);
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = jacobi_a(alpha, beta, i);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);

  QuadratureRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    Real x = es.eigenvalues()[i];
    for (int it = 0; it < 50; ++it) {
      const Real f = jacobi_eval(alpha, beta, n, x);
      const Real df = jacobi_deriv(alpha, beta, n, x);
      const Real dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    Vec p = jacobi_all(alpha, beta, n - 1, x);
    rule.weights[i] = 1.0 / p.squaredNorm();
  }
  return rule;
}

Vec barycentric_weights(const Vec& nodes) {
  const int n = static_cast<int>(nodes.size());
  Vec w = Vec::Ones(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const Real diff = nodes[j] - nodes[k];
      if (diff == 0.0) throw std::invalid_argument("barycentric_weights: duplicate nodes");
      w[j] /= diff;
    }
  }
  return w;
}

Vec lagrange_eval(const Vec& nodes, const Vec& bary, Real x) {
  const int n = static_cast<int>(nodes.size());
  Vec l = Vec::Zero(n);
  // Short-circuit on (near-)exact node hits to avoid 0/0.
  for (int j = 0; j < n; ++j) {
    if (std::abs(x - nodes[j]) < 1e-14) {
      l[j] = 1.0;
      return l;
    }
  }
  Real denom = 0.0;
  for (int j = 0; j < n; ++j) {
    l[j] = bary[j] / (x - nodes[j]);
    denom += l[j];
  }
  l /= denom;
  // Absorb the rounding defect into the largest entry so the row sums to one.
  int jmax = 0;
  l.cwiseAbs().maxCoeff(&jmax);
  Real s = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j != jmax) s += l[j];
  }
  l[jmax] = 1.0 - s;
  return l;
}

Vec lagrange_eval(const QuadratureRule1D& rule, Real x) {
  return lagrange_eval(rule.nodes, barycentric_weights(rule.nodes), x);
}

DiffMatrix1D diff_matrix(const Vec& nodes) {
  const int n = static_cast<int>(nodes.size());
  const Vec bary = barycentric_weights(nodes);
  DiffMatrix1D d;
  d.entries = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Real rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d.entries(i, j) = bary[j] / bary[i] / (nodes[i] - nodes[j]);
      rowsum += d.entries(i, j);
    }
    d.entries(i, i) = -rowsum;  // derivative of constants vanishes
  }
  return d;
}

DiffMatrix1D diff_matrix(const QuadratureRule1D& rule) { return diff_matrix(rule.nodes); }

}  // namespace polydg
