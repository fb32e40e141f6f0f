#ifndef POLYDG_QUAD1D_HPP
#define POLYDG_QUAD1D_HPP

#include "polydg/types.hpp"

namespace polydg {

/// One-dimensional quadrature rule on (-1,1).
struct QuadratureRule1D {
  Vec nodes;
  Vec weights;
  int exactness_degree = 0;
};

// Orthonormal Jacobi polynomial P~_k^(alpha,beta)(x), unit norm with respect
// to the weight (1-x)^alpha (1+x)^beta on [-1,1].
Real jacobi_eval(Real alpha, Real beta, int k, Real x);

// d/dx of the orthonormal Jacobi polynomial.
Real jacobi_deriv(Real alpha, Real beta, int k, Real x);

// Values P~_0..P~_k at x.
Vec jacobi_all(Real alpha, Real beta, int k, Real x);

QuadratureRule1D legendre_gauss(int n);
QuadratureRule1D gauss_jacobi(int n, Real alpha, Real beta);

// Barycentric weights 1/prod(x_j - x_k) for a node set.
Vec barycentric_weights(const Vec& nodes);

// Lagrange cardinal values l_j(x); exact cardinal vector when x hits a node.
Vec lagrange_eval(const Vec& nodes, const Vec& bary, Real x);
Vec lagrange_eval(const QuadratureRule1D& rule, Real x);

/// Nodal differentiation matrix D_ij = l_j'(x_i).
struct DiffMatrix1D {
  Mat entries;
};

DiffMatrix1D diff_matrix(const Vec& nodes);
DiffMatrix1D diff_matrix(const QuadratureRule1D& rule);

}  // namespace polydg

#endif
