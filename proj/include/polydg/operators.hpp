#ifndef POLYDG_OPERATORS_HPP
#define POLYDG_OPERATORS_HPP

#include <Eigen/Cholesky>

#include "polydg/ref_elem.hpp"

namespace polydg {

// Interpolation/weight data of one cube face of the reference element.
struct FaceOps {
  int axis = 0;
  int side = 1;
  bool collapsed = false;
  std::array<int, 2> tangent_axes{{-1, -1}};
  Vec l_end;       // 1D extrapolation row, entries l_i(side), exact unit sum
  Mat vf;          // nf x nq dense face interpolation matrix
  Vec wf;          // nf tensor face weights
  Mat eta;         // d x nf cube coordinates of the face nodes
};

// Collocation operators of one (family, degree): Legendre-Gauss nodes,
// differentiation, face interpolation, PKD Vandermonde and the reference
// modal mass M~ = V^T diag(w Jhat) V (carried explicitly, never assumed I).
struct DiscreteOperators {
  Family family = Family::Hex;
  int degree = 0;
  int dim = 3;
  int n1d = 0;
  int nq = 0;
  int nmodal = 0;
  int nf = 0;  // nodes per face

  QuadratureRule1D rule;
  Mat d1;              // 1D differentiation matrix
  VolumeQuadrature vol;
  Vec w;               // tensor volume weights
  Vec wj;              // w .* jhat
  Mat V;               // nq x M
  Mat Mt;              // M~
  Eigen::LDLT<Mat> Mt_fact;
  Mat proj;            // M~^{-1} V^T diag(wj): reference L2 projection, M x nq
  Real mt_identity_gap = 0.0;  // max |M~ - I|

  std::vector<FaceOps> faces;  // all 2*dim cube faces, physical faces first

  int stride(int axis) const;
  int node_index(int i, int j, int k) const;

  // Modal <-> nodal against the reference measure (columns = variables).
  Mat to_modal(const Mat& nodal) const { return proj * nodal; }
  Mat to_nodal(const Mat& modal) const { return V * modal; }
};

const DiscreteOperators& get_operators(Family f, int degree);

// Projection of nodal Jacobian values onto the modal space, evaluated back at
// the nodes. Throws MeshError if the projection loses positivity.
Vec project_jacobian(const DiscreteOperators& ops, const Vec& j_nodal);

// Physical mass matrix M^e = V^T diag(wj .* jproj) V.
Mat modal_mass(const DiscreteOperators& ops, const Vec& jproj);

// Solve M^e utilde = V^T diag(wj .* jproj) u for the modal representation.
Mat project_to_modal(const DiscreteOperators& ops, const Vec& jproj, const Mat& u_nodal);

// Weight-adjusted inverse applied to a nodal residual:
//   utilde_t = M~^{-1} V^T diag(wj ./ jproj) V M~^{-1} V^T r
Mat apply_weight_adjusted_inverse(const DiscreteOperators& ops, const Vec& jproj_inv,
                                  const Mat& r_nodal);

// Face-node restriction exploiting the tensor sparsity of V_f.
Mat face_trace(const DiscreteOperators& ops, const FaceOps& fo, const Mat& nodal);

// Dense assemblies used by tests only.
Mat dense_diff(const DiscreteOperators& ops, int axis);       // nq x nq
Mat dense_vf(const DiscreteOperators& ops);                   // sum nf x nq
Vec dense_face_weights(const DiscreteOperators& ops, int axis);  // signed, stacked
Mat dense_sbp_q(const DiscreteOperators& ops, int axis);      // (nq+nfall)^2

}  // namespace polydg

#endif
