#ifndef POLYDG_REF_ELEM_HPP
#define POLYDG_REF_ELEM_HPP

#include <array>
#include <vector>

#include "polydg/quad1d.hpp"
#include "polydg/types.hpp"

namespace polydg {

// Reference element families. The 3D non-hex families are parametrized by a
// collapsed-coordinate map g from the unit cube eta in [-1,1]^d onto the
// reference polytope xi; quadrature and interpolation live on the cube.
enum class Family { Hex, Prism, Pyra, Tet, Quad, Tria };

int family_dim(Family f);
int family_n_faces(Family f);
int family_n_vertices(Family f);
const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Polytope vertices in xi coordinates, one per column.
Mat family_vertices(Family f);

// Reference polytope measure (HEX 8, PRISM 4, TET 4/3, PYRA 8/3, QUAD 4, TRIA 2).
Real family_measure(Family f);

// Faces are cube faces (axis, side); collapsed cube faces are kept for the
// SBP operator bookkeeping but carry no surface measure.
struct FaceRef {
  int axis = 0;   // eta axis normal to the face
  int side = 1;   // -1 or +1
  bool collapsed = false;
  std::vector<int> corners;  // local vertex ids, empty when collapsed
};

// Physical (non-collapsed) faces in the paper's Gamma ordering.
const std::vector<FaceRef>& family_faces(Family f);
// All 2*dim cube faces in a fixed order (physical ones first match family_faces).
const std::vector<FaceRef>& family_cube_faces(Family f);
// Index of the physical face within family_cube_faces, or -1.
int cube_face_index(Family f, int phys_face);

// eta -> xi (total on the closed cube).
Vec3 collapse_map(Family f, const Vec3& eta);
// xi -> eta; throws std::domain_error on collapsed faces.
Vec3 collapse_map_inverse(Family f, const Vec3& xi);

// Jacobian d xi_i / d eta_j of the collapse map, its adjugate and determinant.
// The adjugate is polynomial in eta and well defined on collapsed faces.
Mat3 collapse_jacobian(Family f, const Vec3& eta);
Mat3 adj_jacobian_collapse(Family f, const Vec3& eta);
Real jac_det(Family f, const Vec3& eta);

bool polytope_contains(Family f, const Vec3& xi, Real tol = 1e-12);

// Reference Nanson data of a face at a cube point on that face:
// adj(Jg)^T n_cube = Jhat^(f) * nhat^(f), with |.| the surface Jacobian and
// the unit part the polytope face normal from the paper's tables.
Vec3 face_nanson(Family f, int phys_face, const Vec3& eta);
Vec3 face_unit_normal(Family f, int phys_face);

// Modal dimension M(N) of the family's polynomial space.
int modal_dim(Family f, int degree);

// Admissible PKD mode multi-indices (i,j,k), lexicographic, frozen ordering.
std::vector<std::array<int, 3>> pkd_modes(Family f, int degree);

// All M(N) orthonormal basis values at a cube point eta.
Vec pkd_eval_eta(Family f, int degree, const Vec3& eta);
// Same but at a polytope point xi (inverse-collapse with limit handling).
Vec pkd_eval(Family f, int degree, const Vec3& xi);
// Gradients d psi / d eta at a non-collapsed cube point, M(N) x d.
Mat pkd_grad_eta(Family f, int degree, const Vec3& eta);

// Generalized Vandermonde V_ij = psi_j(point_i); points are xi coordinates.
Mat vandermonde(Family f, int degree, const Mat& xi_points);
// d psi_j / d xi_p at the points (interior points only), one matrix per p.
std::vector<Mat> grad_vandermonde(Family f, int degree, const Mat& xi_points);

// Volume quadrature: tensor Legendre-Gauss nodes on the cube, one column per
// point, plus combined weights w and the collapse factor Jhat at the nodes.
struct VolumeQuadrature {
  Mat eta;       // d x nq
  Mat xi;        // d x nq
  Vec w;         // tensor weights
  Vec jhat;      // collapse Jacobian determinant at the nodes
  int n1d = 0;
};
VolumeQuadrature volume_quadrature(Family f, int n1d);

// Face quadrature points of a physical face: (n1d)^(d-1) tensor points in the
// in-face cube directions; eta and xi images, tensor weights.
struct FaceQuadrature {
  Mat eta;   // d x nf
  Mat xi;    // d x nf
  Vec w;     // tensor weights (no surface Jacobian)
  std::array<int, 2> tangent_axes{{-1, -1}};  // increasing order; [1] unused in 2D
};
FaceQuadrature face_quad_points(Family f, int phys_face, int n1d);

// Equispaced geometry lattice of the given degree on the polytope; the node
// count equals modal_dim(f, degree) for every family.
Mat geometry_lattice(Family f, int degree);

// Positive-weight quadrature on the biunit triangle {r,s >= -1, r+s <= 0},
// exact for total degree >= 2*degree+1 (collapsed Gauss-Jacobi tensor rule).
struct TriangleRule {
  Mat points;  // 2 x nq
  Vec weights;
};
TriangleRule triangle_rule(int degree);

// Orthonormal 2D Dubiner basis on the biunit triangle (used by the facet
// projections); modes of total degree <= degree.
Vec tria_basis_eval(int degree, Real r, Real s);

}  // namespace polydg

#endif
