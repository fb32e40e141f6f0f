#ifndef POLYDG_MESH_HPP
#define POLYDG_MESH_HPP

#include <optional>
#include <string>

#include "polydg/operators.hpp"

namespace polydg {

struct Element {
  Family family = Family::Hex;
  std::vector<int> vertices;  // corner node ids, family vertex ordering
  Mat geo_modal;              // modal geometry coefficients, M(n_geo) x dim
  Mat geo_control;            // control node positions on the polytope lattice
};

struct Face {
  int left = -1;
  int left_face = 0;
  int right = -1;   // -1 for boundary faces
  int right_face = 0;
  bool tri = false;  // triangular facet (non-coincident quadrature) path
  std::string tag;   // boundary tag when right < 0
  Vec3 offset = Vec3::Zero();  // periodic shift: x_left = x_right + offset
};

struct Mesh {
  int dim = 3;
  int n_geo = 1;
  Real length = 1.0;
  std::vector<Vec3> nodes;
  std::vector<long> canonical;  // node equivalence classes (periodic images)
  std::vector<Element> elements;
  std::vector<Face> faces;
  std::vector<std::array<int, 6>> elem_face;  // local face -> face id

  int n_elements() const { return static_cast<int>(elements.size()); }
};

enum class SplitKind { Hex, Prism, Pyra, Tet, Mix, Quad, Tria };
SplitKind split_from_name(const std::string& name);
const char* split_name(SplitKind s);

struct GenOptions {
  int dim = 3;
  int counts = 4;          // cells per axis
  SplitKind split = SplitKind::Hex;
  Real epsilon = 0.0;      // sinusoidal deformation amplitude
  Real length = 1.0;       // domain edge length
  int n_geo = 1;
  bool perturb_pyramids = false;  // pyramids are kept straight by default
};

// Periodic box mesh with the requested hex splitting and deformation.
Mesh gen_box_mesh(const GenOptions& opt);

// Pair faces by canonical corner ids; fills mesh.faces and mesh.elem_face.
void build_connectivity(Mesh& mesh);

// Geometry map of one element evaluated through its modal coefficients.
Vec3 element_map(const Mesh& mesh, int e, const Vec3& xi);

// Node permutation aligning the right side's face nodes with the left side's
// (coincident-quadrature faces only; empty for triangular facets).
std::optional<std::vector<int>> orientation_match(const Mesh& mesh, int face_id, int degree);

// Per-face geometry of one side at the face quadrature nodes.
struct FaceGeometry {
  Mat x;        // nf x dim physical positions
  Mat nanson;   // nf x dim: Jhat^f J^{e,f} n (composite Nanson vector)
  Mat normal;   // nf x dim unit outward normal
  Vec surfj;    // nf: Jhat^f J^{e,f}
};

// Volume metric terms of one element at degree N: combined contravariant
// metrics from the conservative (cross-product) curl form, determinants and
// the Nanson data of every physical face.
struct ElementGeometry {
  Mat xq;       // nq x dim
  Vec jgeo;     // nq, det of the xi -> x map
  Vec jproj;    // nq, Jacobian projected onto the modal space
  Vec jproj_inv;
  Mat g;        // nq x (dim*dim), column dir*dim + m holds G_{dir,m}
  std::vector<FaceGeometry> face;
};

ElementGeometry compute_element_geometry(const Mesh& mesh, int e, int degree);

// Discrete metric identity residual max_m |sum_dir D^dir G_{dir,m}| at nodes.
Real metric_identity_residual(const Mesh& mesh, int e, int degree);

void write_phm(const Mesh& mesh, const std::string& path);
Mesh read_phm(const std::string& path);

// Tensor-line application of the 1D differentiation matrix along an axis.
Vec apply_diff_axis(const DiscreteOperators& ops, const Vec& field, int axis);

}  // namespace polydg

#endif
