#include "polydg/mesh.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

namespace polydg {

SplitKind split_from_name(const std::string& name) {
  if (name == "hex") return SplitKind::Hex;
  if (name == "prism") return SplitKind::Prism;
  if (name == "pyra") return SplitKind::Pyra;
  if (name == "tet") return SplitKind::Tet;
  if (name == "mix") return SplitKind::Mix;
  if (name == "quad") return SplitKind::Quad;
  if (name == "tria") return SplitKind::Tria;
  throw ConfigError("unknown split kind: " + name);
}

const char* split_name(SplitKind s) {
  switch (s) {
    case SplitKind::Hex: return "hex";
    case SplitKind::Prism: return "prism";
    case SplitKind::Pyra: return "pyra";
    case SplitKind::Tet: return "tet";
    case SplitKind::Mix: return "mix";
    case SplitKind::Quad: return "quad";
    case SplitKind::Tria: return "tria";
  }
  return "?";
}

namespace {

// geometry evaluation tables per (family, n_geo, degree)
struct GeoEvalCache {
  Mat vol;                // nq x M(g)
  std::vector<Mat> grad;  // d of nq x M(g), d psi / d xi_p
  std::vector<Mat> face;  // physical faces: nf x M(g)
};

const GeoEvalCache& geo_eval_cache(Family f, int g, int n) {
  static std::map<std::array<int, 3>, GeoEvalCache> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const std::array<int, 3> key = {static_cast<int>(f), g, n};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  GeoEvalCache c;
  const auto vol = volume_quadrature(f, n + 1);
  c.vol = vandermonde(f, g, vol.xi);
  c.grad = grad_vandermonde(f, g, vol.xi);
  for (int fc = 0; fc < family_n_faces(f); ++fc) {
    c.face.push_back(vandermonde(f, g, face_quad_points(f, fc, n + 1).xi));
  }
  return cache.emplace(key, std::move(c)).first->second;
}

const Mat& lattice_interp_matrix(Family f, int g) {
  static std::map<std::pair<int, int>, Mat> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(static_cast<int>(f), g);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::PartialPivLU<Mat> lu(vandermonde(f, g, geometry_lattice(f, g)));
  return cache.emplace(key, lu.inverse()).first->second;
}

Mat straight_modal(Family f, int dim, const std::vector<Vec3>& verts) {
  Mat pos(static_cast<int>(verts.size()), dim);
  for (size_t v = 0; v < verts.size(); ++v) {
    pos.row(static_cast<int>(v)) = verts[v].head(dim).transpose();
  }
  return lattice_interp_matrix(f, 1) * pos;
}

struct BoxBuilder {
  GenOptions opt;
  int dim;
  int m = 0;  // cells per axis of the element grid
  Mesh mesh;
  std::map<std::array<long, 3>, int> node_ids;
  std::vector<char> pyramid_cell;  // element came from a pyramid-split cell
  bool in_pyramid_cell = false;

  explicit BoxBuilder(const GenOptions& o) : opt(o), dim(o.dim) {}

  // lattice addressed in half-cell units so cell centers fit too
  int node(long i2, long j2, long k2) {
    const std::array<long, 3> key = {i2, j2, (dim == 3) ? k2 : 0};
    auto it = node_ids.find(key);
    if (it != node_ids.end()) return it->second;
    const Real h = opt.length / m;
    Vec3 x(0.5 * i2 * h, 0.5 * j2 * h, (dim == 3) ? 0.5 * k2 * h : 0.0);
    auto wrap = [this](long a) { return ((a % (2 * m)) + 2 * m) % (2 * m); };
    const long canon =
        wrap(i2) + 2 * m * (wrap(j2) + 2 * m * ((dim == 3) ? wrap(k2) : 0));
    const int id = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(x);
    mesh.canonical.push_back(canon);
    node_ids.emplace(key, id);
    return id;
  }

  int corner(long i, long j, long k) { return node(2 * i, 2 * j, 2 * k); }

  // orientation fixups keep the vertex-induced map positively oriented
  void add_element(Family f, std::vector<int> v) {
    auto at = [this](int id) { return mesh.nodes[id]; };
    switch (f) {
      case Family::Tet: {
        const Vec3 e1 = at(v[1]) - at(v[0]);
        const Vec3 e2 = at(v[2]) - at(v[0]);
        const Vec3 e3 = at(v[3]) - at(v[0]);
        if (e1.cross(e2).dot(e3) < 0) std::swap(v[1], v[2]);
        break;
      }
      case Family::Pyra: {
        const Vec3 bn = (at(v[1]) - at(v[0])).cross(at(v[2]) - at(v[0]));
        if (bn.dot(at(v[4]) - at(v[0])) < 0) std::swap(v[1], v[2]);
        break;
      }
      case Family::Prism: {
        const Vec3 tn = (at(v[1]) - at(v[0])).cross(at(v[2]) - at(v[0]));
        if (tn.dot(at(v[3]) - at(v[0])) < 0) {
          std::swap(v[1], v[2]);
          std::swap(v[4], v[5]);
        }
        break;
      }
      case Family::Tria:
      case Family::Quad: {
        const Vec3 e1 = at(v[1]) - at(v[0]);
        const Vec3 e2 = at(v[2]) - at(v[0]);
        if (e1[0] * e2[1] - e1[1] * e2[0] < 0) std::swap(v[1], v[2]);
        break;
      }
      case Family::Hex:
        break;
    }
    Element e;
    e.family = f;
    e.vertices = std::move(v);
    mesh.elements.push_back(std::move(e));
    pyramid_cell.push_back(in_pyramid_cell);
  }

  void hex_cell(long i, long j, long k) {
    add_element(Family::Hex,
                {corner(i, j, k), corner(i + 1, j, k), corner(i, j + 1, k),
                 corner(i + 1, j + 1, k), corner(i, j, k + 1), corner(i + 1, j, k + 1),
                 corner(i, j + 1, k + 1), corner(i + 1, j + 1, k + 1)});
  }

  // two prisms with triangular cross-section in (x,z), extruded along y;
  // the diagonal runs (x0,z0) -> (x1,z1), matching the Kuhn face diagonals
  void prism_cell(long i, long j, long k) {
    const int a0 = corner(i, j, k), b0 = corner(i + 1, j, k);
    const int c0 = corner(i + 1, j, k + 1), d0 = corner(i, j, k + 1);
    const int a1 = corner(i, j + 1, k), b1 = corner(i + 1, j + 1, k);
    const int c1 = corner(i + 1, j + 1, k + 1), d1 = corner(i, j + 1, k + 1);
    add_element(Family::Prism, {b0, c0, a0, b1, c1, a1});
    add_element(Family::Prism, {d0, a0, c0, d1, a1, c1});
  }

  // six Kuhn tetrahedra sharing the cell's main diagonal
  void tet_cell(long i, long j, long k) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& perm : perms) {
      long c[4][3] = {{i, j, k}, {i, j, k}, {i, j, k}, {i, j, k}};
      for (int step = 0; step < 3; ++step) {
        for (int q = step + 1; q < 4; ++q) c[q][perm[step]] += 1;
      }
      add_element(Family::Tet, {corner(c[0][0], c[0][1], c[0][2]),
                                corner(c[1][0], c[1][1], c[1][2]),
                                corner(c[2][0], c[2][1], c[2][2]),
                                corner(c[3][0], c[3][1], c[3][2])});
    }
  }

  std::array<int, 4> hex_face_cycle(long i, long j, long k, int fc) {
    static const long o[8][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
                                 {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
    const auto& corners = family_faces(Family::Hex)[fc].corners;
    std::array<int, 4> cyc;
    for (int c = 0; c < 4; ++c) {
      const auto& d = o[corners[c]];
      cyc[c] = corner(i + d[0], j + d[1], k + d[2]);
    }
    return cyc;
  }

  // six pyramids with the cell-center apex; bases toward tet zones are split
  // into two tetrahedra along the Kuhn diagonal instead
  void pyra_cell(long i, long j, long k, const std::array<bool, 6>& to_tet) {
    in_pyramid_cell = true;
    const int apex = node(2 * i + 1, 2 * j + 1, 2 * k + 1);
    for (int fc = 0; fc < 6; ++fc) {
      const auto cyc = hex_face_cycle(i, j, k, fc);
      if (!to_tet[fc]) {
        add_element(Family::Pyra, {cyc[0], cyc[1], cyc[3], cyc[2], apex});
        continue;
      }
      int lo = 0;
      for (int c = 1; c < 4; ++c) {
        if (mesh.nodes[cyc[c]].sum() < mesh.nodes[cyc[lo]].sum() - 1e-12) lo = c;
      }
      const int hi = (lo + 2) % 4;  // diagonal corners are opposite in the cycle
      add_element(Family::Tet, {cyc[lo], cyc[hi], cyc[(lo + 1) % 4], apex});
      add_element(Family::Tet, {cyc[lo], cyc[hi], cyc[(lo + 3) % 4], apex});
    }
    in_pyramid_cell = false;
  }

  void quad_cell(long i, long j) {
    add_element(Family::Quad, {corner(i, j, 0), corner(i + 1, j, 0), corner(i, j + 1, 0),
                               corner(i + 1, j + 1, 0)});
  }

  void tria_cell(long i, long j) {
    const int a = corner(i, j, 0), b = corner(i + 1, j, 0);
    const int c = corner(i + 1, j + 1, 0), d = corner(i, j + 1, 0);
    add_element(Family::Tria, {b, c, a});
    add_element(Family::Tria, {d, a, c});
  }

  enum Zone { ZH, ZP, ZY, ZT };

  Zone mix_zone(long i, long j) const {
    const long half = m / 2;
    const bool xhi = i >= half, yhi = j >= half;
    if (!xhi && !yhi) return ZH;
    if (xhi && !yhi) return ZP;
    if (!xhi && yhi) return ZY;
    return ZT;
  }

  void build() {
    if (opt.counts < 3) {
      throw MeshError(
          "gen_box_mesh: periodic pairing needs at least 3 cells per axis");
    }
    m = opt.counts;
    if (opt.split == SplitKind::Mix) {
      if (dim != 3) throw MeshError("gen_box_mesh: mix split is three-dimensional");
      if (opt.counts % 2 != 0 || opt.counts < 4) {
        throw MeshError("gen_box_mesh: mix split needs an even cell count of at least 4");
      }
    }
    if (dim == 2) {
      if (opt.split != SplitKind::Quad && opt.split != SplitKind::Tria) {
        throw MeshError("gen_box_mesh: 2D supports quad and tria splits");
      }
      for (long j = 0; j < m; ++j) {
        for (long i = 0; i < m; ++i) {
          if (opt.split == SplitKind::Quad) {
            quad_cell(i, j);
          } else {
            tria_cell(i, j);
          }
        }
      }
      return;
    }
    auto wrapm = [this](long q) { return ((q % m) + m) % m; };
    for (long k = 0; k < m; ++k) {
      for (long j = 0; j < m; ++j) {
        for (long i = 0; i < m; ++i) {
          switch (opt.split) {
            case SplitKind::Hex: hex_cell(i, j, k); break;
            case SplitKind::Prism: prism_cell(i, j, k); break;
            case SplitKind::Tet: tet_cell(i, j, k); break;
            case SplitKind::Pyra:
              pyra_cell(i, j, k, {false, false, false, false, false, false});
              break;
            case SplitKind::Mix: {
              const Zone z = mix_zone(i, j);
              if (z == ZH) {
                hex_cell(i, j, k);
              } else if (z == ZP) {
                prism_cell(i, j, k);
              } else if (z == ZT) {
                tet_cell(i, j, k);
              } else {
                // hex face order: z-, y-, x-, x+, y+, z+
                std::array<bool, 6> to_tet = {false, false, false, false, false, false};
                if (mix_zone(wrapm(i - 1), j) == ZT) to_tet[2] = true;
                if (mix_zone(wrapm(i + 1), j) == ZT) to_tet[3] = true;
                if (mix_zone(i, wrapm(j - 1)) == ZT) to_tet[1] = true;
                if (mix_zone(i, wrapm(j + 1)) == ZT) to_tet[4] = true;
                pyra_cell(i, j, k, to_tet);
              }
              break;
            }
            default:
              throw MeshError("gen_box_mesh: split not available in 3D");
          }
        }
      }
    }
  }
};

// periodic images share a key: positions are quantized modulo the box length
std::array<long, 3> position_key(const Vec3& x, Real scale) {
  auto q = [scale](Real v) {
    const long r = llround(v / scale * 1e9) % 1000000000L;
    return (r + 1000000000L) % 1000000000L;
  };
  return {q(x[0]), q(x[1]), q(x[2])};
}

}  // namespace

Mesh gen_box_mesh(const GenOptions& opt) {
  if (opt.n_geo < 1) throw MeshError("gen_box_mesh: n_geo must be >= 1");
  BoxBuilder builder(opt);
  builder.build();
  Mesh mesh = std::move(builder.mesh);
  mesh.dim = opt.dim;
  mesh.n_geo = opt.n_geo;
  mesh.length = opt.length;

  // straight control nodes first, then the sinusoidal node perturbation,
  // then interpolation back to modal geometry coefficients; nodes of
  // pyramid-split cells (pyramids plus their conversion tets) stay in place
  const int g = opt.n_geo;
  std::vector<Mat> control(mesh.elements.size());
  std::set<std::array<long, 3>> frozen;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    Element& el = mesh.elements[e];
    std::vector<Vec3> verts;
    for (int v : el.vertices) verts.push_back(mesh.nodes[v]);
    const Mat g1 = straight_modal(el.family, mesh.dim, verts);
    control[e] = vandermonde(el.family, 1, geometry_lattice(el.family, g)) * g1;
    if (builder.pyramid_cell[e] && !opt.perturb_pyramids && opt.epsilon > 0) {
      for (int c = 0; c < control[e].rows(); ++c) {
        Vec3 x = Vec3::Zero();
        x.head(mesh.dim) = control[e].row(c).transpose();
        frozen.insert(position_key(x, opt.length));
      }
    }
  }

  if (opt.epsilon > 0) {
    const Real L = opt.length;
    const Real eps = opt.epsilon;
    auto deform = [&](const Vec3& x) {
      Vec3 d = Vec3::Zero();
      const Real a1 = M_PI / L * (x[0] - L / 2);
      const Real a2 = M_PI / L * (x[1] - L / 2);
      if (opt.dim == 2) {
        d[0] = eps * L * std::cos(a1) * std::cos(3 * a2);
        d[1] = eps * L * std::sin(4 * a1) * std::cos(a2);
      } else {
        const Real a3 = M_PI / L * (x[2] - L / 2);
        d[0] = eps * L * std::cos(a1) * std::sin(4 * a2) * std::cos(a3);
        d[1] = eps * L * std::cos(3 * a1) * std::cos(a2) * std::cos(a3);
        d[2] = eps * L * std::cos(a1) * std::cos(2 * a2) * std::cos(a3);
      }
      return d;
    };
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
      for (int c = 0; c < control[e].rows(); ++c) {
        Vec3 x = Vec3::Zero();
        x.head(mesh.dim) = control[e].row(c).transpose();
        if (!frozen.empty() && frozen.count(position_key(x, opt.length))) continue;
        control[e].row(c) += deform(x).head(mesh.dim).transpose();
      }
    }
  }

  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    mesh.elements[e].geo_control = control[e];
    mesh.elements[e].geo_modal =
        lattice_interp_matrix(mesh.elements[e].family, g) * control[e];
  }

  build_connectivity(mesh);
  return mesh;
}

void build_connectivity(Mesh& mesh) {
  mesh.faces.clear();
  mesh.elem_face.assign(mesh.elements.size(), {-1, -1, -1, -1, -1, -1});
  std::map<std::vector<long>, std::pair<int, int>> open;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    const auto& faces = family_faces(el.family);
    for (int fc = 0; fc < static_cast<int>(faces.size()); ++fc) {
      std::vector<long> key;
      for (int c : faces[fc].corners) key.push_back(mesh.canonical[el.vertices[c]]);
      std::sort(key.begin(), key.end());
      if (std::adjacent_find(key.begin(), key.end()) != key.end()) {
        throw MeshError("build_connectivity: degenerate face on element " + std::to_string(e));
      }
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(std::move(key), std::make_pair(e, fc));
        continue;
      }
      Face f;
      f.left = it->second.first;
      f.left_face = it->second.second;
      f.right = e;
      f.right_face = fc;
      f.tri = (faces[fc].corners.size() == 3) && mesh.dim == 3;
      // periodic shift from one matched corner pair
      const Element& le = mesh.elements[f.left];
      const auto& lcorners = family_faces(le.family)[f.left_face].corners;
      const long canon0 = mesh.canonical[el.vertices[faces[fc].corners[0]]];
      for (int c : lcorners) {
        if (mesh.canonical[le.vertices[c]] == canon0) {
          const Vec3 diff =
              mesh.nodes[le.vertices[c]] - mesh.nodes[el.vertices[faces[fc].corners[0]]];
          for (int p = 0; p < 3; ++p) {
            f.offset[p] = mesh.length * std::round(diff[p] / mesh.length);
          }
          break;
        }
      }
      const int fid = static_cast<int>(mesh.faces.size());
      mesh.elem_face[f.left][f.left_face] = fid;
      mesh.elem_face[f.right][f.right_face] = fid;
      mesh.faces.push_back(std::move(f));
      open.erase(it);
    }
  }
  if (!open.empty()) {
    const auto& bad = open.begin()->second;
    throw MeshError("build_connectivity: unmatched face " + std::to_string(bad.second) +
                    " on element " + std::to_string(bad.first) +
                    " (non-conforming or non-periodic boundary)");
  }
}

Vec3 element_map(const Mesh& mesh, int e, const Vec3& xi) {
  const Element& el = mesh.elements[e];
  Mat pt(mesh.dim, 1);
  for (int p = 0; p < mesh.dim; ++p) pt(p, 0) = xi[p];
  const Mat v = vandermonde(el.family, mesh.n_geo, pt);
  Vec3 x = Vec3::Zero();
  x.head(mesh.dim) = (v * el.geo_modal).row(0).transpose();
  return x;
}

std::optional<std::vector<int>> orientation_match(const Mesh& mesh, int face_id, int degree) {
  const Face& f = mesh.faces.at(face_id);
  if (f.tri || f.right < 0) return std::nullopt;
  const Element& le = mesh.elements[f.left];
  const Element& re = mesh.elements[f.right];
  const Mat xl = geo_eval_cache(le.family, mesh.n_geo, degree).face[f.left_face] * le.geo_modal;
  const Mat xr = geo_eval_cache(re.family, mesh.n_geo, degree).face[f.right_face] * re.geo_modal;
  const int nf = static_cast<int>(xl.rows());
  std::vector<int> perm(nf, -1);
  const Real scale = (xl.row(0) - xl.row(nf - 1)).norm() + 1e-300;
  for (int b = 0; b < nf; ++b) {
    for (int r = 0; r < nf; ++r) {
      Real dist = 0.0;
      for (int p = 0; p < mesh.dim; ++p) {
        const Real d = xl(b, p) - (xr(r, p) + f.offset[p]);
        dist += d * d;
      }
      if (std::sqrt(dist) < 1e-10 * scale) {
        perm[b] = r;
        break;
      }
    }
    if (perm[b] < 0) {
      throw MeshError("orientation_match: no coincident node permutation on face " +
                      std::to_string(face_id));
    }
  }
  return perm;
}

Vec apply_diff_axis(const DiscreteOperators& ops, const Vec& field, int axis) {
  const int n = ops.n1d;
  const int s = ops.stride(axis);
  Vec out(ops.nq);
  for (int idx = 0; idx < ops.nq; ++idx) {
    const int ia = (idx / s) % n;
    const int base = idx - ia * s;
    Real acc = 0.0;
    for (int m = 0; m < n; ++m) acc += ops.d1(ia, m) * field[base + m * s];
    out[idx] = acc;
  }
  return out;
}

ElementGeometry compute_element_geometry(const Mesh& mesh, int e, int degree) {
  if (mesh.n_geo > degree) {
    throw std::invalid_argument(
        "compute_element_geometry: geometry degree above the solution degree breaks the "
        "discrete metric identities");
  }
  const Element& el = mesh.elements[e];
  const int d = mesh.dim;
  const auto& ops = get_operators(el.family, degree);
  const auto& gc = geo_eval_cache(el.family, mesh.n_geo, degree);

  ElementGeometry geo;
  geo.xq = gc.vol * el.geo_modal;

  // exact derivative fields d x_m / d eta_r of the composite map
  std::vector<Mat> dxdxi(d);
  for (int p = 0; p < d; ++p) dxdxi[p] = gc.grad[p] * el.geo_modal;
  std::vector<Mat> dxdeta(d, Mat(ops.nq, d));
  geo.jgeo.resize(ops.nq);
  Vec3 eta = Vec3::Zero();
  for (int q = 0; q < ops.nq; ++q) {
    for (int p = 0; p < d; ++p) eta[p] = ops.vol.eta(p, q);
    const Mat3 jg = collapse_jacobian(el.family, eta);
    Mat3 gj = Mat3::Identity();
    for (int mrow = 0; mrow < d; ++mrow) {
      for (int p = 0; p < d; ++p) gj(mrow, p) = dxdxi[p](q, mrow);
    }
    geo.jgeo[q] = (d == 3) ? gj.determinant() : gj.topLeftCorner<2, 2>().determinant();
    if (!(geo.jgeo[q] > 0)) {
      throw MeshError("element " + std::to_string(e) + ": nonpositive geometry Jacobian");
    }
    for (int r = 0; r < d; ++r) {
      for (int mrow = 0; mrow < d; ++mrow) {
        Real acc = 0.0;
        for (int p = 0; p < d; ++p) acc += gj(mrow, p) * jg(p, r);
        dxdeta[r](q, mrow) = acc;
      }
    }
  }

  // conservative (cross-product) curl form of the combined contravariant
  // metrics; the discrete divergence vanishes because line derivatives
  // along different axes commute
  geo.g.resize(ops.nq, d * d);
  if (d == 2) {
    geo.g.col(0 * 2 + 0) = apply_diff_axis(ops, geo.xq.col(1), 1);
    geo.g.col(0 * 2 + 1) = -apply_diff_axis(ops, geo.xq.col(0), 1);
    geo.g.col(1 * 2 + 0) = -apply_diff_axis(ops, geo.xq.col(1), 0);
    geo.g.col(1 * 2 + 1) = apply_diff_axis(ops, geo.xq.col(0), 0);
  } else {
    for (int mcomp = 0; mcomp < 3; ++mcomp) {
      const int n1 = (mcomp + 1) % 3;
      const int n2 = (mcomp + 2) % 3;
      std::array<Vec, 3> bracket;
      for (int s = 0; s < 3; ++s) {
        bracket[s] = geo.xq.col(n1).cwiseProduct(dxdeta[s].col(n2)) -
                     geo.xq.col(n2).cwiseProduct(dxdeta[s].col(n1));
      }
      for (int qdir = 0; qdir < 3; ++qdir) {
        const int r = (qdir + 1) % 3;
        const int s = (qdir + 2) % 3;
        geo.g.col(qdir * 3 + mcomp) =
            0.5 * (apply_diff_axis(ops, bracket[s], r) - apply_diff_axis(ops, bracket[r], s));
      }
    }
  }

  geo.jproj = project_jacobian(ops, geo.jgeo);
  geo.jproj_inv = geo.jproj.cwiseInverse();

  for (int fc = 0; fc < family_n_faces(el.family); ++fc) {
    const FaceOps& fo = ops.faces[fc];
    FaceGeometry fg;
    fg.x = gc.face[fc] * el.geo_modal;
    fg.nanson.resize(fo.vf.rows(), d);
    for (int mcomp = 0; mcomp < d; ++mcomp) {
      fg.nanson.col(mcomp) = Real(fo.side) * (fo.vf * geo.g.col(fo.axis * d + mcomp));
    }
    fg.surfj = fg.nanson.rowwise().norm();
    if (fg.surfj.minCoeff() <= 0) {
      throw MeshError("element " + std::to_string(e) + " face " + std::to_string(fc) +
                      ": degenerate surface element");
    }
    fg.normal = fg.nanson.array().colwise() / fg.surfj.array();
    geo.face.push_back(std::move(fg));
  }
  return geo;
}

Real metric_identity_residual(const Mesh& mesh, int e, int degree) {
  const Element& el = mesh.elements[e];
  const auto& ops = get_operators(el.family, degree);
  const ElementGeometry geo = compute_element_geometry(mesh, e, degree);
  Real worst = 0.0;
  for (int mcomp = 0; mcomp < mesh.dim; ++mcomp) {
    Vec div = Vec::Zero(ops.nq);
    for (int qdir = 0; qdir < mesh.dim; ++qdir) {
      div += apply_diff_axis(ops, geo.g.col(qdir * mesh.dim + mcomp), qdir);
    }
    worst = std::max(worst, div.cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

std::string fmt_real(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_phm(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_phm: cannot open " + path);
  out << "phm 1\n";
  out << "dim " << mesh.dim << "\n";
  out << "length " << fmt_real(mesh.length) << "\n";
  out << "ngeo " << mesh.n_geo << "\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    for (int p = 0; p < mesh.dim; ++p) out << fmt_real(mesh.nodes[n][p]) << " ";
    out << mesh.canonical[n] << "\n";
  }
  out << "elements " << mesh.elements.size() << "\n";
  for (const Element& el : mesh.elements) {
    out << family_name(el.family);
    for (int v : el.vertices) out << " " << v;
    out << "\n";
  }
  out << "geometry " << mesh.elements.size() << "\n";
  for (const Element& el : mesh.elements) {
    for (int c = 0; c < el.geo_control.rows(); ++c) {
      for (int p = 0; p < mesh.dim; ++p) {
        out << fmt_real(el.geo_control(c, p)) << (p + 1 < mesh.dim ? " " : "");
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw IoError("write_phm: write failed for " + path);
}

Mesh read_phm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_phm: cannot open " + path);
  std::string tok;
  int version = 0;
  in >> tok >> version;
  if (tok != "phm" || version != 1) throw IoError("read_phm: not a phm v1 file: " + path);
  Mesh mesh;
  size_t n_nodes = 0, n_elem = 0;
  bool have_geometry = false;
  while (in >> tok) {
    if (tok == "dim") {
      in >> mesh.dim;
    } else if (tok == "length") {
      in >> mesh.length;
    } else if (tok == "ngeo") {
      in >> mesh.n_geo;
    } else if (tok == "nodes") {
      in >> n_nodes;
      mesh.nodes.assign(n_nodes, Vec3::Zero());
      mesh.canonical.resize(n_nodes);
      for (size_t n = 0; n < n_nodes; ++n) {
        for (int p = 0; p < mesh.dim; ++p) in >> mesh.nodes[n][p];
        in >> mesh.canonical[n];
      }
    } else if (tok == "elements") {
      in >> n_elem;
      mesh.elements.resize(n_elem);
      for (size_t e = 0; e < n_elem; ++e) {
        std::string fam;
        in >> fam;
        mesh.elements[e].family = family_from_name(fam);
        mesh.elements[e].vertices.resize(family_n_vertices(mesh.elements[e].family));
        for (int& v : mesh.elements[e].vertices) in >> v;
      }
    } else if (tok == "geometry") {
      size_t count = 0;
      in >> count;
      if (count != n_elem) throw IoError("read_phm: geometry block size mismatch");
      for (size_t e = 0; e < n_elem; ++e) {
        Element& el = mesh.elements[e];
        const int rows = modal_dim(el.family, mesh.n_geo);
        Mat control(rows, mesh.dim);
        for (int c = 0; c < rows; ++c) {
          for (int p = 0; p < mesh.dim; ++p) in >> control(c, p);
        }
        el.geo_control = control;
        el.geo_modal = lattice_interp_matrix(el.family, mesh.n_geo) * control;
      }
      have_geometry = true;
    } else if (tok == "end") {
      break;
    } else {
      throw IoError("read_phm: unknown section '" + tok + "'");
    }
  }
  if (!in) throw IoError("read_phm: truncated file " + path);
  if (!have_geometry) {
    for (Element& el : mesh.elements) {
      std::vector<Vec3> verts;
      for (int v : el.vertices) verts.push_back(mesh.nodes[v]);
      const Mat g1 = straight_modal(el.family, mesh.dim, verts);
      const Mat lat = geometry_lattice(el.family, mesh.n_geo);
      el.geo_control = vandermonde(el.family, 1, lat) * g1;
      el.geo_modal = lattice_interp_matrix(el.family, mesh.n_geo) * el.geo_control;
    }
  }
  build_connectivity(mesh);
  return mesh;
}

}  // namespace polydg
