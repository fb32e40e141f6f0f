#include "polydg/ref_elem.hpp"

#include <Eigen/LU>
#include <cmath>
#include <map>

namespace polydg {

namespace {
constexpr Real kCollapseTol = 1e-13;
}

int family_dim(Family f) {
  switch (f) {
    case Family::Quad:
    case Family::Tria:
      return 2;
    default:
      return 3;
  }
}

int family_n_faces(Family f) {
  switch (f) {
    case Family::Hex: return 6;
    case Family::Prism: return 5;
    case Family::Pyra: return 5;
    case Family::Tet: return 4;
    case Family::Quad: return 4;
    case Family::Tria: return 3;
  }
  return 0;
}

int family_n_vertices(Family f) {
  switch (f) {
    case Family::Hex: return 8;
    case Family::Prism: return 6;
    case Family::Pyra: return 5;
    case Family::Tet: return 4;
    case Family::Quad: return 4;
    case Family::Tria: return 3;
  }
  return 0;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::Hex: return "hex";
    case Family::Prism: return "prism";
    case Family::Pyra: return "pyra";
    case Family::Tet: return "tet";
    case Family::Quad: return "quad";
    case Family::Tria: return "tria";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "hex") return Family::Hex;
  if (name == "prism") return Family::Prism;
  if (name == "pyra") return Family::Pyra;
  if (name == "tet") return Family::Tet;
  if (name == "quad") return Family::Quad;
  if (name == "tria") return Family::Tria;
  throw std::invalid_argument("unknown element family: " + name);
}

Mat family_vertices(Family f) {
  Mat v;
  switch (f) {
    case Family::Hex:
      v.resize(3, 8);
      v << -1, 1, -1, 1, -1, 1, -1, 1,
           -1, -1, 1, 1, -1, -1, 1, 1,
           -1, -1, -1, -1, 1, 1, 1, 1;
      break;
    case Family::Prism:
      v.resize(3, 6);
      v << -1, 1, -1, -1, 1, -1,
           -1, -1, 1, -1, -1, 1,
           -1, -1, -1, 1, 1, 1;
      break;
    case Family::Pyra:
      v.resize(3, 5);
      v << -1, 1, -1, 1, -1,
           -1, -1, 1, 1, -1,
           -1, -1, -1, -1, 1;
      break;
    case Family::Tet:
      v.resize(3, 4);
      v << -1, 1, -1, -1,
           -1, -1, 1, -1,
           -1, -1, -1, 1;
      break;
    case Family::Quad:
      v.resize(2, 4);
      v << -1, 1, -1, 1,
           -1, -1, 1, 1;
      break;
    case Family::Tria:
      v.resize(2, 3);
      v << -1, 1, -1,
           -1, -1, 1;
      break;
  }
  return v;
}

Real family_measure(Family f) {
  switch (f) {
    case Family::Hex: return 8.0;
    case Family::Prism: return 4.0;
    case Family::Pyra: return 8.0 / 3.0;
    case Family::Tet: return 4.0 / 3.0;
    case Family::Quad: return 4.0;
    case Family::Tria: return 2.0;
  }
  return 0.0;
}

const std::vector<FaceRef>& family_faces(Family f) {
  // Paper face ordering per family; corners follow the vertex tables above.
  static const std::map<Family, std::vector<FaceRef>> tab = {
      {Family::Hex,
       {{2, -1, false, {0, 1, 3, 2}},
        {1, -1, false, {0, 1, 5, 4}},
        {0, -1, false, {0, 2, 6, 4}},
        {0, +1, false, {1, 3, 7, 5}},
        {1, +1, false, {2, 3, 7, 6}},
        {2, +1, false, {4, 5, 7, 6}}}},
      {Family::Prism,
       {{2, -1, false, {0, 1, 2}},
        {1, -1, false, {0, 1, 4, 3}},
        {0, +1, false, {1, 2, 5, 4}},
        {0, -1, false, {0, 2, 5, 3}},
        {2, +1, false, {3, 4, 5}}}},
      {Family::Pyra,
       {{2, -1, false, {0, 1, 3, 2}},
        {1, -1, false, {0, 1, 4}},
        {0, +1, false, {1, 3, 4}},
        {0, -1, false, {0, 2, 4}},
        {1, +1, false, {2, 3, 4}}}},
      {Family::Tet,
       {{2, -1, false, {0, 1, 2}},
        {1, -1, false, {0, 1, 3}},
        {0, +1, false, {1, 2, 3}},
        {0, -1, false, {0, 2, 3}}}},
      {Family::Quad,
       {{1, -1, false, {0, 1}},
        {0, -1, false, {0, 2}},
        {0, +1, false, {1, 3}},
        {1, +1, false, {2, 3}}}},
      {Family::Tria,
       {{1, -1, false, {0, 1}},
        {0, +1, false, {1, 2}},
        {0, -1, false, {0, 2}}}},
  };
  return tab.at(f);
}

const std::vector<FaceRef>& family_cube_faces(Family f) {
  static std::map<Family, std::vector<FaceRef>> tab;
  auto it = tab.find(f);
  if (it != tab.end()) return it->second;
  std::vector<FaceRef> faces = family_faces(f);
  const int d = family_dim(f);
  for (int axis = 0; axis < d; ++axis) {
    for (int side : {-1, +1}) {
      bool present = false;
      for (const auto& fr : faces) present |= (fr.axis == axis && fr.side == side);
      if (!present) faces.push_back({axis, side, true, {}});
    }
  }
  return tab.emplace(f, std::move(faces)).first->second;
}

int cube_face_index(Family f, int phys_face) {
  // family_faces entries come first in family_cube_faces
  return phys_face;
}

Vec3 collapse_map(Family f, const Vec3& e) {
  switch (f) {
    case Family::Hex:
    case Family::Quad:
      return e;
    case Family::Prism:
    case Family::Tria:
      return {(1 + e[0]) * (1 - e[1]) / 2 - 1, e[1], e[2]};
    case Family::Pyra:
      return {(1 + e[0]) * (1 - e[2]) / 2 - 1, (1 + e[1]) * (1 - e[2]) / 2 - 1, e[2]};
    case Family::Tet:
      return {(1 + e[0]) * (1 - e[1]) * (1 - e[2]) / 4 - 1, (1 + e[1]) * (1 - e[2]) / 2 - 1,
              e[2]};
  }
  return e;
}

Vec3 collapse_map_inverse(Family f, const Vec3& xi) {
  auto safe_div = [](Real num, Real den, const char* what) {
    if (std::abs(den) < kCollapseTol) throw std::domain_error(what);
    return num / den;
  };
  switch (f) {
    case Family::Hex:
    case Family::Quad:
      return xi;
    case Family::Prism:
    case Family::Tria:
      return {2 * safe_div(1 + xi[0], 1 - xi[1], "collapse inverse singular: xi2 = 1") - 1,
              xi[1], xi[2]};
    case Family::Pyra: {
      const Real t = safe_div(1.0, 1 - xi[2], "collapse inverse singular: xi3 = 1");
      return {2 * (1 + xi[0]) * t - 1, 2 * (1 + xi[1]) * t - 1, xi[2]};
    }
    case Family::Tet:
      return {2 * safe_div(1 + xi[0], -xi[1] - xi[2], "collapse inverse singular: xi2+xi3 = 0") -
                  1,
              2 * safe_div(1 + xi[1], 1 - xi[2], "collapse inverse singular: xi3 = 1") - 1,
              xi[2]};
  }
  return xi;
}

Mat3 collapse_jacobian(Family f, const Vec3& e) {
  Mat3 j = Mat3::Identity();
  switch (f) {
    case Family::Hex:
    case Family::Quad:
      break;
    case Family::Prism:
    case Family::Tria:
      j(0, 0) = (1 - e[1]) / 2;
      j(0, 1) = -(1 + e[0]) / 2;
      break;
    case Family::Pyra:
      j(0, 0) = (1 - e[2]) / 2;
      j(0, 2) = -(1 + e[0]) / 2;
      j(1, 1) = (1 - e[2]) / 2;
      j(1, 2) = -(1 + e[1]) / 2;
      break;
    case Family::Tet:
      j(0, 0) = (1 - e[1]) * (1 - e[2]) / 4;
      j(0, 1) = -(1 + e[0]) * (1 - e[2]) / 4;
      j(0, 2) = -(1 + e[0]) * (1 - e[1]) / 4;
      j(1, 1) = (1 - e[2]) / 2;
      j(1, 2) = -(1 + e[1]) / 2;
      break;
  }
  return j;
}

Mat3 adj_jacobian_collapse(Family f, const Vec3& e) {
  Mat3 a = Mat3::Identity();
  switch (f) {
    case Family::Hex:
    case Family::Quad:
      break;
    case Family::Prism:
    case Family::Tria:
      a(0, 1) = (1 + e[0]) / 2;
      a(1, 1) = (1 - e[1]) / 2;
      a(2, 2) = (1 - e[1]) / 2;
      break;
    case Family::Pyra:
      a(0, 0) = (1 - e[2]) / 2;
      a(0, 2) = (1 + e[0]) * (1 - e[2]) / 4;
      a(1, 1) = (1 - e[2]) / 2;
      a(1, 2) = (1 + e[1]) * (1 - e[2]) / 4;
      a(2, 2) = (1 - e[2]) * (1 - e[2]) / 4;
      break;
    case Family::Tet:
      a(0, 0) = (1 - e[2]) / 2;
      a(0, 1) = (1 + e[0]) * (1 - e[2]) / 4;
      a(0, 2) = (1 + e[0]) * (1 - e[2]) / 4;
      a(1, 1) = (1 - e[1]) * (1 - e[2]) / 4;
      a(1, 2) = (1 + e[1]) * (1 - e[1]) * (1 - e[2]) / 8;
      a(2, 2) = (1 - e[1]) * (1 - e[2]) * (1 - e[2]) / 8;
      break;
  }
  return a;
}

Real jac_det(Family f, const Vec3& e) {
  switch (f) {
    case Family::Hex:
    case Family::Quad:
      return 1.0;
    case Family::Prism:
    case Family::Tria:
      return (1 - e[1]) / 2;
    case Family::Pyra:
      return (1 - e[2]) * (1 - e[2]) / 4;
    case Family::Tet:
      return (1 - e[1]) * (1 - e[2]) * (1 - e[2]) / 8;
  }
  return 1.0;
}

bool polytope_contains(Family f, const Vec3& xi, Real tol) {
  const int d = family_dim(f);
  for (int p = 0; p < d; ++p) {
    if (xi[p] < -1 - tol || xi[p] > 1 + tol) return false;
  }
  switch (f) {
    case Family::Prism:
    case Family::Tria:
      return xi[0] + xi[1] <= tol;
    case Family::Pyra:
      return xi[0] + xi[2] <= tol && xi[1] + xi[2] <= tol;
    case Family::Tet:
      return xi[0] + xi[1] + xi[2] <= -1 + tol;
    default:
      return true;
  }
}

Vec3 face_nanson(Family f, int phys_face, const Vec3& eta) {
  const FaceRef& fr = family_faces(f).at(phys_face);
  return Real(fr.side) * adj_jacobian_collapse(f, eta).row(fr.axis).transpose();
}

Vec3 face_unit_normal(Family f, int phys_face) {
  const FaceRef& fr = family_faces(f).at(phys_face);
  // interior point of the face; the unit direction is constant over the face
  Vec3 eta = Vec3::Zero();
  eta[fr.axis] = fr.side;
  Vec3 v = face_nanson(f, phys_face, eta);
  return v / v.norm();
}

int modal_dim(Family f, int n) {
  switch (f) {
    case Family::Hex: return (n + 1) * (n + 1) * (n + 1);
    case Family::Prism: return (n + 1) * (n + 1) * (n + 2) / 2;
    case Family::Pyra: return (n + 1) * (n + 2) * (2 * n + 3) / 6;
    case Family::Tet: return (n + 1) * (n + 2) * (n + 3) / 6;
    case Family::Quad: return (n + 1) * (n + 1);
    case Family::Tria: return (n + 1) * (n + 2) / 2;
  }
  return 0;
}

std::vector<std::array<int, 3>> pkd_modes(Family f, int n) {
  std::vector<std::array<int, 3>> modes;
  modes.reserve(modal_dim(f, n));
  switch (f) {
    case Family::Hex:
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          for (int k = 0; k <= n; ++k) modes.push_back({i, j, k});
      break;
    case Family::Prism:
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j)
          for (int k = 0; k <= n; ++k) modes.push_back({i, j, k});
      break;
    case Family::Pyra:
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          for (int k = 0; k <= n - std::max(i, j); ++k) modes.push_back({i, j, k});
      break;
    case Family::Tet:
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j)
          for (int k = 0; k <= n - i - j; ++k) modes.push_back({i, j, k});
      break;
    case Family::Quad:
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) modes.push_back({i, j, 0});
      break;
    case Family::Tria:
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j) modes.push_back({i, j, 0});
      break;
  }
  return modes;
}

namespace {

// Pyramid normalization: C_nk = (N+2) / (2^(2(N-k)+2) (2(N-k)+3)), the squared
// norm of the un-normalized semi-nodal function.
Real pyra_cnk(int n, int k) {
  const int m = n - k;
  return (n + 2.0) / (std::pow(2.0, 2 * m + 2) * (2 * m + 3.0));
}

struct Factor {
  Real value;
  Real deriv;
};

Factor jac_factor(Real alpha, int k, Real x) {
  return {jacobi_eval(alpha, 0, k, x), jacobi_deriv(alpha, 0, k, x)};
}

Factor pow_factor(Real base, Real dbase, int p) {
  if (p == 0) return {1.0, 0.0};
  const Real v = std::pow(base, p - 1);
  return {v * base, p * v * dbase};
}

}  // namespace

Vec pkd_eval_eta(Family f, int n, const Vec3& e) {
  const auto modes = pkd_modes(f, n);
  Vec out(static_cast<int>(modes.size()));
  int m = 0;
  switch (f) {
    case Family::Hex:
      for (const auto& md : modes)
        out[m++] = jacobi_eval(0, 0, md[0], e[0]) * jacobi_eval(0, 0, md[1], e[1]) *
                   jacobi_eval(0, 0, md[2], e[2]);
      break;
    case Family::Quad:
      for (const auto& md : modes)
        out[m++] = jacobi_eval(0, 0, md[0], e[0]) * jacobi_eval(0, 0, md[1], e[1]);
      break;
    case Family::Prism:
      for (const auto& md : modes)
        out[m++] = std::sqrt(2.0) * jacobi_eval(0, 0, md[0], e[0]) *
                   jacobi_eval(2 * md[0] + 1, 0, md[1], e[1]) * jacobi_eval(0, 0, md[2], e[2]) *
                   std::pow(1 - e[1], md[0]);
      break;
    case Family::Tria:
      for (const auto& md : modes)
        out[m++] = std::sqrt(2.0) * jacobi_eval(0, 0, md[0], e[0]) *
                   jacobi_eval(2 * md[0] + 1, 0, md[1], e[1]) * std::pow(1 - e[1], md[0]);
      break;
    case Family::Tet:
      for (const auto& md : modes)
        out[m++] = 2 * std::sqrt(2.0) * jacobi_eval(0, 0, md[0], e[0]) *
                   jacobi_eval(2 * md[0] + 1, 0, md[1], e[1]) *
                   jacobi_eval(2 * (md[0] + md[1]) + 2, 0, md[2], e[2]) *
                   std::pow(1 - e[1], md[0]) * std::pow(1 - e[2], md[0] + md[1]);
      break;
    case Family::Pyra:
      for (const auto& md : modes) {
        const int mk = n - md[2];
        out[m++] = 1.0 / std::sqrt(pyra_cnk(n, md[2])) * jacobi_eval(0, 0, md[0], e[0]) *
                   jacobi_eval(0, 0, md[1], e[1]) *
                   jacobi_eval(2 * mk + 3, 0, md[2], e[2]) * std::pow((1 - e[2]) / 2, mk);
      }
      break;
  }
  return out;
}

Vec pkd_eval(Family f, int n, const Vec3& xi) {
  // Evaluate through cube coordinates with a limit branch on collapsed faces:
  // each basis function carries the vanishing collapse factors, so any finite
  // fallback for the undefined cube coordinate gives the correct limit.
  Vec3 e = xi;
  switch (f) {
    case Family::Hex:
    case Family::Quad:
      break;
    case Family::Prism:
    case Family::Tria:
      e[0] = (std::abs(1 - xi[1]) > kCollapseTol) ? 2 * (1 + xi[0]) / (1 - xi[1]) - 1 : -1.0;
      e[1] = xi[1];
      break;
    case Family::Pyra: {
      const bool ok = std::abs(1 - xi[2]) > kCollapseTol;
      e[0] = ok ? 2 * (1 + xi[0]) / (1 - xi[2]) - 1 : -1.0;
      e[1] = ok ? 2 * (1 + xi[1]) / (1 - xi[2]) - 1 : -1.0;
      e[2] = xi[2];
      break;
    }
    case Family::Tet: {
      const Real den1 = -xi[1] - xi[2];
      e[0] = (std::abs(den1) > kCollapseTol) ? 2 * (1 + xi[0]) / den1 - 1 : -1.0;
      e[1] = (std::abs(1 - xi[2]) > kCollapseTol) ? 2 * (1 + xi[1]) / (1 - xi[2]) - 1 : -1.0;
      e[2] = xi[2];
      break;
    }
  }
  for (int p = 0; p < 3; ++p) e[p] = std::clamp(e[p], -1.0, 1.0);
  return pkd_eval_eta(f, n, e);
}

Mat pkd_grad_eta(Family f, int n, const Vec3& e) {
  const auto modes = pkd_modes(f, n);
  const int d = family_dim(f);
  Mat out(static_cast<int>(modes.size()), d);
  int m = 0;
  for (const auto& md : modes) {
    const int i = md[0], j = md[1], k = md[2];
    std::array<Factor, 3> fac = {Factor{1, 0}, Factor{1, 0}, Factor{1, 0}};
    Real scale = 1.0;
    switch (f) {
      case Family::Hex:
        fac[0] = jac_factor(0, i, e[0]);
        fac[1] = jac_factor(0, j, e[1]);
        fac[2] = jac_factor(0, k, e[2]);
        break;
      case Family::Quad:
        fac[0] = jac_factor(0, i, e[0]);
        fac[1] = jac_factor(0, j, e[1]);
        break;
      case Family::Prism:
      case Family::Tria: {
        scale = std::sqrt(2.0);
        fac[0] = jac_factor(0, i, e[0]);
        const Factor pj = jac_factor(2 * i + 1, j, e[1]);
        const Factor pw = pow_factor(1 - e[1], -1.0, i);
        fac[1] = {pj.value * pw.value, pj.deriv * pw.value + pj.value * pw.deriv};
        if (f == Family::Prism) fac[2] = jac_factor(0, k, e[2]);
        break;
      }
      case Family::Tet: {
        scale = 2 * std::sqrt(2.0);
        fac[0] = jac_factor(0, i, e[0]);
        const Factor pj1 = jac_factor(2 * i + 1, j, e[1]);
        const Factor pw1 = pow_factor(1 - e[1], -1.0, i);
        fac[1] = {pj1.value * pw1.value, pj1.deriv * pw1.value + pj1.value * pw1.deriv};
        const Factor pj2 = jac_factor(2 * (i + j) + 2, k, e[2]);
        const Factor pw2 = pow_factor(1 - e[2], -1.0, i + j);
        fac[2] = {pj2.value * pw2.value, pj2.deriv * pw2.value + pj2.value * pw2.deriv};
        break;
      }
      case Family::Pyra: {
        const int mk = n - k;
        scale = 1.0 / std::sqrt(pyra_cnk(n, k));
        fac[0] = jac_factor(0, i, e[0]);
        fac[1] = jac_factor(0, j, e[1]);
        const Factor pj = jac_factor(2 * mk + 3, k, e[2]);
        const Factor pw = pow_factor((1 - e[2]) / 2, -0.5, mk);
        fac[2] = {pj.value * pw.value, pj.deriv * pw.value + pj.value * pw.deriv};
        break;
      }
    }
    for (int p = 0; p < d; ++p) {
      Real g = scale;
      for (int q = 0; q < 3; ++q) g *= (q == p) ? fac[q].deriv : fac[q].value;
      out(m, p) = g;
    }
    ++m;
  }
  return out;
}

Mat vandermonde(Family f, int n, const Mat& xi_points) {
  const int np = static_cast<int>(xi_points.cols());
  Mat v(np, modal_dim(f, n));
  Vec3 xi = Vec3::Zero();
  for (int p = 0; p < np; ++p) {
    for (int c = 0; c < xi_points.rows(); ++c) xi[c] = xi_points(c, p);
    v.row(p) = pkd_eval(f, n, xi).transpose();
  }
  return v;
}

std::vector<Mat> grad_vandermonde(Family f, int n, const Mat& xi_points) {
  const int d = family_dim(f);
  const int np = static_cast<int>(xi_points.cols());
  std::vector<Mat> gv(d, Mat(np, modal_dim(f, n)));
  Vec3 xi = Vec3::Zero();
  for (int p = 0; p < np; ++p) {
    for (int c = 0; c < xi_points.rows(); ++c) xi[c] = xi_points(c, p);
    const Vec3 eta = collapse_map_inverse(f, xi);
    const Mat geta = pkd_grad_eta(f, n, eta);  // M x d
    const Mat3 adj = adj_jacobian_collapse(f, eta);
    const Real det = jac_det(f, eta);
    // d psi / d xi_p = sum_q (d psi / d eta_q) adj_qp / det
    for (int p2 = 0; p2 < d; ++p2) {
      Vec col = Vec::Zero(geta.rows());
      for (int q = 0; q < d; ++q) col += geta.col(q) * (adj(q, p2) / det);
      gv[p2].row(p) = col.transpose();
    }
  }
  return gv;
}

VolumeQuadrature volume_quadrature(Family f, int n1d) {
  const int d = family_dim(f);
  const auto rule = legendre_gauss(n1d);
  VolumeQuadrature q;
  q.n1d = n1d;
  const int nq = static_cast<int>(std::pow(n1d, d));
  q.eta.resize(d, nq);
  q.xi.resize(d, nq);
  q.w.resize(nq);
  q.jhat.resize(nq);
  Vec3 e = Vec3::Zero();
  for (int idx = 0; idx < nq; ++idx) {
    int rem = idx;
    Real w = 1.0;
    for (int p = 0; p < d; ++p) {
      const int ip = rem % n1d;
      rem /= n1d;
      e[p] = rule.nodes[ip];
      w *= rule.weights[ip];
    }
    const Vec3 xi = collapse_map(f, e);
    for (int p = 0; p < d; ++p) {
      q.eta(p, idx) = e[p];
      q.xi(p, idx) = xi[p];
    }
    q.w[idx] = w;
    q.jhat[idx] = jac_det(f, e);
  }
  return q;
}

FaceQuadrature face_quad_points(Family f, int phys_face, int n1d) {
  const int d = family_dim(f);
  const FaceRef& fr = family_faces(f).at(phys_face);
  const auto rule = legendre_gauss(n1d);
  FaceQuadrature q;
  int t = 0;
  for (int p = 0; p < d; ++p) {
    if (p != fr.axis) q.tangent_axes[t++] = p;
  }
  const int nf = (d == 3) ? n1d * n1d : n1d;
  q.eta.resize(d, nf);
  q.xi.resize(d, nf);
  q.w.resize(nf);
  Vec3 e = Vec3::Zero();
  for (int idx = 0; idx < nf; ++idx) {
    const int a = idx % n1d;
    const int b = idx / n1d;
    e[fr.axis] = fr.side;
    e[q.tangent_axes[0]] = rule.nodes[a];
    Real w = rule.weights[a];
    if (d == 3) {
      e[q.tangent_axes[1]] = rule.nodes[b];
      w *= rule.weights[b];
    }
    const Vec3 xi = collapse_map(f, e);
    for (int p = 0; p < d; ++p) {
      q.eta(p, idx) = e[p];
      q.xi(p, idx) = xi[p];
    }
    q.w[idx] = w;
  }
  return q;
}

Mat geometry_lattice(Family f, int g) {
  if (g < 1) throw std::invalid_argument("geometry_lattice: degree must be >= 1");
  const int d = family_dim(f);
  std::vector<Vec3> pts;
  auto coord = [g](int i) { return -1.0 + 2.0 * i / g; };
  switch (f) {
    case Family::Hex:
      for (int k = 0; k <= g; ++k)
        for (int j = 0; j <= g; ++j)
          for (int i = 0; i <= g; ++i) pts.push_back({coord(i), coord(j), coord(k)});
      break;
    case Family::Prism:
      for (int k = 0; k <= g; ++k)
        for (int j = 0; j <= g; ++j)
          for (int i = 0; i <= g - j; ++i) pts.push_back({coord(i), coord(j), coord(k)});
      break;
    case Family::Pyra:
      for (int k = 0; k <= g; ++k)
        for (int j = 0; j <= g - k; ++j)
          for (int i = 0; i <= g - k; ++i) pts.push_back({coord(i), coord(j), coord(k)});
      break;
    case Family::Tet:
      for (int k = 0; k <= g; ++k)
        for (int j = 0; j <= g - k; ++j)
          for (int i = 0; i <= g - j - k; ++i) pts.push_back({coord(i), coord(j), coord(k)});
      break;
    case Family::Quad:
      for (int j = 0; j <= g; ++j)
        for (int i = 0; i <= g; ++i) pts.push_back({coord(i), coord(j), 0});
      break;
    case Family::Tria:
      for (int j = 0; j <= g; ++j)
        for (int i = 0; i <= g - j; ++i) pts.push_back({coord(i), coord(j), 0});
      break;
  }
  if (static_cast<int>(pts.size()) != modal_dim(f, g)) {
    throw std::logic_error("geometry_lattice: node count mismatch");
  }
  Mat out(d, static_cast<int>(pts.size()));
  for (int c = 0; c < out.cols(); ++c)
    for (int p = 0; p < d; ++p) out(p, c) = pts[c][p];
  return out;
}

TriangleRule triangle_rule(int degree) {
  const int n = degree + 1;
  const auto ra = legendre_gauss(n);
  const auto rb = gauss_jacobi(n, 1, 0);
  TriangleRule rule;
  rule.points.resize(2, n * n);
  rule.weights.resize(n * n);
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i, ++idx) {
      const Real a = ra.nodes[i];
      const Real b = rb.nodes[j];
      rule.points(0, idx) = (1 + a) * (1 - b) / 2 - 1;
      rule.points(1, idx) = b;
      rule.weights[idx] = ra.weights[i] * rb.weights[j] / 2;
    }
  }
  return rule;
}

Vec tria_basis_eval(int degree, Real r, Real s) {
  return pkd_eval(Family::Tria, degree, Vec3(r, s, 0.0));
}

}  // namespace polydg
