#include "polydg/operators.hpp"

#include <map>
#include <mutex>

namespace polydg {

int DiscreteOperators::stride(int axis) const {
  int s = 1;
  for (int p = 0; p < axis; ++p) s *= n1d;
  return s;
}

int DiscreteOperators::node_index(int i, int j, int k) const {
  return i + n1d * (j + ((dim == 3) ? n1d * k : 0));
}

namespace {

DiscreteOperators build_operators(Family f, int degree) {
  if (degree < 1) throw std::invalid_argument("build_operators: degree must be >= 1");
  DiscreteOperators ops;
  ops.family = f;
  ops.degree = degree;
  ops.dim = family_dim(f);
  ops.n1d = degree + 1;
  ops.rule = legendre_gauss(ops.n1d);
  ops.d1 = diff_matrix(ops.rule).entries;
  ops.vol = volume_quadrature(f, ops.n1d);
  ops.nq = static_cast<int>(ops.vol.w.size());
  ops.nmodal = modal_dim(f, degree);
  ops.nf = (ops.dim == 3) ? ops.n1d * ops.n1d : ops.n1d;
  ops.w = ops.vol.w;
  ops.wj = ops.vol.w.cwiseProduct(ops.vol.jhat);

  ops.V = vandermonde(f, degree, ops.vol.xi);
  ops.Mt = ops.V.transpose() * ops.wj.asDiagonal() * ops.V;
  ops.Mt_fact.compute(ops.Mt);
  if (ops.Mt_fact.info() != Eigen::Success ||
      ops.Mt_fact.vectorD().minCoeff() < 1e-13 * ops.Mt_fact.vectorD().maxCoeff()) {
    throw std::runtime_error("build_operators: reference modal mass is near singular");
  }
  ops.proj = ops.Mt_fact.solve(ops.V.transpose() * ops.wj.asDiagonal());
  ops.mt_identity_gap =
      (ops.Mt - Mat::Identity(ops.nmodal, ops.nmodal)).cwiseAbs().maxCoeff();

  const Vec bary = barycentric_weights(ops.rule.nodes);
  for (const FaceRef& fr : family_cube_faces(f)) {
    FaceOps fo;
    fo.axis = fr.axis;
    fo.side = fr.side;
    fo.collapsed = fr.collapsed;
    int t = 0;
    for (int p = 0; p < ops.dim; ++p) {
      if (p != fr.axis) fo.tangent_axes[t++] = p;
    }
    fo.l_end = lagrange_eval(ops.rule.nodes, bary, Real(fr.side));
    fo.vf = Mat::Zero(ops.nf, ops.nq);
    fo.wf.resize(ops.nf);
    fo.eta.resize(ops.dim, ops.nf);
    for (int b = 0; b < ops.nf; ++b) {
      const int a = b % ops.n1d;
      const int c = b / ops.n1d;
      Real wf = ops.rule.weights[a];
      int idx3[3] = {0, 0, 0};
      idx3[fo.tangent_axes[0]] = a;
      if (ops.dim == 3) {
        idx3[fo.tangent_axes[1]] = c;
        wf *= ops.rule.weights[c];
      }
      fo.wf[b] = wf;
      for (int m = 0; m < ops.n1d; ++m) {
        idx3[fr.axis] = m;
        fo.vf(b, ops.node_index(idx3[0], idx3[1], idx3[2])) = fo.l_end[m];
      }
      Vec3 e = Vec3::Zero();
      e[fr.axis] = fr.side;
      e[fo.tangent_axes[0]] = ops.rule.nodes[a];
      if (ops.dim == 3) e[fo.tangent_axes[1]] = ops.rule.nodes[c];
      for (int p = 0; p < ops.dim; ++p) fo.eta(p, b) = e[p];
    }
    ops.faces.push_back(std::move(fo));
  }
  return ops;
}

}  // namespace

const DiscreteOperators& get_operators(Family f, int degree) {
  static std::map<std::pair<int, int>, DiscreteOperators> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(static_cast<int>(f), degree);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_operators(f, degree)).first;
  return it->second;
}

Vec project_jacobian(const DiscreteOperators& ops, const Vec& j_nodal) {
  const Vec jproj = ops.V * (ops.proj * j_nodal);
  if (jproj.minCoeff() <= 0.0) {
    throw MeshError("project_jacobian: projected Jacobian lost positivity (mesh too distorted)");
  }
  return jproj;
}

Mat modal_mass(const DiscreteOperators& ops, const Vec& jproj) {
  return ops.V.transpose() * ops.wj.cwiseProduct(jproj).asDiagonal() * ops.V;
}

Mat project_to_modal(const DiscreteOperators& ops, const Vec& jproj, const Mat& u_nodal) {
  const Mat rhs = ops.V.transpose() * (ops.wj.cwiseProduct(jproj).asDiagonal() * u_nodal);
  const Mat me = modal_mass(ops, jproj);
  const auto fact = me.ldlt();
  Mat x = fact.solve(rhs);
  x += fact.solve(rhs - me * x);  // one refinement pass
  return x;
}

Mat apply_weight_adjusted_inverse(const DiscreteOperators& ops, const Vec& jproj_inv,
                                  const Mat& r_nodal) {
  const Mat z = ops.Mt_fact.solve(ops.V.transpose() * r_nodal);
  const Mat y = ops.wj.cwiseProduct(jproj_inv).asDiagonal() * (ops.V * z);
  return ops.Mt_fact.solve(ops.V.transpose() * y);
}

Mat face_trace(const DiscreteOperators& ops, const FaceOps& fo, const Mat& nodal) {
  const int n = ops.n1d;
  const int nf = static_cast<int>(fo.wf.size());
  const int stride = ops.stride(fo.axis);
  Mat out(nf, nodal.cols());
  for (int b = 0; b < nf; ++b) {
    const int a0 = b % n;
    const int a1 = b / n;
    int idx3[3] = {0, 0, 0};
    idx3[fo.tangent_axes[0]] = a0;
    if (ops.dim == 3) idx3[fo.tangent_axes[1]] = a1;
    idx3[fo.axis] = 0;
    const int base = ops.node_index(idx3[0], idx3[1], idx3[2]);
    out.row(b) = fo.l_end[0] * nodal.row(base);
    for (int m = 1; m < n; ++m) out.row(b) += fo.l_end[m] * nodal.row(base + m * stride);
  }
  return out;
}

Mat dense_diff(const DiscreteOperators& ops, int axis) {
  Mat d = Mat::Zero(ops.nq, ops.nq);
  const int s = ops.stride(axis);
  for (int idx = 0; idx < ops.nq; ++idx) {
    const int ia = (idx / s) % ops.n1d;
    const int base = idx - ia * s;
    for (int m = 0; m < ops.n1d; ++m) d(idx, base + m * s) = ops.d1(ia, m);
  }
  return d;
}

Mat dense_vf(const DiscreteOperators& ops) {
  const int nfaces = static_cast<int>(ops.faces.size());
  Mat vf(nfaces * ops.nf, ops.nq);
  for (int fc = 0; fc < nfaces; ++fc) vf.middleRows(fc * ops.nf, ops.nf) = ops.faces[fc].vf;
  return vf;
}

Vec dense_face_weights(const DiscreteOperators& ops, int axis) {
  const int nfaces = static_cast<int>(ops.faces.size());
  Vec b = Vec::Zero(nfaces * ops.nf);
  for (int fc = 0; fc < nfaces; ++fc) {
    if (ops.faces[fc].axis != axis) continue;
    b.segment(fc * ops.nf, ops.nf) = Real(ops.faces[fc].side) * ops.faces[fc].wf;
  }
  return b;
}

Mat dense_sbp_q(const DiscreteOperators& ops, int axis) {
  const Mat vf = dense_vf(ops);
  const Vec b = dense_face_weights(ops, axis);
  const int nb = static_cast<int>(b.size());
  const Mat wd = ops.w.asDiagonal() * dense_diff(ops, axis);
  Mat q(ops.nq + nb, ops.nq + nb);
  q.topLeftCorner(ops.nq, ops.nq) = wd - 0.5 * vf.transpose() * b.asDiagonal() * vf;
  q.topRightCorner(ops.nq, nb) = 0.5 * vf.transpose() * b.asDiagonal();
  q.bottomLeftCorner(nb, ops.nq) = -0.5 * b.asDiagonal() * vf;
  q.bottomRightCorner(nb, nb) = 0.5 * b.asDiagonal();
  return q;
}

}  // namespace polydg
