#include "polydg/solver.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <thread>

namespace polydg {

namespace {

// transpose application of the line differentiation matrix
Vec apply_diff_axis_t(const DiscreteOperators& ops, const Vec& field, int axis) {
  const int n = ops.n1d;
  const int s = ops.stride(axis);
  Vec out(ops.nq);
  for (int idx = 0; idx < ops.nq; ++idx) {
    const int ia = (idx / s) % n;
    const int base = idx - ia * s;
    Real acc = 0.0;
    for (int m = 0; m < n; ++m) acc += ops.d1(m, ia) * field[base + m * s];
    out[idx] = acc;
  }
  return out;
}

// antisymmetric 1D core of the decoupled SBP operator:
//   Q1_ab = w_a D_ab - 1/2 (lp_a lp_b - lm_a lm_b)
Mat sbp_core_1d(const DiscreteOperators& ops) {
  const int n = ops.n1d;
  const Vec bary = barycentric_weights(ops.rule.nodes);
  const Vec lp = lagrange_eval(ops.rule.nodes, bary, 1.0);
  const Vec lm = lagrange_eval(ops.rule.nodes, bary, -1.0);
  Mat q(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      q(a, b) = ops.rule.weights[a] * ops.d1(a, b) - 0.5 * (lp[a] * lp[b] - lm[a] * lm[b]);
    }
  }
  return 0.5 * (q - q.transpose());  // exact generalized-SBP antisymmetry
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nt = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([=]() {
      for (int i = t; i < n; i += nt) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Solver::Workspace {
  Real time = 0.0;
  // per element
  std::vector<Mat> u, vcheck, ucheck;
  std::vector<std::vector<FluxNode>> fnodes;
  std::vector<std::vector<Mat>> trace_u;   // per cube face: nf x nvar
  std::vector<std::vector<Mat>> trace_v;   // entropy-variable traces
  std::vector<std::vector<Mat>> trace_fb;  // per cube face: nf x nvar, G_f . f(u_b)
  std::vector<std::vector<std::vector<FluxNode>>> trace_fn;
  // per face: Nanson-weighted numerical flux at left nodes (quad) or facet
  // quadrature nodes (tri)
  std::vector<Mat> fstar;
  // per tri face: entropy-transfer corrections at each side's own face nodes
  std::vector<Mat> facet_corr_l, facet_corr_r;
  // viscous data
  std::vector<Mat> grads;      // per element nq x (d*(d+1)); d/dx_r of prim c at col r*(d+1)+c
  std::vector<Mat> fv;         // per element nq x (d*nvar); col r*nvar+c
  std::vector<Mat> visc_face;  // per face: <Fv . nanson> at left/facet nodes, nf x nvar
};

Solver::Solver(const Mesh& mesh, const SolverOptions& opt) : mesh_(mesh), opt_(opt) {
  if (opt_.degree < 1) throw ConfigError("solver degree must be at least 1");
  if (mesh_.n_geo > opt_.degree) {
    throw ConfigError("geometry degree exceeds the solution degree");
  }
  const int d = mesh_.dim;
  elems_.resize(mesh_.n_elements());
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    ElemCache& ec = elems_[e];
    ec.ops = &get_operators(mesh_.elements[e].family, opt_.degree);
    ec.geo = compute_element_geometry(mesh_, e, opt_.degree);
    ec.wjj = ec.ops->wj.cwiseProduct(ec.geo.jproj);
    for (const FaceOps& fo : ec.ops->faces) {
      Mat gf(fo.vf.rows(), d);
      for (int r = 0; r < d; ++r) gf.col(r) = fo.vf * ec.geo.g.col(fo.axis * d + r);
      ec.gface.push_back(std::move(gf));
    }
  }

  faces_.resize(mesh_.faces.size());
  for (size_t fid = 0; fid < mesh_.faces.size(); ++fid) {
    const Face& f = mesh_.faces[fid];
    if (f.right < 0) continue;
    if (!f.tri) {
      faces_[fid].perm = *orientation_match(mesh_, static_cast<int>(fid), opt_.degree);
      continue;
    }
    // triangular facet: project both traces onto the shared facet quadrature
    TriCoupling tc;
    const auto rule = triangle_rule(opt_.degree);
    const int nt = static_cast<int>(rule.weights.size());
    tc.wt = rule.weights;
    const int m2 = (opt_.degree + 1) * (opt_.degree + 2) / 2;
    Mat psi_t(nt, m2);
    for (int t = 0; t < nt; ++t) {
      psi_t.row(t) =
          tria_basis_eval(opt_.degree, rule.points(0, t), rule.points(1, t)).transpose();
    }
    auto side_projection = [&](int e, int lf) {
      const Element& el = mesh_.elements[e];
      const auto& corners = family_faces(el.family)[lf].corners;
      // canonical corner frame shared by both sides
      std::vector<int> order = {0, 1, 2};
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return mesh_.canonical[el.vertices[corners[a]]] <
               mesh_.canonical[el.vertices[corners[b]]];
      });
      Mat3 cref;  // reference positions of the ordered corners
      const Mat verts = family_vertices(el.family);
      for (int c = 0; c < 3; ++c) cref.col(c) = verts.col(corners[order[c]]).head(3);
      const auto fq = face_quad_points(el.family, lf, opt_.degree + 1);
      const int nf = static_cast<int>(fq.w.size());
      Mat psi_f(nf, m2);
      Vec wmeas(nf);
      Eigen::Matrix<Real, 3, 2> edges;
      edges.col(0) = cref.col(1) - cref.col(0);
      edges.col(1) = cref.col(2) - cref.col(0);
      const Mat2 gram2 = edges.transpose() * edges;
      const Mat2 gram2inv = gram2.inverse();
      Vec3 eta = Vec3::Zero();
      for (int b = 0; b < nf; ++b) {
        Vec3 xi = Vec3::Zero();
        for (int p = 0; p < 3; ++p) xi[p] = fq.xi(p, b);
        const Vec2 lam12 = gram2inv * (edges.transpose() * (xi - cref.col(0)));
        const Real r = 2 * lam12[0] - 1;
        const Real s = 2 * lam12[1] - 1;
        psi_f.row(b) = tria_basis_eval(opt_.degree, r, s).transpose();
        for (int p = 0; p < 3; ++p) eta[p] = fq.eta(p, b);
        wmeas[b] = fq.w[b] * face_nanson(el.family, lf, eta).norm();
      }
      const Mat gram = psi_f.transpose() * wmeas.asDiagonal() * psi_f;
      return Mat(psi_t * gram.ldlt().solve(psi_f.transpose() * wmeas.asDiagonal()));
    };
    tc.tl = side_projection(f.left, f.left_face);
    tc.tr = side_projection(f.right, f.right_face);
    const auto& lg = elems_[f.left].geo.face[f.left_face];
    // shared facet measure: the cube-measure Nanson divided by the reference
    // face Jacobian is the (polynomial) xi-frame Nanson vector; rescaled by
    // the xi-face area it is identical from both sides
    {
      const Element& le = mesh_.elements[f.left];
      const auto fq = face_quad_points(le.family, f.left_face, opt_.degree + 1);
      Mat nxi = lg.nanson;
      Vec3 eta = Vec3::Zero();
      for (int b = 0; b < nxi.rows(); ++b) {
        for (int p = 0; p < 3; ++p) eta[p] = fq.eta(p, b);
        nxi.row(b) /= face_nanson(le.family, f.left_face, eta).norm();
      }
      const auto& corners = family_faces(le.family)[f.left_face].corners;
      const Mat verts = family_vertices(le.family);
      const Vec3 e1 = verts.col(corners[1]).head(3) - verts.col(corners[0]).head(3);
      const Vec3 e2 = verts.col(corners[2]).head(3) - verts.col(corners[0]).head(3);
      const Real xi_area = 0.5 * e1.cross(e2).norm();
      tc.nanson = (xi_area / 2.0) * (tc.tl * nxi);
    }
    tc.surfj = tc.nanson.rowwise().norm();
    tc.normal = tc.nanson.array().colwise() / tc.surfj.array();
    tc.xt = tc.tl * lg.x;
    faces_[fid].tri = std::move(tc);
  }
}

ModalState Solver::init(const std::function<StateVec(const Vec3&)>& field) const {
  ModalState s;
  s.time = 0.0;
  s.coef.resize(mesh_.n_elements());
  const int nv = n_vars();
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    const ElemCache& ec = elems_[e];
    Mat u(ec.ops->nq, nv);
    Vec3 x = Vec3::Zero();
    for (int q = 0; q < ec.ops->nq; ++q) {
      x.head(mesh_.dim) = ec.geo.xq.row(q).transpose();
      u.row(q) = field(x).head(nv).transpose();
    }
    s.coef[e] = project_to_modal(*ec.ops, ec.geo.jproj, u);
  }
  return s;
}

Mat Solver::nodal(const ModalState& s, int e) const { return elems_[e].ops->V * s.coef[e]; }

void Solver::entropy_projected(const ModalState& s, int e, Mat& ucheck, Mat& vcheck) const {
  const ElemCache& ec = elems_[e];
  const int nv = n_vars();
  const Mat u = ec.ops->V * s.coef[e];
  Mat v(ec.ops->nq, nv);
  for (int q = 0; q < ec.ops->nq; ++q) {
    StateVec uq = StateVec::Zero();
    uq.head(nv) = u.row(q).transpose();
    if (!admissible(mesh_.dim, opt_.gas.gamma, uq)) {
      throw AdmissibilityError("element " + std::to_string(e) + ": inadmissible nodal state");
    }
    v.row(q) = entropy_vars(mesh_.dim, opt_.gas.gamma, uq).head(nv).transpose();
  }
  const Family fam = mesh_.elements[e].family;
  if (fam == Family::Hex || fam == Family::Quad) {
    // collocation: the reference projection is the identity on nodal data
    vcheck = v;
    ucheck = u;
    return;
  }
  // project the deviation from the mean so constant fields pass through at
  // round-off regardless of the state magnitude
  const Eigen::RowVectorXd vbar = v.colwise().mean();
  v.rowwise() -= vbar;
  vcheck = ec.ops->V * (ec.ops->proj * v);
  vcheck.rowwise() += vbar;
  ucheck.resize(ec.ops->nq, nv);
  for (int q = 0; q < ec.ops->nq; ++q) {
    StateVec vq = StateVec::Zero();
    vq.head(nv) = vcheck.row(q).transpose();
    if (!entropy_vars_admissible(mesh_.dim, vq)) {
      throw AdmissibilityError("element " + std::to_string(e) +
                               ": entropy projection left the admissible set");
    }
    ucheck.row(q) = cons_from_entropy(mesh_.dim, opt_.gas.gamma, vq).head(nv).transpose();
  }
}

void Solver::element_states(const ModalState& s, int e, Workspace& w) const {
  const ElemCache& ec = elems_[e];
  const int d = mesh_.dim;
  const int nv = n_vars();
  w.u[e] = ec.ops->V * s.coef[e];
  entropy_projected(s, e, w.ucheck[e], w.vcheck[e]);
  auto& fn = w.fnodes[e];
  fn.resize(ec.ops->nq);
  for (int q = 0; q < ec.ops->nq; ++q) {
    StateVec uq = StateVec::Zero();
    uq.head(nv) = w.ucheck[e].row(q).transpose();
    fn[q] = make_flux_node(d, opt_.gas.gamma, uq);
  }
  const int nfc = static_cast<int>(ec.ops->faces.size());
  w.trace_u[e].resize(nfc);
  w.trace_v[e].resize(nfc);
  w.trace_fb[e].resize(nfc);
  w.trace_fn[e].resize(nfc);
  // extrapolate deviations from the mean: constant fields then trace exactly
  const Eigen::RowVectorXd vmean = w.vcheck[e].colwise().mean();
  const Mat vdev = w.vcheck[e].rowwise() - vmean;
  for (int fc = 0; fc < nfc; ++fc) {
    const FaceOps& fo = ec.ops->faces[fc];
    w.trace_v[e][fc] = face_trace(*ec.ops, fo, vdev).rowwise() + vmean;
    const Mat& vt = w.trace_v[e][fc];
    Mat& ut = w.trace_u[e][fc];
    ut.resize(vt.rows(), nv);
    Mat& fb = w.trace_fb[e][fc];
    fb.resize(vt.rows(), nv);
    auto& tfn = w.trace_fn[e][fc];
    tfn.resize(vt.rows());
    for (int b = 0; b < vt.rows(); ++b) {
      StateVec vb = StateVec::Zero();
      vb.head(nv) = vt.row(b).transpose();
      if (!entropy_vars_admissible(d, vb)) {
        throw AdmissibilityError("element " + std::to_string(e) + " face " + std::to_string(fc) +
                                 ": entropy-projected trace not admissible");
      }
      const StateVec ub = cons_from_entropy(d, opt_.gas.gamma, vb);
      ut.row(b) = ub.head(nv).transpose();
      tfn[b] = make_flux_node(d, opt_.gas.gamma, ub);
      // contravariant flux of the trace state against the extrapolated metric
      StateVec acc = StateVec::Zero();
      for (int r = 0; r < d; ++r) {
        acc += ec.gface[fc](b, r) * euler_flux_t<Real>(d, opt_.gas.gamma, ub, r);
      }
      fb.row(b) = acc.head(nv).transpose();
    }
  }
}

void Solver::volume_terms(int e, Workspace& w, Mat& res) const {
  const ElemCache& ec = elems_[e];
  const DiscreteOperators& ops = *ec.ops;
  const int d = mesh_.dim;
  const int nv = n_vars();
  const int n = ops.n1d;
  static std::map<int, Mat> q1cache;
  static std::mutex q1mtx;
  const Mat* q1;
  {
    std::lock_guard<std::mutex> lock(q1mtx);
    auto it = q1cache.find(n);
    if (it == q1cache.end()) it = q1cache.emplace(n, sbp_core_1d(ops)).first;
    q1 = &it->second;
  }
  const auto& fn = w.fnodes[e];
  StateVec f3[3];
  RowMat scratch = RowMat::Zero(ops.nq, nv);
  // line-wise two-point flux differencing
  for (int dir = 0; dir < d; ++dir) {
    const int stride = ops.stride(dir);
    const int nlines = ops.nq / n;
    const Real* gcol[3] = {nullptr, nullptr, nullptr};
    for (int r = 0; r < d; ++r) gcol[r] = ec.geo.g.col(dir * d + r).data();
    for (int line = 0; line < nlines; ++line) {
      // base index of this line
      const int outer = line / stride;
      const int inner = line % stride;
      const int base = outer * stride * n + inner;
      const Real wperp = ops.w[base] / ops.rule.weights[0];  // transverse weight product
      for (int a = 0; a < n; ++a) {
        const int ia = base + a * stride;
        Real* ra = scratch.data() + ia * nv;
        for (int b = a + 1; b < n; ++b) {
          const int ib = base + b * stride;
          chandrashekar_flux_dirs(d, opt_.gas.gamma, fn[ia], fn[ib], f3);
          if (opt_.threads <= 1) ++flux_evals_;
          Real contrib[kMaxVar] = {0, 0, 0, 0, 0};
          for (int r = 0; r < d; ++r) {
            const Real gavg = 0.5 * (gcol[r][ia] + gcol[r][ib]);
            const Real* fr = f3[r].data();
            for (int c = 0; c < nv; ++c) contrib[c] += gavg * fr[c];
          }
          const Real qab = 2.0 * wperp * (*q1)(a, b);
          Real* rb = scratch.data() + ib * nv;
          for (int c = 0; c < nv; ++c) {
            ra[c] -= qab * contrib[c];
            rb[c] += qab * contrib[c];
          }
        }
      }
    }
  }
  // hybridized corrections at every cube face (collapsed ones included)
  for (size_t fc = 0; fc < ops.faces.size(); ++fc) {
    const FaceOps& fo = ops.faces[fc];
    const int stride = ops.stride(fo.axis);
    const Mat& ut = w.trace_u[e][fc];
    const Mat& fb = w.trace_fb[e][fc];
    const auto& tfn = w.trace_fn[e][fc];
    const Real side = fo.side;
    for (int b = 0; b < ut.rows(); ++b) {
      // volume nodes on the line through this face node
      const int a0 = b % n;
      const int a1 = b / n;
      int idx3[3] = {0, 0, 0};
      idx3[fo.tangent_axes[0]] = a0;
      if (d == 3) idx3[fo.tangent_axes[1]] = a1;
      idx3[fo.axis] = 0;
      const int base = ops.node_index(idx3[0], idx3[1], idx3[2]);
      StateVec fbb = StateVec::Zero();
      fbb.head(nv) = fb.row(b).transpose();
      StateVec csum = fbb;  // F_bb - sum_j l_j F_jb
      StateVec fib[12];
      for (int m = 0; m < n; ++m) {
        const int j = base + m * stride;
        chandrashekar_flux_dirs(d, opt_.gas.gamma, fn[j], tfn[b], f3);
        if (opt_.threads <= 1) ++flux_evals_;
        StateVec fjb = StateVec::Zero();
        for (int r = 0; r < d; ++r) {
          fjb += (0.5 * (ec.geo.g(j, fo.axis * d + r) + ec.gface[fc](b, r))) * f3[r];
        }
        fib[m] = fjb;
        csum -= fo.l_end[m] * fjb;
      }
      const Real sw = side * fo.wf[b];
      for (int m = 0; m < n; ++m) {
        const int i = base + m * stride;
        Real* ri = scratch.data() + i * nv;
        const Real lsw = fo.l_end[m] * sw;
        for (int c = 0; c < nv; ++c) ri[c] -= lsw * (fib[m][c] + csum[c]);
      }
    }
  }
  res += scratch;
}

void Solver::face_flux(size_t fid, Workspace& w) const {
  const Face& f = mesh_.faces[fid];
  const int d = mesh_.dim;
  const int nv = n_vars();
  const FaceCache& fc = faces_[fid];
  const auto& lgeo = elems_[f.left].geo.face[f.left_face];
  const Mat& utl = w.trace_u[f.left][f.left_face];

  if (f.right < 0) {
    // boundary face with an exact ghost state
    if (f.tag != "exact" || !opt_.boundary_state) {
      throw MeshError("face " + std::to_string(fid) + ": unsupported boundary tag '" + f.tag +
                      "'");
    }
    Mat& fs = w.fstar[fid];
    fs.resize(utl.rows(), nv);
    Vec3 x = Vec3::Zero(), nrm = Vec3::Zero();
    for (int b = 0; b < utl.rows(); ++b) {
      x.head(d) = lgeo.x.row(b).transpose();
      nrm.head(d) = lgeo.normal.row(b).transpose();
      StateVec ul = StateVec::Zero();
      ul.head(nv) = utl.row(b).transpose();
      const StateVec ug = opt_.boundary_state(x, w.time);
      const StateVec fl =
          es_interface_flux(d, opt_.gas.gamma, ul, ug, nrm, opt_.interface);
      fs.row(b) = (lgeo.surfj[b] * fl.head(nv)).transpose();
    }
    return;
  }

  const Mat& utr = w.trace_u[f.right][f.right_face];
  if (!f.tri) {
    const auto& fnl = w.trace_fn[f.left][f.left_face];
    const auto& fnr = w.trace_fn[f.right][f.right_face];
    Mat& fs = w.fstar[fid];
    fs.resize(utl.rows(), nv);
    Vec3 nrm = Vec3::Zero();
    for (int b = 0; b < utl.rows(); ++b) {
      const int rb = fc.perm[b];
      nrm.head(d) = lgeo.normal.row(b).transpose();
      StateVec ul = StateVec::Zero(), ur = StateVec::Zero();
      ul.head(nv) = utl.row(b).transpose();
      ur.head(nv) = utr.row(rb).transpose();
      const StateVec fl = es_interface_flux_nodes(d, opt_.gas.gamma, fnl[b], fnr[rb], ul, ur,
                                                  nrm, opt_.interface);
      fs.row(b) = (lgeo.surfj[b] * fl.head(nv)).transpose();
    }
    return;
  }

  // triangular facet: evaluate on the shared quadrature after projecting the
  // entropy-variable traces of both sides
  const TriCoupling& tc = fc.tri;
  const Mat vtl = tc.tl * w.trace_v[f.left][f.left_face];
  const Mat vtr = tc.tr * w.trace_v[f.right][f.right_face];
  Mat& fs = w.fstar[fid];
  const int nt = static_cast<int>(tc.wt.size());
  fs.resize(nt, nv);
  std::vector<FluxNode> fnl(nt), fnr(nt);
  Vec3 nrm = Vec3::Zero();
  for (int t = 0; t < nt; ++t) {
    StateVec vl = StateVec::Zero(), vr = StateVec::Zero();
    vl.head(nv) = vtl.row(t).transpose();
    vr.head(nv) = vtr.row(t).transpose();
    if (!entropy_vars_admissible(d, vl) || !entropy_vars_admissible(d, vr)) {
      throw AdmissibilityError("tri facet " + std::to_string(fid) +
                               ": projected trace not admissible");
    }
    const StateVec ul = cons_from_entropy(d, opt_.gas.gamma, vl);
    const StateVec ur = cons_from_entropy(d, opt_.gas.gamma, vr);
    fnl[t] = make_flux_node(d, opt_.gas.gamma, ul);
    fnr[t] = make_flux_node(d, opt_.gas.gamma, ur);
    nrm.head(d) = tc.normal.row(t).transpose();
    const StateVec fl =
        es_interface_flux_nodes(d, opt_.gas.gamma, fnl[t], fnr[t], ul, ur, nrm, opt_.interface);
    fs.row(t) = (tc.surfj[t] * fl.head(nv)).transpose();
  }

  // transfer correction: the entropy potential of the projected trace is not
  // a polynomial, so its collocation-face and facet quadratures differ; a
  // two-point flux against the face-mean state restores the balance exactly
  // without touching conservation or constant states
  auto side_correction = [&](int e, int lf, const Mat& tmap, Real orient,
                             const std::vector<FluxNode>& fnm) {
    const auto& ops = *elems_[e].ops;
    const FaceOps& fo = ops.faces[lf];
    const Mat& gf = elems_[e].gface[lf];
    const Mat& vtb = w.trace_v[e][lf];
    const auto& tfnb = w.trace_fn[e][lf];
    const int nf = static_cast<int>(fo.wf.size());
    StateVec vbar = StateVec::Zero();
    const Real wsum = fo.wf.sum();
    for (int b = 0; b < nf; ++b) vbar.head(nv) += fo.wf[b] * vtb.row(b).transpose();
    vbar /= wsum;
    const StateVec u0 = cons_from_entropy(d, opt_.gas.gamma, vbar);
    const FluxNode fn0 = make_flux_node(d, opt_.gas.gamma, u0);
    StateVec f3[3];
    Mat gvec_b(nf, nv);
    for (int b = 0; b < nf; ++b) {
      chandrashekar_flux_dirs(d, opt_.gas.gamma, tfnb[b], fn0, f3);
      StateVec acc = StateVec::Zero();
      for (int r = 0; r < d; ++r) acc += (Real(fo.side) * gf(b, r)) * f3[r];
      gvec_b.row(b) = acc.head(nv).transpose();
    }
    Mat gvec_t(nt, nv);
    for (int t = 0; t < nt; ++t) {
      chandrashekar_flux_dirs(d, opt_.gas.gamma, fnm[t], fn0, f3);
      StateVec acc = StateVec::Zero();
      for (int r = 0; r < d; ++r) acc += (orient * tc.nanson(t, r)) * f3[r];
      gvec_t.row(t) = acc.head(nv).transpose();
    }
    const Eigen::RowVectorXd defect =
        fo.wf.transpose() * gvec_b - tc.wt.transpose() * gvec_t;
    Mat corr = fo.wf.asDiagonal() * gvec_b - tmap.transpose() * (tc.wt.asDiagonal() * gvec_t);
    corr.noalias() -= (fo.wf / wsum) * defect;
    return corr;
  };
  w.facet_corr_l[fid] = side_correction(f.left, f.left_face, tc.tl, 1.0, fnl);
  w.facet_corr_r[fid] = side_correction(f.right, f.right_face, tc.tr, -1.0, fnr);
}

void Solver::lifting(Workspace& w) const {
  const int d = mesh_.dim;
  const int nv = n_vars();
  const int np = d + 1;  // velocity components and temperature
  const Real rgas = opt_.gas.cp * (opt_.gas.gamma - 1) / opt_.gas.gamma;

  // velocities and temperature are rational in the entropy variables, so
  // evaluating them from the projected v avoids the exp/log round-trip noise
  auto prim_of_v = [&](const auto& vrow) {
    Vec p(np);
    for (int c = 0; c < d; ++c) p[c] = vrow[1 + c] / (-vrow[d + 1]);
    p[d] = -1.0 / (rgas * vrow[d + 1]);
    return p;
  };

  // face-average primitive values, stored at left/facet nodes per face
  std::vector<Mat> pavg(mesh_.faces.size());
  parallel_for(static_cast<int>(mesh_.faces.size()), opt_.threads, [&](int fid) {
    const Face& f = mesh_.faces[fid];
    const FaceCache& fc = faces_[fid];
    const Mat& vtlq = w.trace_v[f.left][f.left_face];
    if (f.right < 0) {
      const auto& lgeo = elems_[f.left].geo.face[f.left_face];
      Mat& pa = pavg[fid];
      pa.resize(vtlq.rows(), np);
      Vec3 x = Vec3::Zero();
      for (int b = 0; b < vtlq.rows(); ++b) {
        x.head(d) = lgeo.x.row(b).transpose();
        const StateVec ug = opt_.boundary_state(x, w.time);
        const StateVec vg = entropy_vars(d, opt_.gas.gamma, ug);
        pa.row(b) = (0.5 * (prim_of_v(vtlq.row(b)) + prim_of_v(vg))).transpose();
      }
      return;
    }
    if (!f.tri) {
      const Mat& vtrq = w.trace_v[f.right][f.right_face];
      Mat& pa = pavg[fid];
      pa.resize(vtlq.rows(), np);
      for (int b = 0; b < vtlq.rows(); ++b) {
        pa.row(b) =
            (0.5 * (prim_of_v(vtlq.row(b)) + prim_of_v(vtrq.row(fc.perm[b])))).transpose();
      }
      return;
    }
    const TriCoupling& tc = fc.tri;
    const Mat vtl = tc.tl * w.trace_v[f.left][f.left_face];
    const Mat vtr = tc.tr * w.trace_v[f.right][f.right_face];
    Mat& pa = pavg[fid];
    const int nt = static_cast<int>(tc.wt.size());
    pa.resize(nt, np);
    for (int t = 0; t < nt; ++t) {
      pa.row(t) = (0.5 * (prim_of_v(vtl.row(t)) + prim_of_v(vtr.row(t)))).transpose();
    }
  });

  // BR1 gradients: weak divergence with central interface values; the
  // element-mean primitive is subtracted first so constant fields lift to
  // exactly zero regardless of the mass scaling
  parallel_for(mesh_.n_elements(), opt_.threads, [&](int e) {
    const ElemCache& ec = elems_[e];
    const DiscreteOperators& ops = *ec.ops;
    Mat prim(ops.nq, np);
    for (int q = 0; q < ops.nq; ++q) {
      prim.row(q) = prim_of_v(w.vcheck[e].row(q)).transpose();
    }
    const Eigen::RowVectorXd pmean = prim.colwise().mean();
    prim.rowwise() -= pmean;
    Mat rg = Mat::Zero(ops.nq, d * np);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < np; ++c) {
        Vec acc = Vec::Zero(ops.nq);
        for (int q = 0; q < d; ++q) {
          const Vec fld = ops.w.cwiseProduct(ec.geo.g.col(q * d + r)).cwiseProduct(prim.col(c));
          acc -= apply_diff_axis_t(ops, fld, q);
        }
        rg.col(r * np + c) = acc;
      }
    }
    for (int fc = 0; fc < family_n_faces(mesh_.elements[e].family); ++fc) {
      const int fid = mesh_.elem_face[e][fc];
      const Face& f = mesh_.faces[fid];
      const bool left = (f.left == e && f.left_face == fc);
      const FaceOps& fo = ops.faces[fc];
      const Mat& pa = pavg[fid];
      if (!f.tri) {
        const auto& lgeo = elems_[f.left].geo.face[f.left_face];
        // scatter with the master-side Nanson vector for exact two-sided
        // consistency; for the right element the outward direction flips
        for (int bL = 0; bL < fo.wf.size(); ++bL) {
          const int b = left ? bL : faces_[fid].perm[bL];  // own-side node
          const Real sgn = left ? 1.0 : -1.0;
          const Real wq = fo.wf[b];
          for (int r = 0; r < d; ++r) {
            const Real nr = sgn * lgeo.nanson(bL, r);
            for (int c = 0; c < np; ++c) {
              const Real val = wq * nr * (pa(bL, c) - pmean[c]);
              // accumulate into all line nodes through face node b
              const int a0 = b % ops.n1d;
              const int a1 = b / ops.n1d;
              int idx3[3] = {0, 0, 0};
              idx3[fo.tangent_axes[0]] = a0;
              if (d == 3) idx3[fo.tangent_axes[1]] = a1;
              idx3[fo.axis] = 0;
              const int base = ops.node_index(idx3[0], idx3[1], idx3[2]);
              for (int m = 0; m < ops.n1d; ++m) {
                rg(base + m * ops.stride(fo.axis), r * np + c) += fo.l_end[m] * val;
              }
            }
          }
        }
      } else {
        const TriCoupling& tc = faces_[fid].tri;
        const Mat& tmap = left ? tc.tl : tc.tr;
        const Real sgn = left ? 1.0 : -1.0;
        // E contribution = Vf^T T^T diag(wt) (nanson_r * pavg_c)
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < np; ++c) {
            const Vec vals = tmap.transpose() *
                             tc.wt.cwiseProduct(tc.nanson.col(r))
                                 .cwiseProduct(pa.col(c).array().operator-(pmean[c]).matrix()) *
                             sgn;
            for (int b = 0; b < vals.size(); ++b) {
              const int a0 = b % ops.n1d;
              const int a1 = b / ops.n1d;
              int idx3[3] = {0, 0, 0};
              idx3[fo.tangent_axes[0]] = a0;
              if (d == 3) idx3[fo.tangent_axes[1]] = a1;
              idx3[fo.axis] = 0;
              const int base = ops.node_index(idx3[0], idx3[1], idx3[2]);
              for (int m = 0; m < ops.n1d; ++m) {
                rg(base + m * ops.stride(fo.axis), r * np + c) += fo.l_end[m] * vals[b];
              }
            }
          }
        }
      }
    }
    // weight-adjusted solve to modal gradients, back to nodes
    const Mat gm = apply_weight_adjusted_inverse(ops, ec.geo.jproj_inv, rg);
    w.grads[e] = ops.V * gm;
    // viscous flux fields at the nodes
    Mat& fv = w.fv[e];
    fv.resize(ops.nq, d * nv);
    Mat gp(d, np);
    Mat fvq;
    for (int q = 0; q < ops.nq; ++q) {
      StateVec uq = StateVec::Zero();
      uq.head(nv) = w.ucheck[e].row(q).transpose();
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < np; ++c) gp(r, c) = w.grads[e](q, r * np + c);
      }
      viscous_flux(d, opt_.gas, uq, gp, fvq);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < nv; ++c) fv(q, r * nv + c) = fvq(r, c);
      }
    }
  });

  // face-average viscous normal flux, at left/facet nodes
  parallel_for(static_cast<int>(mesh_.faces.size()), opt_.threads, [&](int fid) {
    const Face& f = mesh_.faces[fid];
    const FaceCache& fc = faces_[fid];
    const auto& lops = *elems_[f.left].ops;
    const auto& lgeo = elems_[f.left].geo.face[f.left_face];
    const Mat fvl = face_trace(lops, lops.faces[f.left_face], w.fv[f.left]);
    Mat& vf = w.visc_face[fid];
    if (f.right < 0) {
      // one-sided viscous flux at an exact boundary
      vf.resize(fvl.rows(), nv);
      for (int b = 0; b < fvl.rows(); ++b) {
        for (int c = 0; c < nv; ++c) {
          Real acc = 0.0;
          for (int r = 0; r < d; ++r) acc += lgeo.nanson(b, r) * fvl(b, r * nv + c);
          vf(b, c) = acc;
        }
      }
      return;
    }
    const auto& rops = *elems_[f.right].ops;
    const Mat fvr = face_trace(rops, rops.faces[f.right_face], w.fv[f.right]);
    if (!f.tri) {
      vf.resize(fvl.rows(), nv);
      for (int b = 0; b < fvl.rows(); ++b) {
        const int rb = fc.perm[b];
        for (int c = 0; c < nv; ++c) {
          Real acc = 0.0;
          for (int r = 0; r < d; ++r) {
            acc += lgeo.nanson(b, r) * 0.5 * (fvl(b, r * nv + c) + fvr(rb, r * nv + c));
          }
          vf(b, c) = acc;
        }
      }
      return;
    }
    const TriCoupling& tc = fc.tri;
    const Mat fl = tc.tl * fvl;
    const Mat fr = tc.tr * fvr;
    const int nt = static_cast<int>(tc.wt.size());
    vf.resize(nt, nv);
    for (int t = 0; t < nt; ++t) {
      for (int c = 0; c < nv; ++c) {
        Real acc = 0.0;
        for (int r = 0; r < d; ++r) {
          acc += tc.nanson(t, r) * 0.5 * (fl(t, r * nv + c) + fr(t, r * nv + c));
        }
        vf(t, c) = acc;
      }
    }
  });
}

Mat Solver::volume_residual(const ModalState& s, int e) const {
  Workspace w;
  const int ne = mesh_.n_elements();
  w.time = s.time;
  w.u.resize(ne);
  w.vcheck.resize(ne);
  w.ucheck.resize(ne);
  w.fnodes.resize(ne);
  w.trace_u.resize(ne);
  w.trace_v.resize(ne);
  w.trace_fb.resize(ne);
  w.trace_fn.resize(ne);
  element_states(s, e, w);
  Mat r = Mat::Zero(elems_[e].ops->nq, n_vars());
  volume_terms(e, w, r);
  return r;
}

std::vector<Mat> Solver::lift_gradients(const ModalState& s) const {
  Workspace w;
  const int ne = mesh_.n_elements();
  w.time = s.time;
  w.u.resize(ne);
  w.vcheck.resize(ne);
  w.ucheck.resize(ne);
  w.fnodes.resize(ne);
  w.trace_u.resize(ne);
  w.trace_v.resize(ne);
  w.trace_fb.resize(ne);
  w.trace_fn.resize(ne);
  w.grads.resize(ne);
  w.fv.resize(ne);
  w.visc_face.resize(mesh_.faces.size());
  parallel_for(ne, opt_.threads, [&](int e) { element_states(s, e, w); });
  lifting(w);
  return w.grads;
}

Real Solver::tri_facet_conservation_error(const ModalState& s) const {
  Workspace w;
  const int ne = mesh_.n_elements();
  w.time = s.time;
  w.u.resize(ne);
  w.vcheck.resize(ne);
  w.ucheck.resize(ne);
  w.fnodes.resize(ne);
  w.trace_u.resize(ne);
  w.trace_v.resize(ne);
  w.trace_fb.resize(ne);
  w.trace_fn.resize(ne);
  w.fstar.resize(mesh_.faces.size());
  w.facet_corr_l.resize(mesh_.faces.size());
  w.facet_corr_r.resize(mesh_.faces.size());
  parallel_for(ne, opt_.threads, [&](int e) { element_states(s, e, w); });
  Real worst = 0.0;
  for (size_t fid = 0; fid < mesh_.faces.size(); ++fid) {
    if (!mesh_.faces[fid].tri) continue;
    face_flux(fid, w);
    const TriCoupling& tc = faces_[fid].tri;
    const Mat& fs = w.fstar[fid];
    for (int c = 0; c < n_vars(); ++c) {
      const Vec wphi = tc.wt.cwiseProduct(fs.col(c));
      const Real left = (tc.tl * Vec::Ones(tc.tl.cols())).dot(wphi);
      const Real right = (tc.tr * Vec::Ones(tc.tr.cols())).dot(wphi);
      worst = std::max(worst, std::abs(left - right) / (1.0 + std::abs(left)));
    }
  }
  return worst;
}

void Solver::weighted_residual(const ModalState& s, std::vector<Mat>& res) const {
  const int d = mesh_.dim;
  const int nv = n_vars();
  static thread_local Workspace ws;
  Workspace& w = ws;
  w.time = s.time;
  const int ne = mesh_.n_elements();
  w.u.resize(ne);
  w.vcheck.resize(ne);
  w.ucheck.resize(ne);
  w.fnodes.resize(ne);
  w.trace_u.resize(ne);
  w.trace_v.resize(ne);
  w.trace_fb.resize(ne);
  w.trace_fn.resize(ne);
  w.fstar.resize(mesh_.faces.size());
  w.facet_corr_l.resize(mesh_.faces.size());
  w.facet_corr_r.resize(mesh_.faces.size());
  if (opt_.mode == EquationMode::NavierStokes) {
    w.grads.resize(ne);
    w.fv.resize(ne);
    w.visc_face.resize(mesh_.faces.size());
  }

  parallel_for(ne, opt_.threads, [&](int e) { element_states(s, e, w); });
  parallel_for(static_cast<int>(mesh_.faces.size()), opt_.threads,
               [&](int fid) { face_flux(static_cast<size_t>(fid), w); });
  if (opt_.mode == EquationMode::NavierStokes) lifting(w);

  res.resize(ne);
  parallel_for(ne, opt_.threads, [&](int e) {
    const ElemCache& ec = elems_[e];
    const DiscreteOperators& ops = *ec.ops;
    Mat& r = res[e];
    r.setZero(ops.nq, nv);
    volume_terms(e, w, r);

    // interface terms: Nanson-weighted numerical flux against the own
    // contravariant trace flux
    for (int fc = 0; fc < family_n_faces(mesh_.elements[e].family); ++fc) {
      const int fid = mesh_.elem_face[e][fc];
      const Face& f = mesh_.faces[fid];
      const bool left = (f.left == e && f.left_face == fc);
      const FaceOps& fo = ops.faces[fc];
      const Mat& fb = w.trace_fb[e][fc];
      const int stride = ops.stride(fo.axis);
      Mat eface;  // numerical flux part at own face nodes
      if (!f.tri) {
        const Mat& fs = w.fstar[fid];
        eface.resize(fo.wf.size(), nv);
        for (int bL = 0; bL < fo.wf.size(); ++bL) {
          if (left) {
            eface.row(bL) = fs.row(bL);
          } else {
            eface.row(faces_[fid].perm[bL]) = -fs.row(bL);
          }
        }
        for (int b = 0; b < fo.wf.size(); ++b) eface.row(b) *= fo.wf[b];
      } else {
        const TriCoupling& tc = faces_[fid].tri;
        const Mat& tmap = left ? tc.tl : tc.tr;
        const Real sgn = left ? 1.0 : -1.0;
        eface = sgn * (tmap.transpose() * tc.wt.asDiagonal() * w.fstar[fid]);
        eface += left ? w.facet_corr_l[fid] : w.facet_corr_r[fid];
      }
      if (opt_.mode == EquationMode::NavierStokes) {
        const Mat& vf = w.visc_face[fid];
        if (!f.tri) {
          for (int bL = 0; bL < fo.wf.size(); ++bL) {
            const int b = left ? bL : faces_[fid].perm[bL];
            const Real sgn = left ? 1.0 : -1.0;
            eface.row(b) -= sgn * fo.wf[b] * vf.row(bL);
          }
        } else {
          const TriCoupling& tc = faces_[fid].tri;
          const Mat& tmap = left ? tc.tl : tc.tr;
          const Real sgn = left ? 1.0 : -1.0;
          eface -= sgn * (tmap.transpose() * tc.wt.asDiagonal() * vf);
        }
      }
      // own contravariant flux of the projected trace
      for (int b = 0; b < fo.wf.size(); ++b) {
        eface.row(b) -= (Real(fo.side) * fo.wf[b]) * fb.row(b);
      }
      // scatter V_f^T
      for (int b = 0; b < fo.wf.size(); ++b) {
        const int a0 = b % ops.n1d;
        const int a1 = b / ops.n1d;
        int idx3[3] = {0, 0, 0};
        idx3[fo.tangent_axes[0]] = a0;
        if (d == 3) idx3[fo.tangent_axes[1]] = a1;
        idx3[fo.axis] = 0;
        const int base = ops.node_index(idx3[0], idx3[1], idx3[2]);
        for (int m = 0; m < ops.n1d; ++m) {
          r.row(base + m * stride) -= fo.l_end[m] * eface.row(b);
        }
      }
    }

    // viscous volume part: + sum_q D_q^T W (G f_v)
    if (opt_.mode == EquationMode::NavierStokes) {
      for (int c = 0; c < nv; ++c) {
        for (int q = 0; q < d; ++q) {
          Vec fld = Vec::Zero(ops.nq);
          for (int rr = 0; rr < d; ++rr) {
            fld += ec.geo.g.col(q * d + rr).cwiseProduct(w.fv[e].col(rr * nv + c));
          }
          r.col(c) -= apply_diff_axis_t(ops, ops.w.cwiseProduct(fld), q);
        }
      }
    }

    if (opt_.source) {
      Vec3 x = Vec3::Zero();
      for (int q = 0; q < ops.nq; ++q) {
        x.head(d) = ec.geo.xq.row(q).transpose();
        r.row(q) += ec.wjj[q] * opt_.source(x, w.time).head(nv).transpose();
      }
    }
  });
}

void Solver::rhs(const ModalState& s, std::vector<Mat>& dudt) const {
  std::vector<Mat> res;
  weighted_residual(s, res);
  dudt.resize(res.size());
  parallel_for(mesh_.n_elements(), opt_.threads, [&](int e) {
    dudt[e] = apply_weight_adjusted_inverse(*elems_[e].ops, elems_[e].geo.jproj_inv, res[e]);
  });
}

Real Solver::stable_dt(const ModalState& s) const {
  const int d = mesh_.dim;
  const int nv = n_vars();
  Real dt = std::numeric_limits<Real>::max();
  const Real two_n_plus_one = 2.0 * opt_.degree + 1.0;
  // quadrature-averaged metric ratios per element: the modal time stepping is
  // free of the collapsed-corner penalty, so node-wise ratios would be wildly
  // pessimistic on tets and pyramids
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    const ElemCache& ec = elems_[e];
    const Mat u = ec.ops->V * s.coef[e];
    Real vol = 0.0, den = 0.0, den_v = 0.0;
    for (int q = 0; q < ec.ops->nq; ++q) {
      StateVec uq = StateVec::Zero();
      uq.head(nv) = u.row(q).transpose();
      require_admissible(d, opt_.gas.gamma, uq, "stable_dt");
      const Real c = sound_speed(d, opt_.gas.gamma, uq);
      const Real jj = ec.ops->vol.jhat[q] * ec.geo.jproj[q];
      Real speed = 0.0;
      Real gnorm2 = 0.0;
      for (int dir = 0; dir < d; ++dir) {
        Real un = 0.0, nn = 0.0;
        for (int r = 0; r < d; ++r) {
          const Real grc = ec.geo.g(q, dir * d + r);
          un += grc * uq[1 + r] / uq[0];
          nn += grc * grc;
        }
        speed += std::abs(un) + c * std::sqrt(nn);
        gnorm2 += nn;
      }
      const Real w = ec.ops->w[q];
      vol += w * jj;
      den += w * speed;
      if (opt_.mode == EquationMode::NavierStokes && opt_.gas.mu > 0) {
        const Real nu = std::max(4.0 / 3.0, opt_.gas.gamma / opt_.gas.prandtl) * opt_.gas.mu /
                        uq[0];
        den_v += w * nu * gnorm2 / jj;
      }
    }
    dt = std::min(dt, vol / (den * two_n_plus_one));
    if (den_v > 0) {
      dt = std::min(dt, vol / (den_v * two_n_plus_one * two_n_plus_one));
    }
  }
  return opt_.cfl * dt;
}

void Solver::advance(ModalState& s, Real t_end, Real fixed_dt,
                     const std::function<void(const ModalState&)>& monitor,
                     Real monitor_interval) const {
  // Carpenter-Kennedy five-stage fourth-order low-storage coefficients
  static const Real ark[5] = {0.0, -567301805773.0 / 1357537059087.0,
                              -2404267990393.0 / 2016746695238.0,
                              -3550918686646.0 / 2091501179385.0,
                              -1275806237668.0 / 842570457699.0};
  static const Real brk[5] = {1432997174477.0 / 9575080441755.0,
                              5161836677717.0 / 13612068292357.0,
                              1720146321549.0 / 2090206949498.0,
                              3134564353537.0 / 4481467310338.0,
                              2277821191437.0 / 14882151754819.0};
  static const Real crk[5] = {0.0, 1432997174477.0 / 9575080441755.0,
                              2526269341429.0 / 6820363962896.0,
                              2006345519317.0 / 3224310063776.0,
                              2802321613138.0 / 2924317926251.0};

  std::vector<Mat> k(mesh_.n_elements());
  std::vector<Mat> dudt;
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    k[e] = Mat::Zero(s.coef[e].rows(), s.coef[e].cols());
  }
  if (monitor) monitor(s);
  Real next_monitor = (monitor_interval > 0) ? s.time + monitor_interval : t_end + 1.0;
  long step = 0;
  Real dt_cfl = 0.0;
  while (s.time < t_end - 1e-14 * std::max(1.0, t_end)) {
    if (fixed_dt <= 0 && step % 25 == 0) dt_cfl = stable_dt(s);
    ++step;
    Real dt = (fixed_dt > 0) ? fixed_dt : dt_cfl;
    bool hit_monitor = false;
    if (s.time + dt >= t_end) {
      dt = t_end - s.time;
    } else if (s.time + dt >= next_monitor) {
      dt = next_monitor - s.time;
      hit_monitor = true;
    }
    const Real tstage = s.time;
    ModalState stage = s;
    for (int rk = 0; rk < 5; ++rk) {
      stage.time = tstage + crk[rk] * dt;
      rhs(stage, dudt);
      parallel_for(mesh_.n_elements(), opt_.threads, [&](int e) {
        k[e] = ark[rk] * k[e] + dt * dudt[e];
        stage.coef[e] += brk[rk] * k[e];
      });
    }
    s.coef = std::move(stage.coef);
    s.time = tstage + dt;
    if (monitor && (hit_monitor || s.time >= t_end - 1e-14)) {
      monitor(s);
      if (hit_monitor) next_monitor += monitor_interval;
    }
  }
}

void Solver::write_checkpoint(const ModalState& s, const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_checkpoint: cannot open " + path);
  const char magic[4] = {'P', 'D', 'G', 'C'};
  out.write(magic, 4);
  auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_u32(1);  // version
  put_u32(static_cast<uint32_t>(mesh_.dim));
  put_u32(static_cast<uint32_t>(n_vars()));
  put_u32(static_cast<uint32_t>(opt_.degree));
  put_u64(static_cast<uint64_t>(mesh_.n_elements()));
  out.write(reinterpret_cast<const char*>(&s.time), 8);
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    const uint8_t fam = static_cast<uint8_t>(mesh_.elements[e].family);
    out.write(reinterpret_cast<const char*>(&fam), 1);
    put_u32(static_cast<uint32_t>(s.coef[e].rows()));
    out.write(reinterpret_cast<const char*>(s.coef[e].data()),
              static_cast<std::streamsize>(sizeof(Real) * s.coef[e].size()));
  }
  if (!out) throw IoError("write_checkpoint: write failed for " + path);
}

ModalState Solver::read_checkpoint(const std::string& path) const {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::strncmp(magic, "PDGC", 4) != 0) throw IoError("read_checkpoint: bad magic");
  auto get_u32 = [&]() {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto get_u64 = [&]() {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (get_u32() != 1) throw IoError("read_checkpoint: unsupported version");
  if (static_cast<int>(get_u32()) != mesh_.dim || static_cast<int>(get_u32()) != n_vars() ||
      static_cast<int>(get_u32()) != opt_.degree ||
      static_cast<long>(get_u64()) != mesh_.n_elements()) {
    throw IoError("read_checkpoint: layout mismatch with the current discretization");
  }
  ModalState s;
  in.read(reinterpret_cast<char*>(&s.time), 8);
  s.coef.resize(mesh_.n_elements());
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    uint8_t fam = 0;
    in.read(reinterpret_cast<char*>(&fam), 1);
    if (static_cast<Family>(fam) != mesh_.elements[e].family) {
      throw IoError("read_checkpoint: element family mismatch");
    }
    const uint32_t rows = get_u32();
    s.coef[e].resize(rows, n_vars());
    in.read(reinterpret_cast<char*>(s.coef[e].data()),
            static_cast<std::streamsize>(sizeof(Real) * s.coef[e].size()));
  }
  if (!in) throw IoError("read_checkpoint: truncated file " + path);
  return s;
}

StateVec manufactured_state(int dim, Real gamma, const Vec3& x, Real t) {
  Real sumx = 0.0;
  for (int p = 0; p < dim; ++p) sumx += x[p];
  const Real rho = 2.0 + 0.1 * std::sin(2 * M_PI * (sumx - 0.3 * t));
  StateVec u = StateVec::Zero();
  u[0] = rho;
  for (int p = 0; p < dim; ++p) u[1 + p] = rho;  // unit velocity in every direction
  u[dim + 1] = rho * rho;
  (void)gamma;
  return u;
}

StateVec manufactured_source(int dim, Real gamma, const Vec3& x, Real t) {
  Real sumx = 0.0;
  for (int p = 0; p < dim; ++p) sumx += x[p];
  const Real c = 0.1 * 2 * M_PI * std::cos(2 * M_PI * (sumx - 0.3 * t));
  const Real rho = 2.0 + 0.1 * std::sin(2 * M_PI * (sumx - 0.3 * t));
  const Real dprho = (gamma - 1) * (2 * rho - 0.5 * dim);  // dp/drho along the wave
  StateVec src = StateVec::Zero();
  src[0] = c * (dim - 0.3);
  for (int p = 0; p < dim; ++p) src[1 + p] = c * ((dim - 0.3) + dprho);
  src[dim + 1] = c * (2 * rho * (dim - 0.3) + dim * dprho);
  return src;
}

}  // namespace polydg
