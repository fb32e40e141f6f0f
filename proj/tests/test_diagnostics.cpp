#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "polydg/cases.hpp"

using namespace polydg;

namespace {

constexpr Real kGamma = 1.4;

RunConfig base_config(int dim, int counts, SplitKind split) {
  RunConfig cfg;
  cfg.dim = dim;
  cfg.counts = counts;
  cfg.split = split;
  cfg.degree = 3;
  cfg.n_geo = 1;
  return cfg;
}

Solver make_solver(const RunConfig& cfg, InterfaceDissipation kind) {
  GenOptions o;
  o.dim = cfg.dim;
  o.counts = cfg.counts;
  o.split = cfg.split;
  o.epsilon = cfg.epsilon;
  o.length = cfg.length;
  o.n_geo = cfg.n_geo;
  static std::vector<Mesh> keep;  // meshes must outlive the solvers
  keep.push_back(gen_box_mesh(o));
  SolverOptions so;
  so.degree = cfg.degree;
  so.interface = kind;
  so.gas = cfg.gas;
  return Solver(keep.back(), so);
}

}  // namespace

TEST_CASE("integral entropy: zero for the reference state, scales with the domain") {
  RunConfig cfg = base_config(3, 3, SplitKind::Prism);
  Solver sol = make_solver(cfg, InterfaceDissipation::None);
  StateVec uref = StateVec::Zero();
  uref[0] = 1.0;
  uref[2] = 0.4;  // arbitrary velocity does not change S
  uref[4] = 1.0 / (kGamma - 1) + 0.5 * 0.16;
  ModalState s = sol.init([&](const Vec3&) { return uref; });
  CHECK(std::abs(integral_entropy(sol, s)) < 1e-12);

  StateVec u2 = StateVec::Zero();
  u2[0] = 2.0;
  u2[4] = 3.0 / (kGamma - 1);
  const Real s_density = -2.0 * std::log(3.0 * std::pow(2.0, -kGamma)) / (kGamma - 1);
  ModalState s2 = sol.init([&](const Vec3&) { return u2; });
  CHECK(integral_entropy(sol, s2) == doctest::Approx(s_density).epsilon(1e-11));

  RunConfig big = cfg;
  big.length = 2.0;
  Solver solbig = make_solver(big, InterfaceDissipation::None);
  ModalState sbig = solbig.init([&](const Vec3&) { return u2; });
  CHECK(integral_entropy(solbig, sbig) == doctest::Approx(8.0 * s_density).epsilon(1e-11));
}

TEST_CASE("tgv initial entropy matches an over-quadrature reference") {
  RunConfig cfg = base_config(3, 4, SplitKind::Mix);
  cfg.degree = 4;
  cfg.length = 2 * M_PI;
  Solver sol = make_solver(cfg, InterfaceDissipation::None);
  TgvSetup tgv;
  ModalState s = sol.init([&](const Vec3& x) { return tgv_state(tgv, kGamma, x); });
  const Real discrete = integral_entropy(sol, s);

  // refined-quadrature oracle on the exact field
  Real reference = 0.0;
  const Mesh& m = sol.mesh();
  for (int e = 0; e < m.n_elements(); ++e) {
    const Element& el = m.elements[e];
    const auto q = volume_quadrature(el.family, cfg.degree + 4);
    const Mat xg = vandermonde(el.family, m.n_geo, q.xi) * el.geo_modal;
    const auto gv = grad_vandermonde(el.family, m.n_geo, q.xi);
    Vec3 x = Vec3::Zero();
    for (int i = 0; i < q.w.size(); ++i) {
      Mat3 jac = Mat3::Identity();
      for (int p = 0; p < 3; ++p) {
        const Vec dx = (gv[p].row(i) * el.geo_modal).transpose();
        for (int c = 0; c < 3; ++c) jac(c, p) = dx[c];
      }
      x = xg.row(i).transpose();
      reference += q.w[i] * q.jhat[i] * jac.determinant() *
                   entropy_function(3, kGamma, tgv_state(tgv, kGamma, x));
    }
  }
  CHECK(std::abs(discrete - reference) < 1e-8 * std::abs(reference));
}

TEST_CASE("kinetic energy: analytic TGV value, zero velocity, constant translation") {
  RunConfig cfg = base_config(3, 4, SplitKind::Tet);
  cfg.degree = 4;
  cfg.length = 2 * M_PI;
  Solver sol = make_solver(cfg, InterfaceDissipation::None);
  TgvSetup tgv;
  ModalState s = sol.init([&](const Vec3& x) { return tgv_state(tgv, kGamma, x); });
  CHECK(kinetic_energy(sol, s, tgv.rho0, tgv.u0) == doctest::Approx(0.125).epsilon(2e-5));

  StateVec rest = StateVec::Zero();
  rest[0] = 1.0;
  rest[4] = 10.0;
  ModalState s0 = sol.init([&](const Vec3&) { return rest; });
  CHECK(std::abs(kinetic_energy(sol, s0, 1.0, 1.0)) < 1e-14);
  CHECK(std::abs(solenoidal_dissipation(sol, s0, 1.0, 1600.0, 1.0)) < 1e-14);

  // rigid translation: irrotational, so the solenoidal dissipation vanishes
  StateVec trans = StateVec::Zero();
  trans[0] = 1.0;
  trans[1] = 0.5;
  trans[4] = 10.0 / (kGamma - 1) + 0.125;
  ModalState st = sol.init([&](const Vec3&) { return trans; });
  CHECK(std::abs(solenoidal_dissipation(sol, st, 1.0, 1600.0, 1.0)) < 1e-10);

  // the TGV field is rotational
  CHECK(solenoidal_dissipation(sol, s, tgv.length, 1600.0, tgv.u0) > 1e-4);
}

TEST_CASE("l2 error: exact state gives zero, constant offset gives delta") {
  RunConfig cfg = base_config(3, 3, SplitKind::Hex);
  Solver sol = make_solver(cfg, InterfaceDissipation::None);
  auto field = [&](const Vec3& x) { return manufactured_state(3, kGamma, x, 0.0); };
  ModalState s = sol.init(field);
  const Vec zero = l2_error(
      sol, s, [&](const Vec3& x, Real) { return manufactured_state(3, kGamma, x, 0.0); });
  CHECK(zero.maxCoeff() < 1e-5);  // projection error only

  const Real delta = 0.37;
  const Vec off = l2_error(sol, s, [&](const Vec3& x, Real) {
    StateVec u = manufactured_state(3, kGamma, x, 0.0);
    u[0] += delta;
    return u;
  });
  CHECK(off[0] == doctest::Approx(delta).epsilon(1e-8));  // unit box volume

  const Vec self = l2_difference(sol, s, s);
  CHECK(self.maxCoeff() == 0.0);
}

TEST_CASE("dissipative short TGV run: entropy decays, kinetic energy bounded") {
  RunConfig cfg = base_config(3, 3, SplitKind::Prism);
  cfg.degree = 3;
  cfg.t_end = 0.3;
  cfg.analyze_interval = 0.1;
  cfg.interface_flux = "lf";
  TgvSetup tgv;
  const TgvResult r = run_tgv(cfg, tgv);
  REQUIRE(r.series.size() >= 3);
  CHECK(r.series.front().entropy_delta == 0.0);
  for (const auto& rec : r.series) {
    CHECK(rec.entropy_delta <= 1e-12);
    CHECK(std::isfinite(rec.kinetic_energy));
  }
  CHECK(r.series.front().kinetic_energy == doctest::Approx(0.125).epsilon(1e-3));
  for (size_t i = 1; i < r.series.size(); ++i) {
    CHECK(r.series[i].t > r.series[i - 1].t);
  }
}

TEST_CASE("csv writers emit full-precision parseable tables") {
  std::vector<TimeSeriesRecord> rows(2);
  rows[0].t = 0.0;
  rows[0].entropy = -1.0 / 3.0;
  rows[1].t = 0.1;
  rows[1].entropy = M_PI;
  rows[1].entropy_delta = M_PI + 1.0 / 3.0;
  const std::string path = "/tmp/polydg_ts.csv";
  write_timeseries_csv(path, rows);
  std::ifstream in(path);
  std::string header, l1, l2x;
  std::getline(in, header);
  std::getline(in, l1);
  std::getline(in, l2x);
  CHECK(header == "t,entropy,entropy_delta,kinetic_energy,solenoidal_dissipation");
  const auto comma = l2x.find(',');
  CHECK(std::stod(l2x.substr(comma + 1)) == M_PI);
  std::remove(path.c_str());

  std::vector<ConvergenceRow> conv(1);
  conv[0].family = "tet";
  conv[0].h = 0.25;
  conv[0].dofs = 1234;
  conv[0].l2 = Vec::Constant(5, 1e-7);
  conv[0].eoc = 4.9;
  const std::string cpath = "/tmp/polydg_conv.csv";
  write_convergence_csv(cpath, 5, conv);
  std::ifstream cin2(cpath);
  std::getline(cin2, header);
  CHECK(header == "family,mesh_h,dofs,l2_rho,l2_mom1,l2_mom2,l2_mom3,l2_energy,eoc");
  std::remove(cpath.c_str());
}
