#include "polydg/cases.hpp"

#include <cmath>
#include <fstream>
#include <filesystem>
#include <sstream>

namespace polydg {

namespace {

GenOptions mesh_options(const RunConfig& cfg) {
  GenOptions o;
  o.dim = cfg.dim;
  o.counts = cfg.counts;
  o.split = cfg.split;
  o.epsilon = cfg.epsilon;
  o.length = cfg.length;
  o.n_geo = cfg.n_geo;
  o.perturb_pyramids = cfg.perturb_pyramids;
  return o;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions so;
  so.degree = cfg.degree;
  so.gas = cfg.gas;
  so.mode = cfg.equation_mode();
  so.interface = cfg.interface_kind();
  so.cfl = cfg.cfl;
  so.threads = cfg.threads;
  return so;
}

}  // namespace

StateVec freestream_state(int dim, Real gamma) {
  StateVec u = StateVec::Zero();
  u[0] = 1.0;
  u[1] = 0.3;
  u[dim + 1] = 17.857 / (gamma - 1) + 0.5 * 0.09;
  return u;
}

FreestreamResult run_freestream(const RunConfig& cfg) {
  const Mesh mesh = gen_box_mesh(mesh_options(cfg));
  SolverOptions so = solver_options(cfg);
  so.mode = EquationMode::NavierStokes;  // exercises the lifted gradients too
  if (so.gas.mu == 0) so.gas.mu = 1e-3;
  Solver sol(mesh, so);
  const StateVec uinf = freestream_state(cfg.dim, cfg.gas.gamma);
  ModalState s = sol.init([&](const Vec3&) { return uinf; });
  const ModalState s0 = s;

  FreestreamResult result;
  result.degree = cfg.degree;
  result.n_elements = mesh.n_elements();
  result.state_energy = uinf[cfg.dim + 1];

  const auto grads = sol.lift_gradients(s);
  for (const Mat& g : grads) {
    result.br1_max = std::max(result.br1_max, g.cwiseAbs().maxCoeff());
  }

  const Real dt = sol.stable_dt(s);
  sol.advance(s, 10 * dt, dt);
  result.l2 = l2_difference(sol, s, s0);
  return result;
}

ConvergenceRow run_manufactured_case(const RunConfig& cfg) {
  const Mesh mesh = gen_box_mesh(mesh_options(cfg));
  SolverOptions so = solver_options(cfg);
  const Real gamma = cfg.gas.gamma;
  const int dim = cfg.dim;
  so.source = [dim, gamma](const Vec3& x, Real t) {
    return manufactured_source(dim, gamma, x, t);
  };
  Solver sol(mesh, so);
  ModalState s =
      sol.init([&](const Vec3& x) { return manufactured_state(dim, gamma, x, 0.0); });
  sol.advance(s, 0.1);
  ConvergenceRow row;
  row.family = split_name(cfg.split);
  row.h = cfg.length / cfg.counts;
  row.dofs = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) row.dofs += sol.operators(e).nmodal;
  row.l2 = l2_error(sol, s, [dim, gamma](const Vec3& x, Real t) {
    return manufactured_state(dim, gamma, x, t);
  });
  return row;
}

std::vector<ConvergenceRow> run_convergence_h(const RunConfig& base,
                                              const std::vector<int>& counts) {
  std::vector<ConvergenceRow> rows;
  for (size_t i = 0; i < counts.size(); ++i) {
    RunConfig cfg = base;
    cfg.counts = counts[i];
    rows.push_back(run_manufactured_case(cfg));
    if (i > 0) {
      const auto& prev = rows[rows.size() - 2];
      rows.back().eoc =
          std::log(prev.l2[0] / rows.back().l2[0]) / std::log(prev.h / rows.back().h);
    }
  }
  return rows;
}

std::vector<ConvergenceRow> run_convergence_p(const RunConfig& base,
                                              const std::vector<int>& degrees) {
  std::vector<ConvergenceRow> rows;
  for (size_t i = 0; i < degrees.size(); ++i) {
    RunConfig cfg = base;
    cfg.degree = degrees[i];
    // the metric identities require n_geo <= N
    cfg.n_geo = std::min(base.n_geo, cfg.degree);
    ConvergenceRow row = run_manufactured_case(cfg);
    row.h = degrees[i];
    rows.push_back(row);
    if (i > 0) rows.back().eoc = rows[rows.size() - 2].l2[0] / rows.back().l2[0];
  }
  return rows;
}

Real tgv_pressure0(const TgvSetup& tgv, Real gamma) {
  return tgv.rho0 * tgv.u0 * tgv.u0 / (gamma * tgv.mach * tgv.mach);
}

StateVec tgv_state(const TgvSetup& tgv, Real gamma, const Vec3& x) {
  const Real L = tgv.length;
  const Real u0 = tgv.u0;
  const Real p0 = tgv_pressure0(tgv, gamma);
  const Real u1 = u0 * std::sin(x[0] / L) * std::cos(x[1] / L) * std::cos(x[2] / L);
  const Real u2 = -u0 * std::cos(x[0] / L) * std::sin(x[1] / L) * std::cos(x[2] / L);
  const Real p = p0 + tgv.rho0 * u0 * u0 / 16.0 *
                          (std::cos(2 * x[0] / L) + std::cos(2 * x[1] / L)) *
                          (2.0 + std::cos(2 * x[2] / L));
  // isothermal initial density from the perfect-gas law
  const Real rho = tgv.rho0 * p / p0;
  StateVec u = StateVec::Zero();
  u[0] = rho;
  u[1] = rho * u1;
  u[2] = rho * u2;
  u[4] = p / (gamma - 1) + 0.5 * rho * (u1 * u1 + u2 * u2);
  return u;
}

TgvResult run_tgv(const RunConfig& cfg, const TgvSetup& tgv, Real fixed_dt) {
  if (cfg.dim != 3) throw ConfigError("the Taylor-Green case is three-dimensional");
  RunConfig mc = cfg;
  mc.length = 2 * M_PI * tgv.length;
  const Mesh mesh = gen_box_mesh(mesh_options(mc));
  SolverOptions so = solver_options(cfg);
  if (tgv.reynolds > 0) {
    so.mode = EquationMode::NavierStokes;
    so.gas.mu = tgv.rho0 * tgv.u0 * tgv.length / tgv.reynolds;
  } else {
    so.mode = EquationMode::Euler;
    so.gas.mu = 0.0;
  }
  Solver sol(mesh, so);
  const Real gamma = cfg.gas.gamma;
  ModalState s = sol.init([&](const Vec3& x) { return tgv_state(tgv, gamma, x); });

  TgvResult result;
  Real s_ref = 0.0;
  bool have_ref = false;
  auto monitor = [&](const ModalState& state) {
    TimeSeriesRecord rec;
    rec.t = state.time;
    rec.entropy = integral_entropy(sol, state);
    if (!have_ref) {
      s_ref = rec.entropy;
      have_ref = true;
    }
    rec.entropy_delta = rec.entropy - s_ref;
    rec.kinetic_energy = kinetic_energy(sol, state, tgv.rho0, tgv.u0);
    rec.solenoidal_dissipation =
        (tgv.reynolds > 0)
            ? solenoidal_dissipation(sol, state, tgv.length, tgv.reynolds, tgv.u0)
            : 0.0;
    result.series.push_back(rec);
  };
  result.dt_used = (fixed_dt > 0) ? fixed_dt : sol.stable_dt(s);
  sol.advance(s, cfg.t_end, result.dt_used, monitor, cfg.analyze_interval);
  return result;
}

std::string run_case(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::ostringstream report;

  if (cfg.case_name == "freestream") {
    RunConfig fc = cfg;
    if (fc.split == SplitKind::Hex && fc.dim == 3) fc.split = SplitKind::Mix;
    if (fc.dim == 2 && (fc.split == SplitKind::Mix || fc.split == SplitKind::Hex)) {
      fc.split = SplitKind::Tria;
    }
    fc.epsilon = (cfg.epsilon > 0) ? cfg.epsilon : 1.0 / 16.0;
    fc.n_geo = 1;
    fc.perturb_pyramids = true;
    const FreestreamResult r = run_freestream(fc);
    std::ofstream out(fs::path(cfg.output_dir) / "freestream.csv", std::ios::binary);
    out << "degree,n_elements";
    for (int c = 0; c < fc.dim + 2; ++c) out << ",l2_var" << c;
    out << ",br1_max\n" << r.degree << ',' << r.n_elements;
    for (int c = 0; c < fc.dim + 2; ++c) out << ',' << format_real(r.l2[c]);
    out << ',' << format_real(r.br1_max) << "\n";
    report << "freestream N=" << r.degree << " elements=" << r.n_elements
           << " max L2 change=" << r.l2.maxCoeff() << " br1=" << r.br1_max << "\n";
    return report.str();
  }

  if (cfg.case_name == "convergence_h") {
    RunConfig base = cfg;
    base.epsilon = (cfg.epsilon > 0) ? cfg.epsilon : 1.0 / 16.0;
    base.n_geo = 2;
    const std::vector<int> counts = {4, 8};
    const auto rows = run_convergence_h(base, counts);
    write_convergence_csv((fs::path(cfg.output_dir) / "convergence.csv").string(),
                          cfg.dim + 2, rows);
    report << "h-convergence " << split_name(cfg.split) << ": EOC(rho) = " << rows.back().eoc
           << "\n";
    return report.str();
  }

  if (cfg.case_name == "convergence_p") {
    RunConfig base = cfg;
    base.epsilon = (cfg.epsilon > 0) ? cfg.epsilon : 1.0 / 32.0;
    base.n_geo = 2;
    if (base.dim == 3) base.split = SplitKind::Mix;
    const std::vector<int> degrees = {1, 2, 3, 4, 5};
    const auto rows = run_convergence_p(base, degrees);
    write_convergence_csv((fs::path(cfg.output_dir) / "convergence.csv").string(),
                          cfg.dim + 2, rows);
    report << "p-convergence " << split_name(base.split) << ": error ratios";
    for (size_t i = 1; i < rows.size(); ++i) report << ' ' << rows[i].eoc;
    report << "\n";
    return report.str();
  }

  if (cfg.case_name == "tgv") {
    TgvSetup tgv;
    tgv.reynolds = (cfg.mode == "navier_stokes") ? 1600.0 : 0.0;
    const TgvResult r = run_tgv(cfg, tgv);
    write_timeseries_csv((fs::path(cfg.output_dir) / "timeseries.csv").string(), r.series);
    report << "tgv " << split_name(cfg.split) << " dt=" << r.dt_used
           << " final dS=" << r.series.back().entropy_delta
           << " e_k=" << r.series.back().kinetic_energy << "\n";
    return report.str();
  }

  // custom: integrate the configured setup from the manufactured initial data
  RunConfig cc = cfg;
  const Mesh mesh = gen_box_mesh(mesh_options(cc));
  Solver sol(mesh, solver_options(cc));
  const Real gamma = cfg.gas.gamma;
  const int dim = cfg.dim;
  ModalState s =
      sol.init([&](const Vec3& x) { return manufactured_state(dim, gamma, x, 0.0); });
  std::vector<TimeSeriesRecord> series;
  Real s_ref = 0.0;
  bool have_ref = false;
  sol.advance(s, cfg.t_end, 0.0,
              [&](const ModalState& state) {
                TimeSeriesRecord rec;
                rec.t = state.time;
                rec.entropy = integral_entropy(sol, state);
                if (!have_ref) {
                  s_ref = rec.entropy;
                  have_ref = true;
                }
                rec.entropy_delta = rec.entropy - s_ref;
                rec.kinetic_energy = kinetic_energy(sol, state, 1.0, 1.0);
                series.push_back(rec);
              },
              cfg.analyze_interval);
  write_timeseries_csv((fs::path(cfg.output_dir) / "timeseries.csv").string(), series);
  report << "custom run to t=" << s.time << " with " << mesh.n_elements() << " elements\n";
  return report.str();
}

}  // namespace polydg
