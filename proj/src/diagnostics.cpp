#include "polydg/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace polydg {

std::string format_real(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// deterministic fixed-order reduction over elements and nodes
template <typename F>
Real integrate(const Solver& sol, const ModalState& s, F&& node_value) {
  Real acc = 0.0;
  for (int e = 0; e < sol.mesh().n_elements(); ++e) {
    const auto& ops = sol.operators(e);
    const auto& geo = sol.geometry(e);
    const Mat u = sol.nodal(s, e);
    StateVec uq = StateVec::Zero();
    for (int q = 0; q < ops.nq; ++q) {
      uq.head(sol.n_vars()) = u.row(q).transpose();
      acc += ops.wj[q] * geo.jproj[q] * node_value(e, q, uq);
    }
  }
  return acc;
}

}  // namespace

Real integral_entropy(const Solver& sol, const ModalState& s) {
  const int d = sol.mesh().dim;
  const Real gamma = sol.options().gas.gamma;
  return integrate(sol, s,
                   [&](int, int, const StateVec& u) { return entropy_function(d, gamma, u); });
}

Real domain_volume(const Solver& sol) {
  Real acc = 0.0;
  for (int e = 0; e < sol.mesh().n_elements(); ++e) {
    acc += sol.operators(e).wj.dot(sol.geometry(e).jproj);
  }
  return acc;
}

Real kinetic_energy(const Solver& sol, const ModalState& s, Real rho0, Real u0) {
  const int d = sol.mesh().dim;
  const Real vol = domain_volume(sol);
  const Real ke = integrate(sol, s, [&](int, int, const StateVec& u) {
    Real m2 = 0.0;
    for (int c = 0; c < d; ++c) m2 += u[1 + c] * u[1 + c];
    return m2 / u[0];
  });
  return ke / (2.0 * rho0 * u0 * u0 * vol);
}

Real solenoidal_dissipation(const Solver& sol, const ModalState& s, Real length, Real reynolds,
                            Real u0) {
  const int d = sol.mesh().dim;
  if (d != 3) throw std::invalid_argument("solenoidal_dissipation: three-dimensional only");
  const auto grads = sol.lift_gradients(s);
  const int np = d + 1;
  Real acc = 0.0;
  for (int e = 0; e < sol.mesh().n_elements(); ++e) {
    const auto& ops = sol.operators(e);
    const auto& geo = sol.geometry(e);
    const Mat& g = grads[e];
    for (int q = 0; q < ops.nq; ++q) {
      const Real w1 = g(q, 1 * np + 2) - g(q, 2 * np + 1);  // du3/dx2 - du2/dx3
      const Real w2 = g(q, 2 * np + 0) - g(q, 0 * np + 2);
      const Real w3 = g(q, 0 * np + 1) - g(q, 1 * np + 0);
      acc += ops.wj[q] * geo.jproj[q] * (w1 * w1 + w2 * w2 + w3 * w3);
    }
  }
  return length * length / (reynolds * u0 * u0 * domain_volume(sol)) * acc;
}

Vec l2_error(const Solver& sol, const ModalState& s,
             const std::function<StateVec(const Vec3&, Real)>& exact) {
  const int nv = sol.n_vars();
  Vec acc = Vec::Zero(nv);
  Vec3 x = Vec3::Zero();
  for (int e = 0; e < sol.mesh().n_elements(); ++e) {
    const auto& ops = sol.operators(e);
    const auto& geo = sol.geometry(e);
    const Mat u = sol.nodal(s, e);
    for (int q = 0; q < ops.nq; ++q) {
      x.head(sol.mesh().dim) = geo.xq.row(q).transpose();
      const StateVec ue = exact(x, s.time);
      for (int c = 0; c < nv; ++c) {
        const Real diff = u(q, c) - ue[c];
        acc[c] += ops.wj[q] * geo.jproj[q] * diff * diff;
      }
    }
  }
  return acc.cwiseSqrt();
}

Vec l2_difference(const Solver& sol, const ModalState& a, const ModalState& b) {
  const int nv = sol.n_vars();
  Vec acc = Vec::Zero(nv);
  for (int e = 0; e < sol.mesh().n_elements(); ++e) {
    const auto& ops = sol.operators(e);
    const auto& geo = sol.geometry(e);
    const Mat diff = sol.nodal(a, e) - sol.nodal(b, e);
    for (int c = 0; c < nv; ++c) {
      acc[c] += diff.col(c).cwiseAbs2().dot(ops.wj.cwiseProduct(geo.jproj));
    }
  }
  return acc.cwiseSqrt();
}

void write_timeseries_csv(const std::string& path, const std::vector<TimeSeriesRecord>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_timeseries_csv: cannot open " + path);
  out << "t,entropy,entropy_delta,kinetic_energy,solenoidal_dissipation\n";
  for (const auto& r : rows) {
    out << format_real(r.t) << ',' << format_real(r.entropy) << ','
        << format_real(r.entropy_delta) << ',' << format_real(r.kinetic_energy) << ','
        << format_real(r.solenoidal_dissipation) << '\n';
  }
  if (!out) throw IoError("write_timeseries_csv: write failed for " + path);
}

void write_convergence_csv(const std::string& path, int nvar,
                           const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_convergence_csv: cannot open " + path);
  out << "family,mesh_h,dofs";
  for (int c = 0; c < nvar; ++c) {
    if (c == 0) {
      out << ",l2_rho";
    } else if (c == nvar - 1) {
      out << ",l2_energy";
    } else {
      out << ",l2_mom" << c;
    }
  }
  out << ",eoc\n";
  for (const auto& r : rows) {
    out << r.family << ',' << format_real(r.h) << ',' << r.dofs;
    for (int c = 0; c < nvar; ++c) out << ',' << format_real(r.l2[c]);
    out << ',' << format_real(r.eoc) << '\n';
  }
  if (!out) throw IoError("write_convergence_csv: write failed for " + path);
}

}  // namespace polydg
