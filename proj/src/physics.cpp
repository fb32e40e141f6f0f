#include "polydg/physics.hpp"

#include <cmath>

namespace polydg {

bool admissible(int dim, Real gamma, const StateVec& u) {
  return u[0] > 0.0 && pressure(dim, gamma, u) > 0.0 && std::isfinite(u[0]) &&
         std::isfinite(u[dim + 1]);
}

void require_admissible(int dim, Real gamma, const StateVec& u, const char* where) {
  if (!admissible(dim, gamma, u)) {
    throw AdmissibilityError(std::string("inadmissible state in ") + where +
                             ": rho = " + std::to_string(u[0]) +
                             ", p = " + std::to_string(pressure(dim, gamma, u)));
  }
}

StateVec euler_flux(int dim, Real gamma, const StateVec& u, int dir) {
  require_admissible(dim, gamma, u, "euler_flux");
  return euler_flux_t<Real>(dim, gamma, u, dir);
}

StateVec euler_flux_normal(int dim, Real gamma, const StateVec& u, const Vec3& n) {
  StateVec f = StateVec::Zero();
  for (int r = 0; r < dim; ++r) f += n[r] * euler_flux_t<Real>(dim, gamma, u, r);
  return f;
}

Real entropy_function(int dim, Real gamma, const StateVec& u) {
  const Real p = pressure(dim, gamma, u);
  const Real s = std::log(p) - gamma * std::log(u[0]);
  return -u[0] * s / (gamma - 1);
}

Real entropy_flux(int dim, Real gamma, const StateVec& u, int dir) {
  return entropy_function(dim, gamma, u) * u[1 + dir] / u[0];
}

Real entropy_potential(int dim, Real gamma, const StateVec& u, int dir) {
  const StateVec v = entropy_vars(dim, gamma, u);
  return v.head(dim + 2).dot(euler_flux_t<Real>(dim, gamma, u, dir).head(dim + 2)) -
         entropy_flux(dim, gamma, u, dir);
}

StateVec entropy_vars(int dim, Real gamma, const StateVec& u) {
  require_admissible(dim, gamma, u, "entropy_vars");
  const Real p = pressure(dim, gamma, u);
  const Real s = std::log(p) - gamma * std::log(u[0]);
  StateVec v = StateVec::Zero();
  Real usq = 0.0;
  for (int c = 0; c < dim; ++c) {
    const Real vel = u[1 + c] / u[0];
    usq += vel * vel;
    v[1 + c] = u[0] * vel / p;
  }
  v[0] = (gamma - s) / (gamma - 1) - u[0] * usq / (2 * p);
  v[dim + 1] = -u[0] / p;
  return v;
}

bool entropy_vars_admissible(int dim, const StateVec& v) {
  return v[dim + 1] < 0.0 && v.head(dim + 2).allFinite();
}

StateVec cons_from_entropy(int dim, Real gamma, const StateVec& v) {
  if (!entropy_vars_admissible(dim, v)) {
    throw AdmissibilityError("cons_from_entropy: entropy variables not admissible");
  }
  StateVec vt = (gamma - 1) * v;
  Real msq = 0.0;
  for (int c = 0; c < dim; ++c) msq += vt[1 + c] * vt[1 + c];
  const Real s = gamma - vt[0] + msq / (2 * vt[dim + 1]);
  // rho*eps = ((gamma-1)/(-vt_last)^gamma)^(1/(gamma-1)) exp(-s/(gamma-1)),
  // evaluated with a single log/exp pair
  const Real rho_eps = std::exp(
      (std::log(gamma - 1) - gamma * std::log(-vt[dim + 1]) - s) / (gamma - 1));
  StateVec u = StateVec::Zero();
  u[0] = -rho_eps * vt[dim + 1];
  for (int c = 0; c < dim; ++c) u[1 + c] = rho_eps * vt[1 + c];
  u[dim + 1] = rho_eps * (1 - msq / (2 * vt[dim + 1]));
  return u;
}

Real log_mean(Real a, Real b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_mean: arguments must be positive");
  return log_mean_from_logs(a, b, std::log(a), std::log(b));
}

StateVec chandrashekar_flux(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                            int dir) {
  require_admissible(dim, gamma, uL, "chandrashekar_flux");
  require_admissible(dim, gamma, uR, "chandrashekar_flux");
  const FluxNode a = make_flux_node(dim, gamma, uL);
  const FluxNode b = make_flux_node(dim, gamma, uR);
  StateVec f[3];
  chandrashekar_flux_dirs(dim, gamma, a, b, f);
  return f[dir];
}

StateVec chandrashekar_flux_normal(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                                   const Vec3& n) {
  const FluxNode a = make_flux_node(dim, gamma, uL);
  const FluxNode b = make_flux_node(dim, gamma, uR);
  StateVec f[3];
  chandrashekar_flux_dirs(dim, gamma, a, b, f);
  StateVec out = StateVec::Zero();
  for (int r = 0; r < dim; ++r) out += n[r] * f[r];
  return out;
}

StateVec rusanov_flux(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                      const Vec3& n) {
  require_admissible(dim, gamma, uL, "rusanov_flux");
  require_admissible(dim, gamma, uR, "rusanov_flux");
  Real unL = 0.0, unR = 0.0;
  for (int c = 0; c < dim; ++c) {
    unL += n[c] * uL[1 + c] / uL[0];
    unR += n[c] * uR[1 + c] / uR[0];
  }
  const Real lmax = std::max(std::abs(unL) + sound_speed(dim, gamma, uL),
                             std::abs(unR) + sound_speed(dim, gamma, uR));
  return 0.5 * (euler_flux_normal(dim, gamma, uL, n) + euler_flux_normal(dim, gamma, uR, n)) -
         0.5 * lmax * (uR - uL);
}

namespace {

// Roe matrix dissipation |A|(uR - uL) with the Harten entropy fix applied to
// every wave speed.
StateVec roe_dissipation(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                         const Vec3& n) {
  const Real rl = std::sqrt(uL[0]);
  const Real rr = std::sqrt(uR[0]);
  const Real wl = rl / (rl + rr);
  const Real wr = 1 - wl;
  Vec3 vl = Vec3::Zero(), vr = Vec3::Zero(), vbar = Vec3::Zero();
  for (int c = 0; c < dim; ++c) {
    vl[c] = uL[1 + c] / uL[0];
    vr[c] = uR[1 + c] / uR[0];
    vbar[c] = wl * vl[c] + wr * vr[c];
  }
  const Real pL = pressure(dim, gamma, uL);
  const Real pR = pressure(dim, gamma, uR);
  const Real hL = (uL[dim + 1] + pL) / uL[0];
  const Real hR = (uR[dim + 1] + pR) / uR[0];
  const Real hbar = wl * hL + wr * hR;
  const Real vsq = vbar.squaredNorm();
  const Real c2 = (gamma - 1) * (hbar - 0.5 * vsq);
  const Real cbar = std::sqrt(std::max(c2, 1e-300));
  const Real un = vbar.dot(n);
  const Real rho_bar = rl * rr;

  const Real dp = pR - pL;
  const Real drho = uR[0] - uL[0];
  Real dun = 0.0;
  Vec3 dv = Vec3::Zero();
  for (int c = 0; c < dim; ++c) {
    dv[c] = vr[c] - vl[c];
    dun += n[c] * dv[c];
  }
  const Vec3 dvt = dv - dun * n;

  const Real a1 = (dp - rho_bar * cbar * dun) / (2 * c2);
  const Real a2 = drho - dp / c2;
  const Real a3 = (dp + rho_bar * cbar * dun) / (2 * c2);

  const Real delta = 0.1 * (std::abs(un) + cbar);
  auto fix = [delta](Real lam) {
    const Real al = std::abs(lam);
    return (al >= delta) ? al : (lam * lam + delta * delta) / (2 * delta);
  };
  const Real l1 = fix(un - cbar);
  const Real l2 = fix(un);
  const Real l3 = fix(un + cbar);

  StateVec d = StateVec::Zero();
  // acoustic waves
  d[0] += l1 * a1 + l3 * a3;
  for (int c = 0; c < dim; ++c) {
    d[1 + c] += l1 * a1 * (vbar[c] - cbar * n[c]) + l3 * a3 * (vbar[c] + cbar * n[c]);
  }
  d[dim + 1] += l1 * a1 * (hbar - cbar * un) + l3 * a3 * (hbar + cbar * un);
  // entropy (contact) wave
  d[0] += l2 * a2;
  for (int c = 0; c < dim; ++c) d[1 + c] += l2 * a2 * vbar[c];
  d[dim + 1] += l2 * a2 * 0.5 * vsq;
  // shear waves
  for (int c = 0; c < dim; ++c) d[1 + c] += l2 * rho_bar * dvt[c];
  d[dim + 1] += l2 * rho_bar * vbar.dot(dvt);
  return d;
}

}  // namespace

StateVec roe_flux_harten(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                         const Vec3& n) {
  require_admissible(dim, gamma, uL, "roe_flux");
  require_admissible(dim, gamma, uR, "roe_flux");
  return 0.5 * (euler_flux_normal(dim, gamma, uL, n) + euler_flux_normal(dim, gamma, uR, n)) -
         0.5 * roe_dissipation(dim, gamma, uL, uR, n);
}

StateVec es_interface_flux(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                           const Vec3& n, InterfaceDissipation kind) {
  require_admissible(dim, gamma, uL, "es_interface_flux");
  require_admissible(dim, gamma, uR, "es_interface_flux");
  return es_interface_flux_nodes(dim, gamma, make_flux_node(dim, gamma, uL),
                                 make_flux_node(dim, gamma, uR), uL, uR, n, kind);
}

StateVec es_interface_flux_nodes(int dim, Real gamma, const FluxNode& a, const FluxNode& b,
                                 const StateVec& uL, const StateVec& uR, const Vec3& n,
                                 InterfaceDissipation kind) {
  StateVec f3[3];
  chandrashekar_flux_dirs(dim, gamma, a, b, f3);
  StateVec f = StateVec::Zero();
  for (int r = 0; r < dim; ++r) f += n[r] * f3[r];
  switch (kind) {
    case InterfaceDissipation::None:
      break;
    case InterfaceDissipation::LaxFriedrichs: {
      Real unL = 0.0, unR = 0.0;
      for (int c = 0; c < dim; ++c) {
        unL += n[c] * a.vel[c];
        unR += n[c] * b.vel[c];
      }
      const Real lmax = std::max(std::abs(unL) + std::sqrt(gamma * a.p / a.rho),
                                 std::abs(unR) + std::sqrt(gamma * b.p / b.rho));
      f -= 0.5 * lmax * (uR - uL);
      break;
    }
    case InterfaceDissipation::Roe:
      f -= 0.5 * roe_dissipation(dim, gamma, uL, uR, n);
      break;
  }
  return f;
}

void viscous_flux(int dim, const GasModel& gas, const StateVec& u, const Mat& grad_prim,
                  Mat& fv) {
  // grad_prim(r, c): d prim_c / d x_r with prim = (u_1..u_d, T)
  const Real lambda = gas.cp * gas.mu / gas.prandtl;
  Real div = 0.0;
  for (int c = 0; c < dim; ++c) div += grad_prim(c, c);
  fv.setZero(dim, dim + 2);
  for (int r = 0; r < dim; ++r) {
    Real tau_dot_u = 0.0;
    for (int c = 0; c < dim; ++c) {
      Real tau = gas.mu * (grad_prim(r, c) + grad_prim(c, r));
      if (r == c) tau -= 2.0 / 3.0 * gas.mu * div;
      fv(r, 1 + c) = tau;
      tau_dot_u += tau * u[1 + c] / u[0];
    }
    fv(r, dim + 1) = tau_dot_u + lambda * grad_prim(r, dim);
  }
}

}  // namespace polydg
