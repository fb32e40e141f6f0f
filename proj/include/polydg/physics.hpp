#ifndef POLYDG_PHYSICS_HPP
#define POLYDG_PHYSICS_HPP

#include "polydg/types.hpp"

namespace polydg {

// Perfect gas with constant dynamic viscosity; conductivity = cp*mu/Pr.
struct GasModel {
  Real gamma = 1.4;
  Real prandtl = 0.72;
  Real mu = 0.0;
  Real cp = 3.5;
};

// Conservative layout: [rho, rho*u_1..rho*u_d, rho*e]; nvar = dim + 2.
inline int n_vars(int dim) { return dim + 2; }

template <typename T>
T pressure_t(int dim, Real gamma, const Eigen::Matrix<T, kMaxVar, 1>& u) {
  T ke = T(0);
  for (int p = 0; p < dim; ++p) ke += u[1 + p] * u[1 + p];
  return (gamma - 1) * (u[dim + 1] - T(0.5) * ke / u[0]);
}

inline Real pressure(int dim, Real gamma, const StateVec& u) {
  return pressure_t<Real>(dim, gamma, u);
}

bool admissible(int dim, Real gamma, const StateVec& u);
void require_admissible(int dim, Real gamma, const StateVec& u, const char* where);

inline Real sound_speed(int dim, Real gamma, const StateVec& u) {
  return std::sqrt(gamma * pressure(dim, gamma, u) / u[0]);
}

// Convective flux in a coordinate direction.
template <typename T>
Eigen::Matrix<T, kMaxVar, 1> euler_flux_t(int dim, Real gamma,
                                          const Eigen::Matrix<T, kMaxVar, 1>& u, int dir) {
  Eigen::Matrix<T, kMaxVar, 1> f;
  f.setZero();
  const T p = pressure_t<T>(dim, gamma, u);
  const T vdir = u[1 + dir] / u[0];
  f[0] = u[1 + dir];
  for (int s = 0; s < dim; ++s) f[1 + s] = u[1 + s] * vdir;
  f[1 + dir] += p;
  f[dim + 1] = (u[dim + 1] + p) * vdir;
  return f;
}

StateVec euler_flux(int dim, Real gamma, const StateVec& u, int dir);
StateVec euler_flux_normal(int dim, Real gamma, const StateVec& u, const Vec3& n);

// Entropy function pair (S, F_p) with S = -rho s / (gamma - 1), s = ln(p rho^-gamma).
Real entropy_function(int dim, Real gamma, const StateVec& u);
Real entropy_flux(int dim, Real gamma, const StateVec& u, int dir);
// Entropy flux potential psi_p = v^T f_p - F_p (= rho u_p for these equations).
Real entropy_potential(int dim, Real gamma, const StateVec& u, int dir);

StateVec entropy_vars(int dim, Real gamma, const StateVec& u);
StateVec cons_from_entropy(int dim, Real gamma, const StateVec& v);
bool entropy_vars_admissible(int dim, const StateVec& v);

// Stable logarithmic mean (a - b) / (ln a - ln b) with a series branch for
// nearly equal arguments.
Real log_mean(Real a, Real b);


// Per-node quantities shared by all two-point flux evaluations at that node.
struct FluxNode {
  Real rho, p, beta, ln_rho, ln_beta, usq;
  Real vel[3];
};



// Entropy conservative two-point flux (Chandrashekar); all d directions at once.


inline Real log_mean_from_logs(Real a, Real b, Real ln_a, Real ln_b) {
  // order the arguments so the result is bitwise symmetric under swaps
  if (a > b) {
    std::swap(a, b);
    std::swap(ln_a, ln_b);
  }
  const Real zeta = a / b;
  const Real f = (zeta - 1) / (zeta + 1);
  const Real u = f * f;
  // series branch for |ln zeta| < 1e-4
  Real big;
  if (u < 2.5e-9) {
    big = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0;
  } else {
    big = (ln_a - ln_b) / (2 * f);
  }
  return (a + b) / (2 * big);
}

// Per-node quantities shared by all two-point flux evaluations at that node.
inline FluxNode make_flux_node(int dim, Real gamma, const StateVec& u) {
  FluxNode n;
  n.rho = u[0];
  n.p = pressure(dim, gamma, u);
  n.beta = n.rho / (2 * n.p);
  n.ln_rho = std::log(n.rho);
  n.ln_beta = std::log(n.beta);
  n.usq = 0.0;
  for (int c = 0; c < 3; ++c) n.vel[c] = 0.0;
  for (int c = 0; c < dim; ++c) {
    n.vel[c] = u[1 + c] / u[0];
    n.usq += n.vel[c] * n.vel[c];
  }
  return n;
}

// Entropy conservative two-point flux (Chandrashekar); all d directions at once.
inline void chandrashekar_flux_dirs(int dim, Real gamma, const FluxNode& a, const FluxNode& b,
                                    StateVec f[3]) {
  const Real rho_ln = log_mean_from_logs(a.rho, b.rho, a.ln_rho, b.ln_rho);
  const Real beta_ln = log_mean_from_logs(a.beta, b.beta, a.ln_beta, b.ln_beta);
  const Real rho_avg = 0.5 * (a.rho + b.rho);
  const Real beta_avg = 0.5 * (a.beta + b.beta);
  const Real p_tilde = rho_avg / (2 * beta_avg);
  const Real usq_avg = 0.5 * (a.usq + b.usq);
  const Real e_term = 1.0 / (2 * (gamma - 1) * beta_ln) - 0.5 * usq_avg;
  Real uavg[3] = {0, 0, 0};
  for (int c = 0; c < dim; ++c) uavg[c] = 0.5 * (a.vel[c] + b.vel[c]);
  for (int r = 0; r < dim; ++r) {
    Real* fr = f[r].data();
    const Real frho = rho_ln * uavg[r];
    fr[0] = frho;
    Real udotm = 0.0;
    for (int s = 0; s < dim; ++s) {
      fr[1 + s] = uavg[s] * frho;
      udotm += uavg[s] * fr[1 + s];
    }
    fr[1 + r] += p_tilde;
    udotm += uavg[r] * p_tilde;
    fr[dim + 1] = e_term * frho + udotm;
    if (dim == 2) fr[4] = 0.0;
  }
}

StateVec chandrashekar_flux(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                            int dir);
StateVec chandrashekar_flux_normal(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                                   const Vec3& n);

StateVec rusanov_flux(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                      const Vec3& n);
StateVec roe_flux_harten(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                         const Vec3& n);

enum class InterfaceDissipation { None, LaxFriedrichs, Roe };

// f* = f#(uL,uR) + 1/2 H [[u]]; with None this is the EC surface flux.
StateVec es_interface_flux(int dim, Real gamma, const StateVec& uL, const StateVec& uR,
                           const Vec3& n, InterfaceDissipation kind);

// same flux from precomputed per-node data (hot path)
StateVec es_interface_flux_nodes(int dim, Real gamma, const FluxNode& a, const FluxNode& b,
                                 const StateVec& uL, const StateVec& uR, const Vec3& n,
                                 InterfaceDissipation kind);

// Viscous flux rows F_v(r,:) for primitive gradients grad(r, comp) =
// d(prim_comp)/dx_r with prim = (u_1..u_d, T).
void viscous_flux(int dim, const GasModel& gas, const StateVec& u, const Mat& grad_prim,
                  Mat& fv);

}  // namespace polydg

#endif
