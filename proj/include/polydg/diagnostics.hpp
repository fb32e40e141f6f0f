#ifndef POLYDG_DIAGNOSTICS_HPP
#define POLYDG_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "polydg/solver.hpp"

namespace polydg {

// Discrete integral entropy S(t) = sum_e (S(u), J)_e over the mesh.
Real integral_entropy(const Solver& sol, const ModalState& s);

Real domain_volume(const Solver& sol);

// e_k = 1/(2 rho0 u0^2 |Omega|) int rho u.u
Real kinetic_energy(const Solver& sol, const ModalState& s, Real rho0, Real u0);

// eps_S = L^2/(Re u0^2 |Omega|) int omega.omega, vorticity from BR1 gradients
Real solenoidal_dissipation(const Solver& sol, const ModalState& s, Real length, Real reynolds,
                            Real u0);

// per-variable J-weighted L2 norms of u - exact(x, t)
Vec l2_error(const Solver& sol, const ModalState& s,
             const std::function<StateVec(const Vec3&, Real)>& exact);

// J-weighted L2 difference between two states on the same discretization
Vec l2_difference(const Solver& sol, const ModalState& a, const ModalState& b);

struct TimeSeriesRecord {
  Real t = 0;
  Real entropy = 0;
  Real entropy_delta = 0;
  Real kinetic_energy = 0;
  Real solenoidal_dissipation = 0;
};

// full-precision CSV (17 significant digits), one row per record
void write_timeseries_csv(const std::string& path, const std::vector<TimeSeriesRecord>& rows);

struct ConvergenceRow {
  std::string family;
  Real h = 0;
  long dofs = 0;
  Vec l2;     // per conserved variable
  Real eoc = 0;  // vs the previous row of the same family (0 for the first)
};

void write_convergence_csv(const std::string& path, int nvar,
                           const std::vector<ConvergenceRow>& rows);

std::string format_real(Real v);

}  // namespace polydg

#endif
