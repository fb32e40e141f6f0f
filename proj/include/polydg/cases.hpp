#ifndef POLYDG_CASES_HPP
#define POLYDG_CASES_HPP

#include "polydg/config.hpp"
#include "polydg/diagnostics.hpp"

namespace polydg {

// ----------------------------------------------------------------- freestream
// Constant state rho = 1, u = 0.3 e1, p = 17.857 advanced for ten steps on a
// curvilinear mesh; reports the per-variable L2 change and the magnitude of
// the lifted gradients of the constant state.
struct FreestreamResult {
  int degree = 0;
  int n_elements = 0;
  Vec l2;         // per conserved variable
  Real br1_max = 0.0;
  Real state_energy = 0.0;
};

StateVec freestream_state(int dim, Real gamma);
FreestreamResult run_freestream(const RunConfig& cfg);

// ---------------------------------------------------------------- convergence
// Manufactured sinusoidal density wave with its source term, run to t = 0.1.
ConvergenceRow run_manufactured_case(const RunConfig& cfg);

// h-study over a list of cell counts at fixed degree; rows carry EOC values
std::vector<ConvergenceRow> run_convergence_h(const RunConfig& base,
                                              const std::vector<int>& counts);

// p-study on a fixed mesh over a list of degrees; h column holds the degree
std::vector<ConvergenceRow> run_convergence_p(const RunConfig& base,
                                              const std::vector<int>& degrees);

// ------------------------------------------------------------------------ tgv
// Weakly compressible Taylor-Green vortex on [0, 2 pi L]^3 at Mach 0.1.
struct TgvSetup {
  Real mach = 0.1;
  Real rho0 = 1.0;
  Real u0 = 1.0;
  Real length = 1.0;  // characteristic length L
  Real reynolds = 0.0;  // 0: inviscid
};

StateVec tgv_state(const TgvSetup& tgv, Real gamma, const Vec3& x);
Real tgv_pressure0(const TgvSetup& tgv, Real gamma);

struct TgvResult {
  std::vector<TimeSeriesRecord> series;
  Real dt_used = 0.0;
};

TgvResult run_tgv(const RunConfig& cfg, const TgvSetup& tgv, Real fixed_dt = 0.0);

// driver used by the CLI: builds the case from the config alone, writes the
// CSV artifacts into cfg.output_dir, returns a human-readable summary
std::string run_case(const RunConfig& cfg);

}  // namespace polydg

#endif
