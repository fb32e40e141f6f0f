#ifndef POLYDG_CONFIG_HPP
#define POLYDG_CONFIG_HPP

#include <string>

#include "polydg/mesh.hpp"
#include "polydg/solver.hpp"

namespace polydg {

// Plain-text run configuration (sections of key = value pairs).
struct RunConfig {
  std::string case_name = "custom";  // freestream|convergence_h|convergence_p|tgv|custom

  int dim = 3;
  int degree = 4;
  Real cfl = 0.5;
  std::string mode = "euler";  // euler|navier_stokes

  // mesh
  int counts = 4;
  SplitKind split = SplitKind::Hex;
  Real epsilon = 0.0;
  Real length = 1.0;
  int n_geo = 1;
  bool perturb_pyramids = false;

  GasModel gas;

  // flux
  std::string volume_flux = "chandrashekar";
  std::string interface_flux = "lf";  // ec|lf|roe

  // time
  Real t_end = 1.0;
  Real analyze_interval = 0.1;

  // output
  std::string output_dir = "out";
  unsigned seed = 0;
  int threads = 1;

  InterfaceDissipation interface_kind() const;
  EquationMode equation_mode() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// POLYDG_<SECTION>_<KEY>=value environment overrides
void apply_env_overrides(RunConfig& cfg);

}  // namespace polydg

#endif
