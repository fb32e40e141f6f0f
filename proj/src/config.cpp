#include "polydg/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "polydg/diagnostics.hpp"

namespace polydg {

InterfaceDissipation RunConfig::interface_kind() const {
  if (interface_flux == "ec") return InterfaceDissipation::None;
  if (interface_flux == "lf") return InterfaceDissipation::LaxFriedrichs;
  if (interface_flux == "roe") return InterfaceDissipation::Roe;
  throw ConfigError("interface flux must be one of ec, lf, roe (got '" + interface_flux + "')");
}

EquationMode RunConfig::equation_mode() const {
  if (mode == "euler") return EquationMode::Euler;
  if (mode == "navier_stokes") return EquationMode::NavierStokes;
  throw ConfigError("mode must be euler or navier_stokes (got '" + mode + "')");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Assigner {
  RunConfig& cfg;

  void operator()(const std::string& section, const std::string& key,
                  const std::string& value) const {
    const std::string sk = section + "." + key;
    try {
      if (sk == "case.type") {
        cfg.case_name = value;
        if (value != "freestream" && value != "convergence_h" && value != "convergence_p" &&
            value != "tgv" && value != "custom") {
          throw ConfigError("unknown case type '" + value +
                            "' (freestream|convergence_h|convergence_p|tgv|custom)");
        }
      } else if (sk == "case.dim") {
        cfg.dim = std::stoi(value);
        if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("dim must be 2 or 3");
      } else if (sk == "case.mode") {
        cfg.mode = value;
        (void)cfg.equation_mode();
      } else if (sk == "discretization.n") {
        cfg.degree = std::stoi(value);
        if (cfg.degree < 1) throw ConfigError("polynomial degree must be at least 1");
      } else if (sk == "discretization.cfl") {
        cfg.cfl = std::stod(value);
        if (!(cfg.cfl > 0)) throw ConfigError("cfl must be positive");
      } else if (sk == "mesh.counts") {
        cfg.counts = std::stoi(value);
      } else if (sk == "mesh.split") {
        cfg.split = split_from_name(value);
      } else if (sk == "mesh.epsilon") {
        cfg.epsilon = std::stod(value);
        if (cfg.epsilon < 0) throw ConfigError("epsilon must be nonnegative");
      } else if (sk == "mesh.length") {
        cfg.length = std::stod(value);
      } else if (sk == "mesh.ngeo") {
        cfg.n_geo = std::stoi(value);
      } else if (sk == "mesh.perturb_pyramids") {
        cfg.perturb_pyramids = (value == "true" || value == "1");
      } else if (sk == "gas.gamma") {
        cfg.gas.gamma = std::stod(value);
        if (!(cfg.gas.gamma > 1)) throw ConfigError("gamma must exceed 1");
      } else if (sk == "gas.prandtl") {
        cfg.gas.prandtl = std::stod(value);
        if (!(cfg.gas.prandtl > 0)) throw ConfigError("prandtl must be positive");
      } else if (sk == "gas.mu") {
        cfg.gas.mu = std::stod(value);
        if (cfg.gas.mu < 0) throw ConfigError("mu must be nonnegative");
      } else if (sk == "gas.cp") {
        cfg.gas.cp = std::stod(value);
      } else if (sk == "flux.volume") {
        cfg.volume_flux = value;
        if (value != "chandrashekar") {
          throw ConfigError("volume flux must be chandrashekar (got '" + value + "')");
        }
      } else if (sk == "flux.interface") {
        cfg.interface_flux = value;
        (void)cfg.interface_kind();
      } else if (sk == "time.t_end") {
        cfg.t_end = std::stod(value);
      } else if (sk == "time.analyze_interval") {
        cfg.analyze_interval = std::stod(value);
      } else if (sk == "output.dir") {
        cfg.output_dir = value;
      } else if (sk == "output.seed") {
        cfg.seed = static_cast<unsigned>(std::stoul(value));
      } else if (sk == "output.threads") {
        cfg.threads = std::stoi(value);
        if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
      } else {
        throw ConfigError("unknown configuration key '" + key + "' in section [" + section +
                          "]");
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("cannot parse value '" + value + "' for " + sk);
    } catch (const std::out_of_range&) {
      throw ConfigError("value '" + value + "' out of range for " + sk);
    }
  }
};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  Assigner assign{cfg};
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    assign(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[case]\n";
  out << "type = " << cfg.case_name << "\n";
  out << "dim = " << cfg.dim << "\n";
  out << "mode = " << cfg.mode << "\n";
  out << "[discretization]\n";
  out << "n = " << cfg.degree << "\n";
  out << "cfl = " << format_real(cfg.cfl) << "\n";
  out << "[mesh]\n";
  out << "counts = " << cfg.counts << "\n";
  out << "split = " << split_name(cfg.split) << "\n";
  out << "epsilon = " << format_real(cfg.epsilon) << "\n";
  out << "length = " << format_real(cfg.length) << "\n";
  out << "ngeo = " << cfg.n_geo << "\n";
  out << "perturb_pyramids = " << (cfg.perturb_pyramids ? "true" : "false") << "\n";
  out << "[gas]\n";
  out << "gamma = " << format_real(cfg.gas.gamma) << "\n";
  out << "prandtl = " << format_real(cfg.gas.prandtl) << "\n";
  out << "mu = " << format_real(cfg.gas.mu) << "\n";
  out << "cp = " << format_real(cfg.gas.cp) << "\n";
  out << "[flux]\n";
  out << "volume = " << cfg.volume_flux << "\n";
  out << "interface = " << cfg.interface_flux << "\n";
  out << "[time]\n";
  out << "t_end = " << format_real(cfg.t_end) << "\n";
  out << "analyze_interval = " << format_real(cfg.analyze_interval) << "\n";
  out << "[output]\n";
  out << "dir = " << cfg.output_dir << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "threads = " << cfg.threads << "\n";
  return out.str();
}

void apply_env_overrides(RunConfig& cfg) {
  // POLYDG_<SECTION>_<KEY> with upper-case names, e.g. POLYDG_MESH_COUNTS
  static const struct {
    const char* env;
    const char* section;
    const char* key;
  } table[] = {
      {"POLYDG_CASE_TYPE", "case", "type"},
      {"POLYDG_CASE_DIM", "case", "dim"},
      {"POLYDG_CASE_MODE", "case", "mode"},
      {"POLYDG_DISCRETIZATION_N", "discretization", "n"},
      {"POLYDG_DISCRETIZATION_CFL", "discretization", "cfl"},
      {"POLYDG_MESH_COUNTS", "mesh", "counts"},
      {"POLYDG_MESH_SPLIT", "mesh", "split"},
      {"POLYDG_MESH_EPSILON", "mesh", "epsilon"},
      {"POLYDG_MESH_LENGTH", "mesh", "length"},
      {"POLYDG_MESH_NGEO", "mesh", "ngeo"},
      {"POLYDG_MESH_PERTURB_PYRAMIDS", "mesh", "perturb_pyramids"},
      {"POLYDG_GAS_GAMMA", "gas", "gamma"},
      {"POLYDG_GAS_PRANDTL", "gas", "prandtl"},
      {"POLYDG_GAS_MU", "gas", "mu"},
      {"POLYDG_GAS_CP", "gas", "cp"},
      {"POLYDG_FLUX_VOLUME", "flux", "volume"},
      {"POLYDG_FLUX_INTERFACE", "flux", "interface"},
      {"POLYDG_TIME_T_END", "time", "t_end"},
      {"POLYDG_TIME_ANALYZE_INTERVAL", "time", "analyze_interval"},
      {"POLYDG_OUTPUT_DIR", "output", "dir"},
      {"POLYDG_OUTPUT_SEED", "output", "seed"},
      {"POLYDG_OUTPUT_THREADS", "output", "threads"},
  };
  Assigner assign{cfg};
  for (const auto& row : table) {
    if (const char* v = std::getenv(row.env)) assign(row.section, row.key, v);
  }
}

}  // namespace polydg
