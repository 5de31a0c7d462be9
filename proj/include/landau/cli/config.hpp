#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "landau/core/params.hpp"
#include "landau/core/point.hpp"
#include "landau/particles/solver.hpp"

namespace landau::cli {

/// Flat `key = value` text; `#` starts a comment, dotted keys name sections.
/// Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source);

enum class Experiment { Particle, Jko, Distance, AuxFixedPoint, EdiAudit, Diagnostics };
std::string_view to_string(Experiment e);

enum class InitKind { Maxwellian, AnisotropicGaussian, Bimodal, File };
std::string_view to_string(InitKind k);

struct InitialData {
  InitKind kind = InitKind::Maxwellian;
  Point mean{0.0, 0.0, 0.0};
  Point temperature{1.0, 1.0, 1.0};
  double separation = 2.0;  ///< bimodal: distance between the two means along axis 1
  double background = 0.0;  ///< grid data: uniform floor, as a fraction of the peak value
  std::string file;
};

inline InitialData bimodal_default() {
  InitialData d;
  d.kind = InitKind::Bimodal;
  return d;
}

/// Resolved run configuration. Every key has a default; unknown keys are rejected.
struct RunConfig {
  Experiment experiment = Experiment::Particle;
  ModelParams model{};
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  // particles
  int particles = 256;
  std::string layout = "random";  ///< random | lattice
  SolverConfig solver{};

  // grids
  int grid_n = 8;
  double half_width = 0.0;  ///< 0 chooses a box holding the initial data

  // grazing metric / JKO
  int K = 8;
  double floor = 1e-10;
  int max_iter = 4000;
  double gtol = 1e-10;
  bool floor_check = true;
  double tau = 0.05;
  int steps = 3;

  // aux flow
  double R1 = 4.0;
  double R2 = 4.0;
  double T_fraction = 0.9;
  int nodes = 32;
  double safety = 1.5;

  InitialData init{};
  InitialData target = bimodal_default();  ///< distance experiment endpoint

  int snapshot_every = 0;  ///< 0: first and last record only

  /// Resolved key/value pairs in manifest order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Parses and validates; throws Error(InvalidArgument, "cli.config", ...).
RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Checks cross-field constraints (model ranges, guardrails known before running).
void validate_run_config(const RunConfig& cfg);

}  // namespace landau::cli
