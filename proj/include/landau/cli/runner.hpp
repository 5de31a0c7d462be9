#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "landau/cli/config.hpp"
#include "landau/core/error.hpp"
#include "landau/core/measures.hpp"

namespace landau::cli {

inline constexpr const char* kVersion = "1.0.0";

/// 0 success, 2 validation error, 3 solver failure (NotConverged, StepDiverged and the
/// other runtime kinds).
int exit_code(ErrorKind kind);

/// `%.17g`.
std::string format_double(double v);

/// Writes diagnostics.csv for a trajectory; edi holds one value per record.
void write_diagnostics(const std::filesystem::path& file, int d, const Trajectory& traj, const std::vector<double>& edi);
void write_state(const std::filesystem::path& file, const State& state);
State read_state(const std::filesystem::path& file, int d, const GridSpec& grid);

/// Builds the experiment's initial measure.
ParticleEnsemble make_particles(const RunConfig& cfg, const InitialData& init);
GridDensity make_grid_density(const RunConfig& cfg, const InitialData& init);
GridSpec experiment_grid(const RunConfig& cfg);

/// Subcommands; messages go to `out`, `ERROR <module>.<op>: <message>` lines to `err`.
int run_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int validate_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int compare_command(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b, std::ostream& out,
                    std::ostream& err);

/// Runs a parsed configuration; throws landau::Error.
void execute(const RunConfig& cfg, std::ostream& out);

}  // namespace landau::cli
