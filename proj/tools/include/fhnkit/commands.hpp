#pragma once

// Subcommands of fhnkit, callable without a process boundary.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fhn/serialize.hpp"

namespace fhnkit {

using fhn::Json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIntegrator = 3;

struct GlobalOptions {
  std::filesystem::path config;  // empty = none
  std::filesystem::path out = ".";
  int threads = 1;
  unsigned long long seed = 0;  // reserved
};

struct RunConfig {
  fhn::Params params;
  fhn::State initial_state;
  fhn::IntegratorConfig integrator;
  Json analyses = Json::array();  // names or {"name": ..., options}
  std::filesystem::path output_dir = ".";
};

/// Throws fhn::Error(InvalidConfig) on malformed input or unknown analyses.
RunConfig run_config_from_json(const Json& j);
Json load_json(const std::filesystem::path& path);

/// Runs the listed analyses on a trajectory. Analysis failures (e.g. too
/// few oscillations) are recorded as {"error": ...} entries.
Json run_analyses(const fhn::Trajectory& traj, const fhn::Params& p, const Json& analyses);

/// Folded equilibria on all four fold boundaries plus the four double folds.
Json folds_report(const fhn::Params& p);

Json equilibria_report(const fhn::Params& p);

struct SweepAxis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
  double value(int i) const;
};

/// Writes the sweep CSV. Grid spec: {"params": base, "grid": {"b": [lo, hi, n] | value, ...},
/// "mmo_run": optional {"initial_state", "t_end", "t_from", "variable"}}.
void sweep(const Json& spec, int threads, std::ostream& csv);

std::vector<std::string> figure_ids();

/// Exit-code wrappers; messages go to `err`.
int cmd_simulate(const GlobalOptions& g, std::ostream& err);
int cmd_folds(const GlobalOptions& g, const fhn::Params& p, std::ostream& out, std::ostream& err);
int cmd_equilibria(const GlobalOptions& g, const fhn::Params& p, std::ostream& out, std::ostream& err);
int cmd_sweep(const GlobalOptions& g, std::ostream& err);
int cmd_reproduce(const GlobalOptions& g, const std::string& figure,
                  const std::filesystem::path& recipe_dir, std::ostream& err);

/// Whole command line; used by main and by the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fhnkit
