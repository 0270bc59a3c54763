#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wellclust/gen.hpp"

namespace wellclust {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,       ///< bad arguments, unreadable input, invalid parameters
  kExitDegenerate = 3,  ///< structure matrix singular
  kExitCheckFailed = 4,
  kExitPipeline = 5,  ///< solver did not converge or every seeding attempt failed
};

/// Everything needed to reproduce a run.
struct RunConfig {
  std::string command;
  std::filesystem::path input;
  std::optional<GenSpec> gen;
  std::filesystem::path reference;
  int k = 0;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double epsilon = 0.45;
  std::optional<double> delta;
  double t_max = 0.0;  ///< 0 means n^3
  std::optional<double> core_alpha;
  std::string pipeline = "spectral";
  std::filesystem::path out_dir = ".";
  std::string format = "json";
  std::vector<int> bench_sizes;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Writes <name>.edges, <name>.partition and <name>.manifest.json to out_dir.
int cmd_generate(const GenSpec& spec, const std::filesystem::path& out_dir,
                 const std::string& name, std::ostream& log);
/// Writes partition.txt and report.<format> to cfg.out_dir.
int cmd_cluster(const RunConfig& cfg, std::ostream& log);
/// Writes certify.<format> to cfg.out_dir.
int cmd_certify(const RunConfig& cfg, std::ostream& log);
/// Times the fast pipeline on planted_partition graphs with k = 4; writes bench.<format>.
int cmd_bench(const RunConfig& cfg, std::ostream& log);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wellclust
