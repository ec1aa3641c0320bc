#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hkgame/dynamics.hpp"
#include "hkgame/graph.hpp"

namespace hkgame::cli {

enum class Mode { kUncontrolled, kNash, kSocial, kAll };

Mode parse_mode(const std::string& text);
const char* to_string(Mode mode);

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kConfigFailure = 1,
  kSolverFailure = 2,
  kVerificationFailure = 3,
};

struct ExperimentSpec {
  /// Bundled name (zachary, k2, p3) or an edge-list path.
  std::string graph = "zachary";
  Indexing indexing = Indexing::kOneBased;
  double horizon = 10.0;
  /// One entry broadcasts to every agent.
  std::vector<double> r{1.0};
  std::vector<double> b{1.0};
  /// Explicit initial opinions; when empty the two-cluster sampler is used.
  std::optional<std::vector<double>> x0;
  std::uint64_t seed = 0;
  int samples = kDefaultSamples;
  Mode mode = Mode::kAll;
  std::filesystem::path out = "hkgame_out";
  bool with_verification = false;
};

/// "1.5" or "1,2,3". Throws ConfigError on malformed numbers.
std::vector<double> parse_number_list(const std::string& text);
/// Applies an --x0 argument: "cluster:<seed>" or a comma-separated list.
void apply_x0_argument(ExperimentSpec& spec, const std::string& text);

/// Reads a JSON spec; absent keys keep their defaults.
ExperimentSpec spec_from_json(const nlohmann::json& j);
ExperimentSpec load_spec_file(const std::filesystem::path& path);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

SocialGraph resolve_graph(const ExperimentSpec& spec);
/// Validated game configuration for the spec.
GameConfig make_config(const ExperimentSpec& spec);

/// "t,x1,...,xn" (or with `prefix` u) followed by one row per sample, 17
/// significant digits.
std::string trajectory_csv(const std::vector<double>& times, const Eigen::MatrixXd& values,
                           char prefix);

/// Writes trajectory CSVs, diagnostics.json and plot_data.csv into spec.out.
/// Returns the process exit code; messages go to `err`.
int run(const ExperimentSpec& spec, std::ostream& err);

/// Runs every verification check and writes verification.json. Exit code 0
/// only when all asserted checks pass.
int verify(const ExperimentSpec& spec, std::ostream& err);

/// Prints a JSON summary of the graph to `out`.
int graph_info(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace hkgame::cli
