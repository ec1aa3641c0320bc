#include <iostream>

#include "CLI11.hpp"
#include "hkgame_cli/experiment.hpp"
#include "hkgame/errors.hpp"

namespace {

struct Flags {
  std::string spec_file;
  std::string graph;
  std::string indexing;
  double tf = 0.0;
  std::string r;
  std::string b;
  std::string x0;
  int samples = 0;
  std::string mode;
  std::string out;
  bool with_verification = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--spec", f.spec_file, "JSON experiment spec; other flags override it");
  cmd->add_option("--graph", f.graph, "zachary, k2, p3 or an edge-list path");
  cmd->add_option("--indexing", f.indexing, "edge-list labels: one-based (default) or zero-based");
  cmd->add_option("--tf", f.tf, "horizon t_f");
  cmd->add_option("--r", f.r, "control weight(s): scalar or comma-separated list");
  cmd->add_option("--b", f.b, "input gain(s): scalar or comma-separated list");
  cmd->add_option("--x0", f.x0, "initial opinions: comma-separated list or cluster:<seed>");
  cmd->add_option("--samples", f.samples, "sampling grid size");
  cmd->add_option("--mode", f.mode, "uncontrolled | nash | social | all");
  cmd->add_option("--out", f.out, "output directory");
}

hkgame::cli::ExperimentSpec build_spec(const CLI::App* cmd, const Flags& f) {
  using hkgame::cli::ExperimentSpec;
  ExperimentSpec spec = f.spec_file.empty() ? ExperimentSpec{} : hkgame::cli::load_spec_file(f.spec_file);
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--graph")) spec.graph = f.graph;
  if (given("--indexing")) {
    if (f.indexing == "one-based") {
      spec.indexing = hkgame::Indexing::kOneBased;
    } else if (f.indexing == "zero-based") {
      spec.indexing = hkgame::Indexing::kZeroBased;
    } else {
      throw hkgame::ConfigError("--indexing must be one-based or zero-based");
    }
  }
  if (given("--tf")) spec.horizon = f.tf;
  if (given("--r")) spec.r = hkgame::cli::parse_number_list(f.r);
  if (given("--b")) spec.b = hkgame::cli::parse_number_list(f.b);
  if (given("--x0")) hkgame::cli::apply_x0_argument(spec, f.x0);
  if (given("--samples")) spec.samples = f.samples;
  if (given("--mode")) spec.mode = hkgame::cli::parse_mode(f.mode);
  if (given("--out")) spec.out = f.out;
  if (f.with_verification) spec.with_verification = true;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-loop Nash and social-optimum opinion formation under HK dynamics"};
  app.require_subcommand(1);
  Flags run_flags, verify_flags, info_flags;

  auto* run = app.add_subcommand("run", "solve and export trajectories and diagnostics");
  add_common(run, run_flags);
  run->add_flag("--with-verification", run_flags.with_verification,
                "include oracle and Pontryagin checks in diagnostics.json");
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify, verify_flags);
  auto* info = app.add_subcommand("graph-info", "summarize a graph");
  add_common(info, info_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hkgame::cli::kConfigFailure;
  }

  try {
    if (run->parsed()) return hkgame::cli::run(build_spec(run, run_flags), std::cerr);
    if (verify->parsed()) return hkgame::cli::verify(build_spec(verify, verify_flags), std::cerr);
    return hkgame::cli::graph_info(build_spec(info, info_flags), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return hkgame::cli::kConfigFailure;
  }
}
