#include "hkgame_cli/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hkgame/errors.hpp"
#include "hkgame/nash.hpp"
#include "hkgame/random.hpp"
#include "hkgame/social.hpp"
#include "hkgame/verification.hpp"

namespace hkgame::cli {
namespace {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::VectorXd broadcast(const std::vector<double>& values, int n, const char* name) {
  if (values.size() == 1) return Eigen::VectorXd::Constant(n, values.front());
  if (static_cast<int>(values.size()) != n) {
    throw ConfigError(std::string(name) + " has " + std::to_string(values.size()) +
                      " entries but the graph has " + std::to_string(n) + " agents");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), n);
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

struct ModeOutput {
  std::string name;
  const Trajectory* trajectory;
};

std::string plot_data_csv(const std::vector<ModeOutput>& outputs) {
  std::string csv = "mode,t,agent,x,u\n";
  for (const auto& [name, traj] : outputs) {
    for (std::size_t k = 0; k < traj->times.size(); ++k) {
      for (Eigen::Index i = 0; i < traj->opinions.cols(); ++i) {
        const double u = traj->controls ? (*traj->controls)(k, i) : 0.0;
        csv += name + ',' + format_number(traj->times[k]) + ',' + std::to_string(i + 1) + ',' +
               format_number(traj->opinions(k, i)) + ',' + format_number(u) + '\n';
      }
    }
  }
  return csv;
}

json report_json(const VerificationReport& r, const std::string& subject) {
  json details = json::array();
  for (const auto& d : r.details) {
    details.push_back({{"agent", d.agent},
                       {"time", d.time},
                       {"seed", d.seed},
                       {"residual", d.residual}});
  }
  return {{"name", r.name},         {"subject", subject},       {"max_residual", r.max_residual},
          {"tolerance", r.tolerance}, {"passed", r.passed},     {"asserted", r.asserted},
          {"details", details}};
}

json trajectory_summary(const Trajectory& traj) {
  return {{"provenance", to_string(traj.provenance)},
          {"final_state", to_vector(traj.final_state())},
          {"final_spread", spread(traj.final_state())}};
}

bool wants(Mode selected, Mode m) { return selected == Mode::kAll || selected == m; }

// Maps library exceptions onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SingularSystemError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const ParseError& e) {
    err << "edge list error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const GraphError& e) {
    err << "graph error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const json::exception& e) {
    err << "spec error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "uncontrolled") return Mode::kUncontrolled;
  if (text == "nash") return Mode::kNash;
  if (text == "social") return Mode::kSocial;
  if (text == "all") return Mode::kAll;
  throw ConfigError("unknown mode '" + text + "' (expected uncontrolled, nash, social or all)");
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kUncontrolled:
      return "uncontrolled";
    case Mode::kNash:
      return "nash";
    case Mode::kSocial:
      return "social";
    case Mode::kAll:
      return "all";
  }
  return "all";
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("'" + item + "' is not a number");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw ConfigError("'" + item + "' is not a number");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("empty number list");
  return values;
}

void apply_x0_argument(ExperimentSpec& spec, const std::string& text) {
  constexpr std::string_view kCluster = "cluster:";
  if (text.rfind(kCluster, 0) == 0) {
    const std::string seed = text.substr(kCluster.size());
    try {
      std::size_t used = 0;
      spec.seed = std::stoull(seed, &used);
      if (used != seed.size()) throw std::invalid_argument(seed);
    } catch (const std::exception&) {
      throw ConfigError("bad cluster seed '" + seed + "'");
    }
    spec.x0.reset();
    return;
  }
  spec.x0 = parse_number_list(text);
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec spec;
  auto numbers = [](const json& v) {
    return v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
  };
  if (j.contains("graph")) spec.graph = j.at("graph").get<std::string>();
  if (j.contains("indexing")) {
    const auto s = j.at("indexing").get<std::string>();
    if (s == "one-based") {
      spec.indexing = Indexing::kOneBased;
    } else if (s == "zero-based") {
      spec.indexing = Indexing::kZeroBased;
    } else {
      throw ConfigError("indexing must be one-based or zero-based");
    }
  }
  if (j.contains("tf")) spec.horizon = j.at("tf").get<double>();
  if (j.contains("r")) spec.r = numbers(j.at("r"));
  if (j.contains("b")) spec.b = numbers(j.at("b"));
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("x0")) {
    const auto& x0 = j.at("x0");
    if (x0.is_string()) {
      apply_x0_argument(spec, x0.get<std::string>());
    } else {
      spec.x0 = x0.get<std::vector<double>>();
    }
  }
  if (j.contains("samples")) spec.samples = j.at("samples").get<int>();
  if (j.contains("mode")) spec.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("out")) spec.out = j.at("out").get<std::string>();
  if (j.contains("verify")) spec.with_verification = j.at("verify").get<bool>();
  return spec;
}

ExperimentSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file '" + path.string() + "'");
  return spec_from_json(json::parse(in));
}

json spec_to_json(const ExperimentSpec& spec) {
  json j = {{"graph", spec.graph},
            {"indexing", spec.indexing == Indexing::kOneBased ? "one-based" : "zero-based"},
            {"tf", spec.horizon},
            {"r", spec.r},
            {"b", spec.b},
            {"seed", spec.seed},
            {"samples", spec.samples},
            {"mode", to_string(spec.mode)}};
  if (spec.x0) {
    j["x0"] = *spec.x0;
  } else {
    j["x0"] = "cluster:" + std::to_string(spec.seed);
  }
  return j;
}

SocialGraph resolve_graph(const ExperimentSpec& spec) {
  if (spec.graph == "zachary" || spec.graph == "karate") return zachary_karate_club();
  if (spec.graph == "k2") return SocialGraph(2, {{0, 1}});
  if (spec.graph == "p3") return SocialGraph(3, {{0, 1}, {1, 2}});
  return load_edge_list_file(spec.graph, spec.indexing);
}

GameConfig make_config(const ExperimentSpec& spec) {
  SocialGraph g = resolve_graph(spec);
  const int n = g.size();
  GameConfig cfg{g, spec.horizon, broadcast(spec.r, n, "r"), broadcast(spec.b, n, "b"),
                 spec.x0 ? broadcast(*spec.x0, n, "x0") : two_cluster_opinions(n, spec.seed),
                 spec.samples};
  if (spec.x0 && spec.x0->size() != static_cast<std::size_t>(n)) {
    throw ConfigError("x0 must list one opinion per agent");
  }
  cfg.validate();
  return cfg;
}

std::string trajectory_csv(const std::vector<double>& times, const Eigen::MatrixXd& values,
                           char prefix) {
  std::string csv = "t";
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    csv += ',';
    csv += prefix;
    csv += std::to_string(i + 1);
  }
  csv += '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv += format_number(times[k]);
    for (Eigen::Index i = 0; i < values.cols(); ++i) csv += ',' + format_number(values(k, i));
    csv += '\n';
  }
  return csv;
}

int run(const ExperimentSpec& spec, std::ostream& err) {
  return guarded(err, [&] {
    const GameConfig cfg = make_config(spec);
    std::filesystem::create_directories(spec.out);
    json diag = {{"graph", {{"source", spec.graph},
                            {"agents", cfg.agents()},
                            {"edges", cfg.graph.edges().size()}}},
                 {"spec", spec_to_json(spec)},
                 {"x0", to_vector(cfg.x0)},
                 {"initial_spread", spread(cfg.x0)}};
    std::vector<ModeOutput> outputs;
    std::optional<Trajectory> uncontrolled;
    std::optional<NashSolution> nash;
    std::optional<SocialSolution> social;

    if (wants(spec.mode, Mode::kUncontrolled)) {
      uncontrolled = uncontrolled_closed_form(cfg);
      write_file(spec.out / "uncontrolled.csv",
                 trajectory_csv(uncontrolled->times, uncontrolled->opinions, 'x'));
      diag["uncontrolled"] = trajectory_summary(*uncontrolled);
      outputs.push_back({"uncontrolled", &*uncontrolled});
    }
    if (wants(spec.mode, Mode::kNash)) {
      nash = solve(cfg);
      const Trajectory& traj = nash->trajectory();
      write_file(spec.out / "nash.csv", trajectory_csv(traj.times, traj.opinions, 'x'));
      write_file(spec.out / "nash_controls.csv", trajectory_csv(traj.times, *traj.controls, 'u'));
      json j = trajectory_summary(traj);
      j["H_condition"] = nash->H_condition();
      j["terminal_state"] = to_vector(nash->terminal_state());
      j["costs"] = nash->costs();
      j["social_cost"] = evaluate_social_cost(cfg, traj);
      diag["nash"] = j;
      outputs.push_back({"nash", &traj});
    }
    if (wants(spec.mode, Mode::kSocial)) {
      social = solve_social(cfg);
      const Trajectory& traj = social->trajectory();
      write_file(spec.out / "social.csv", trajectory_csv(traj.times, traj.opinions, 'x'));
      write_file(spec.out / "social_controls.csv",
                 trajectory_csv(traj.times, *traj.controls, 'u'));
      json j = trajectory_summary(traj);
      j["H_hat_condition"] = social->condition();
      j["terminal_state"] = to_vector(social->terminal_state());
      j["social_cost"] = social->social_cost();
      diag["social"] = j;
      outputs.push_back({"social", &traj});
    }
    if (nash && social) {
      diag["gap"] = {{"social_cost_at_social", social->social_cost()},
                     {"social_cost_at_nash", evaluate_social_cost(cfg, nash->trajectory())}};
    }
    if (spec.with_verification) {
      json checks = json::array();
      if (nash) {
        checks.push_back(report_json(check_trajectory_oracle(*nash), "nash"));
        for (const auto& r : check_pontryagin(*nash).all()) checks.push_back(report_json(r, "nash"));
      }
      if (social) {
        checks.push_back(report_json(check_trajectory_oracle(*social), "social"));
        for (const auto& r : check_pontryagin(*social).all()) {
          checks.push_back(report_json(r, "social"));
        }
      }
      diag["verification"] = checks;
    }
    write_file(spec.out / "plot_data.csv", plot_data_csv(outputs));
    write_file(spec.out / "diagnostics.json", diag.dump(2) + "\n");
    return static_cast<int>(kSuccess);
  });
}

int verify(const ExperimentSpec& spec, std::ostream& err) {
  return guarded(err, [&] {
    const GameConfig cfg = make_config(spec);
    std::filesystem::create_directories(spec.out);
    const NashSolution nash = solve(cfg);
    const SocialSolution social = solve_social(cfg);
    const auto agents = default_probe_agents(cfg.agents());

    std::vector<std::pair<VerificationReport, std::string>> reports;
    reports.emplace_back(check_trajectory_oracle(nash), "nash");
    for (auto& r : check_pontryagin(nash).all()) reports.emplace_back(std::move(r), "nash");
    auto deviation = check_nash_deviation(nash, agents, 20, 1e-3, spec.seed);
    reports.emplace_back(std::move(deviation.decrease), "nash");
    reports.emplace_back(std::move(deviation.gradient), "nash");
    reports.emplace_back(check_trajectory_oracle(social), "social");
    for (auto& r : check_pontryagin(social).all()) reports.emplace_back(std::move(r), "social");
    reports.emplace_back(check_social_minimizer(social, 20, 1e-3, spec.seed), "social");

    json checks = json::array();
    bool ok = true;
    for (const auto& [r, subject] : reports) {
      checks.push_back(report_json(r, subject));
      if (r.asserted && !r.passed) {
        ok = false;
        err << "FAILED " << subject << '/' << r.name << ": residual " << r.max_residual
            << " > tolerance " << r.tolerance << '\n';
      }
    }
    json locality = json::array();
    for (int i : agents) {
      const LocalityProbe probe = locality_probe(nash, i);
      locality.push_back({{"agent", i},
                          {"sensitivities", to_vector(probe.sensitivities)},
                          {"non_local_agents", probe.non_local},
                          {"non_local_count", probe.non_local.size()},
                          {"threshold", probe.threshold},
                          {"translation_sensitivity", probe.translation_sensitivity}});
    }
    json doc = {{"spec", spec_to_json(spec)},
                {"passed", ok},
                {"checks", checks},
                {"locality_probe", locality}};
    write_file(spec.out / "verification.json", doc.dump(2) + "\n");
    return static_cast<int>(ok ? kSuccess : kVerificationFailure);
  });
}

int graph_info(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SocialGraph g = resolve_graph(spec);
    std::vector<int> degree(g.size());
    for (int i = 0; i < g.size(); ++i) degree[i] = g.degree(i);
    const Eigen::MatrixXd lambda = dynamics_matrix(g);
    const Eigen::VectorXcd eig = lambda.eigenvalues();
    double slowest = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
      if (std::abs(eig(k).real()) > 1e-12) slowest = std::max(slowest, eig(k).real());
    }
    json info = {{"source", spec.graph},
                 {"agents", g.size()},
                 {"edges", g.edges().size()},
                 {"connected", true},
                 {"degrees", degree},
                 {"min_degree", *std::min_element(degree.begin(), degree.end())},
                 {"max_degree", *std::max_element(degree.begin(), degree.end())},
                 {"slowest_nonzero_mode", slowest}};
    out << info.dump(2) << '\n';
    return static_cast<int>(kSuccess);
  });
}

}  // namespace hkgame::cli
