#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "mplp/instance_io.hpp"
#include "mplp/oracle.hpp"

namespace mplp::cli {

namespace {

std::string join_states(const Assignment& a) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) out += (i ? " " : "") + std::to_string(a[i]);
  return out;
}

const std::map<std::string, InstanceFormat> kFormats{{"native", InstanceFormat::native}, {"uai", InstanceFormat::uai}};
const std::map<std::string, CandidateKind> kCandidates{
    {"triangles", CandidateKind::triangles}, {"squares", CandidateKind::squares}, {"both", CandidateKind::both}};

struct SolveOptions {
  std::string input;
  InstanceFormat format = InstanceFormat::native;
  double zero_floor = kDefaultZeroFloor;
  SolveConfig config;
  std::string schedule = "score";
  std::uint64_t seed = 0;
  std::string trace;
};

struct GenerateOptions {
  GeneratorSpec spec;
  std::string kind = "tree";
  std::vector<double> coupling{0.0, 1.0};
  std::vector<double> field{-1.0, 1.0};
  std::string output;
};

struct OracleOptions {
  std::string input;
  InstanceFormat format = InstanceFormat::native;
  double zero_floor = kDefaultZeroFloor;
  std::size_t limit = kDefaultOracleLimit;
};

void print_report(std::ostream& out, const SolveResult& r, const SolveOptions& o) {
  const auto& c = o.config;
  out << "status: " << to_string(r.status) << "\n"
      << "dual: " << format_real(r.dual) << "\n"
      << "decoded: " << format_real(r.decoded_energy) << "\n"
      << "gap: " << format_real(r.gap()) << "\n"
      << "assignment: " << join_states(r.assignment) << "\n"
      << "clusters_added: " << r.added.size() << "\n"
      << "triplets_registered: " << r.final_state.clusters().size() << "\n";
  for (std::size_t k = 0; k < r.added.size(); ++k)
    out << "added: " << describe(r.added[k]) << " d=" << format_real(r.added_scores[k]) << "\n";
  out << "passes: " << r.passes << "\n"
      << "rounds: " << r.rounds << "\n"
      << "config: initial_pass_cap=" << c.initial_pass_cap << " inner_iters=" << c.inner_iters
      << " clusters_per_round=" << c.clusters_per_round << " tol=" << format_real(c.gap_tolerance)
      << " convergence=" << format_real(c.convergence_threshold) << " max_rounds=" << c.max_rounds
      << " candidates=" << to_string(c.candidate_kind) << " schedule=" << o.schedule << "\n"
      << "seed: " << o.seed << "\n"
      << "wall_ms: " << r.ms << "\n";
}

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  check_config(o.config);
  const auto model = load_model(o.input, o.format, o.zero_floor);
  if (auto diags = validate(model); !diags.empty()) {
    for (const auto& d : diags) err << "error: " << d.message << "\n";
    return kExitUsage;
  }
  const auto result = o.schedule == "random" ? solve_random_schedule(model, o.config, o.seed) : solve(model, o.config);
  print_report(out, result, o);
  if (!o.trace.empty()) {
    std::ofstream f(o.trace, std::ios::binary);
    if (!f) {
      err << "error: cannot write trace '" << o.trace << "'\n";
      return kExitUsage;
    }
    f << format_trace_csv(result.trace);
  }
  return result.status == SolveStatus::certified ? kExitCertified : kExitGap;
}

int cmd_generate(GenerateOptions o, std::ostream& out, std::ostream& err) {
  o.spec.kind = parse_generator_kind(o.kind);
  o.spec.coupling = {o.coupling[0], o.coupling[1]};
  o.spec.field = {o.field[0], o.field[1]};
  const auto text = write_native(generate(o.spec));
  if (o.output.empty()) {
    out << text;
    return 0;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << o.output << "'\n";
    return kExitUsage;
  }
  f << text;
  return 0;
}

int cmd_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  const auto model = load_model(o.input, o.format, o.zero_floor);
  try {
    const auto r = brute_force_map(model, o.limit);
    out << "energy: " << format_real(r.energy) << "\n"
        << "assignment: " << join_states(r.best) << "\n"
        << "optima: " << r.optima << "\n";
  } catch (const StateSpaceTooLarge& e) {
    err << "error: too large: " << e.what() << "\n";
    return kExitGap;
  }
  return 0;
}

}  // namespace

std::string format_trace_csv(const SolveTrace& trace) {
  std::ostringstream os;
  os << kTraceHeader << "\n";
  for (const auto& ev : trace.events) {
    os << to_string(ev.kind) << "," << ev.pass << "," << format_real(ev.dual) << "," << format_real(ev.decoded) << ","
       << ev.clusters << ",";
    if (ev.kind == TraceEvent::Kind::cluster_added) os << format_real(ev.d_c);
    os << "," << ev.ms << "\n";
  }
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MAP inference by MPLP with cluster pursuit", "mplp"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a model and print a run report");
  solve_cmd->add_option("--input", so.input, "Instance file")->required();
  solve_cmd->add_option("--format", so.format, "native|uai")->transform(CLI::CheckedTransformer(kFormats));
  solve_cmd->add_option("--zero-floor", so.zero_floor, "Log value for zero UAI entries");
  solve_cmd->add_option("--tol", so.config.gap_tolerance, "Certificate gap tolerance");
  solve_cmd->add_option("--convergence", so.config.convergence_threshold, "Per-pass dual decrease treated as converged");
  solve_cmd->add_option("--initial-pass-cap", so.config.initial_pass_cap, "Edge-only pass limit");
  solve_cmd->add_option("--inner-iters", so.config.inner_iters, "Passes after each round of additions");
  solve_cmd->add_option("--clusters-per-round", so.config.clusters_per_round, "Candidates added per round");
  solve_cmd->add_option("--candidates", so.config.candidate_kind, "triangles|squares|both")
      ->transform(CLI::CheckedTransformer(kCandidates));
  solve_cmd->add_option("--schedule", so.schedule, "score|random")->check(CLI::IsMember({"score", "random"}));
  solve_cmd->add_option("--seed", so.seed, "Seed for the random schedule");
  solve_cmd->add_option("--trace", so.trace, "Write the trace CSV here");
  solve_cmd->add_option("--max-rounds", so.config.max_rounds, "Round limit (0: edge-only)");

  GenerateOptions go;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic instance in native format");
  gen_cmd->add_option("--kind", go.kind, "tree|grid_potts|spin_glass_grid|random_complete")
      ->check(CLI::IsMember({"tree", "grid_potts", "spin_glass_grid", "random_complete"}));
  gen_cmd->add_option("--n", go.spec.n, "Variable count (tree, random_complete)");
  gen_cmd->add_option("--rows", go.spec.rows, "Grid rows");
  gen_cmd->add_option("--cols", go.spec.cols, "Grid columns");
  gen_cmd->add_option("--states", go.spec.states, "States per variable");
  gen_cmd->add_option("--states-max", go.spec.states_max, "Upper end of a per-variable state range");
  gen_cmd->add_option("--coupling", go.coupling, "Coupling range LO HI")->expected(2);
  gen_cmd->add_option("--field", go.field, "Field range LO HI")->expected(2);
  gen_cmd->add_option("--seed", go.spec.seed, "Seed");
  gen_cmd->add_option("--output", go.output, "Output file (default stdout)");

  OracleOptions oo;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact MAP by enumeration");
  oracle_cmd->add_option("--input", oo.input, "Instance file")->required();
  oracle_cmd->add_option("--format", oo.format, "native|uai")->transform(CLI::CheckedTransformer(kFormats));
  oracle_cmd->add_option("--zero-floor", oo.zero_floor, "Log value for zero UAI entries");
  oracle_cmd->add_option("--limit", oo.limit, "Largest state space to enumerate");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(so, out, err);
    if (gen_cmd->parsed()) return cmd_generate(go, out, err);
    return cmd_oracle(oo, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace mplp::cli
