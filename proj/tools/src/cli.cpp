#include "popgame/cli.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "popgame/errors.hpp"
#include "popgame/games.hpp"
#include "popgame/io.hpp"
#include "popgame/pavcheck.hpp"
#include "popgame/predicate.hpp"
#include "popgame/sim.hpp"
#include "popgame/stdlib.hpp"
#include "popgame/verify.hpp"

namespace popgame::cli {

namespace {

using nlohmann::json;

constexpr std::string_view kBuiltinPrefix = "builtin:";

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        items.push_back(std::move(current));
        current.clear();
      }
    } else {
      current += c;
    }
  }
  if (!current.empty()) {
    items.push_back(std::move(current));
  }
  return items;
}

// A path, or builtin:<key> for a stdlib artifact.
Protocol load_protocol(const std::string &source) {
  if (source.starts_with(kBuiltinPrefix)) {
    return builtin_protocol(source.substr(kBuiltinPrefix.size()));
  }
  return parse_protocol(read_file(source));
}

Game load_game(const std::string &source) {
  if (source.starts_with(kBuiltinPrefix)) {
    return builtin_game(source.substr(kBuiltinPrefix.size()));
  }
  return parse_game(read_file(source));
}

MatchMode parse_mode(const std::string &text) {
  return text == "subset" ? MatchMode::Subset : MatchMode::Exact;
}

std::string_view mode_name(MatchMode mode) { return mode == MatchMode::Exact ? "exact" : "subset"; }

json witness_json(const Witness &w) {
  json rows = json::array();
  for (StateId i = 0; i < w.strategy_count; ++i) {
    json row = json::array();
    for (StateId j = 0; j < w.strategy_count; ++j) {
      row.push_back(w.at(i, j));
    }
    rows.push_back(std::move(row));
  }
  return {{"matrix", std::move(rows)}, {"threshold", w.threshold}};
}

std::string range_text(SizeRange sizes) {
  return std::to_string(sizes.min) + ".." + std::to_string(sizes.max);
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
  std::string file;
  bool pavlovian = false;
  std::string mode;
  bool json = false;
};

int cmd_check(const CheckArgs &args, std::ostream &out) {
  const Protocol protocol = load_protocol(args.file);
  const bool deterministic = is_deterministic(protocol);
  const auto asymmetry = find_asymmetry(protocol);

  json report = {
      {"protocol", protocol.name()},
      {"states", protocol.states()},
      {"deterministic", deterministic},
      {"symmetric", !asymmetry.has_value()},
  };
  std::ostringstream text;
  text << "protocol " << protocol.name() << " (" << protocol.state_count() << " states)\n";
  text << "deterministic: " << (deterministic ? "yes" : "no") << "\n";
  text << "symmetric: " << (asymmetry ? "no" : "yes") << "\n";

  int code = kOk;
  if (args.pavlovian) {
    const MatchMode mode = args.mode.empty() ? default_mode(protocol) : parse_mode(args.mode);
    const PavlovianResult result = check_pavlovian(protocol, mode);
    report["mode"] = mode_name(mode);
    if (const auto *w = std::get_if<Witness>(&result)) {
      report["pavlovian"] = true;
      report["witness"] = witness_json(*w);
      text << "pavlovian: yes (mode " << mode_name(mode) << ")\n";
      text << print_game(w->to_game(protocol.name() + "-witness", protocol.states()));
    } else {
      const auto &failure = std::get<NotPavlovian>(result);
      report["pavlovian"] = false;
      report["reason"] = failure.describe(protocol);
      text << "pavlovian: no (mode " << mode_name(mode) << ")\n";
      text << failure.describe(protocol) << "\n";
      code = kPropertyFails;
    }
  }
  if (args.json) {
    out << report.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return code;
}

// ---- derive ---------------------------------------------------------------

struct DeriveArgs {
  std::string file;
  std::string tie_break = "all";
  std::string inputs;
  std::string outputs;
};

int cmd_derive(const DeriveArgs &args, std::ostream &out) {
  const Game game = load_game(args.file);
  const TieBreak mode = args.tie_break == "lowest" ? TieBreak::LowestIndex : TieBreak::AllTies;
  Protocol protocol = derive_protocol(game, mode);
  if (!args.inputs.empty() || !args.outputs.empty()) {
    // Reuse the file grammar for the attached iota/omega.
    std::string text = print_protocol(protocol);
    for (const auto &[flag, value] : {std::pair{"inputs", &args.inputs}, std::pair{"outputs", &args.outputs}}) {
      if (!value->empty()) {
        text += flag;
        for (const auto &item : split_list(*value)) {
          text += ' ' + item;
        }
        text += '\n';
      }
    }
    try {
      protocol = parse_protocol(text);
    } catch (const ParseError &e) {
      throw UsageError(std::string("--inputs/--outputs: ") + e.what());
    }
  }
  out << print_protocol(protocol);
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string file;
  std::string input;
  std::string init_states;
  std::uint32_t n = 0;
  std::string graph = "complete";
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 1'000'000;
  std::size_t trials = 1;
  std::string stop = "silent";
  std::string csv;
  std::string json;
  std::size_t threads = 0;
};

Configuration initial_from_states(const Protocol &protocol, const std::string &text, std::uint32_t n) {
  std::vector<std::uint32_t> counts(protocol.state_count(), 0);
  if (text.starts_with("all-")) {
    if (n < 2) {
      throw UsageError("--init-states all-<state> needs --n of at least 2");
    }
    counts[protocol.state_id(text.substr(4))] = n;
  } else {
    for (const auto &[state, count] : parse_counts(text)) {
      counts[protocol.state_id(state)] += count;
    }
  }
  return Configuration(std::move(counts));
}

StopRule parse_stop(const Protocol &protocol, const std::string &text) {
  if (text == "silent") {
    return StopRule::silent();
  }
  if (text.starts_with("window:")) {
    const std::string w = text.substr(7);
    std::size_t window = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), window);
    if (ec != std::errc{} || ptr != w.data() + w.size() || window == 0) {
      throw UsageError("--stop window:<w> needs a positive integer");
    }
    return StopRule::output_window(window);
  }
  if (text.starts_with("all:")) {
    return StopRule::all_in(protocol, text.substr(4));
  }
  throw UsageError("--stop must be silent, window:<w> or all:<state>");
}

int cmd_simulate(const SimulateArgs &args, std::ostream &out) {
  if (args.trials == 0) {
    throw UsageError("--trials must be at least 1");
  }
  if (args.input.empty() == args.init_states.empty()) {
    throw UsageError("give exactly one of --input and --init-states");
  }
  const Protocol protocol = load_protocol(args.file);
  const Configuration init = args.input.empty() ? initial_from_states(protocol, args.init_states, args.n)
                                                : initial_config(protocol, parse_counts(args.input));
  const auto population = static_cast<std::size_t>(init.population());
  if (population < 2) {
    throw UsageError("population must be at least 2");
  }

  MonteCarloOptions options;
  options.trials = args.trials;
  options.seed = args.seed;
  options.max_steps = args.max_steps;
  options.stop = parse_stop(protocol, args.stop);
  options.threads = args.threads;
  if (args.graph == "ring") {
    options.graph = InteractionGraph::ring(population);
  } else if (args.graph.starts_with("file:")) {
    const std::string path = args.graph.substr(5);
    std::string text;
    try {
      text = read_file(path);
    } catch (const std::runtime_error &) {
      throw UsageError("cannot read graph file '" + path + "'");
    }
    options.graph = InteractionGraph::parse(text);
    if (options.graph->vertex_count() != population) {
      throw UsageError("graph has " + std::to_string(options.graph->vertex_count()) + " vertices but the population is " +
                       std::to_string(population));
    }
  } else if (args.graph != "complete") {
    throw UsageError("--graph must be complete, ring or file:<path>");
  }

  const StatsReport report = monte_carlo(protocol, init, options);

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv, std::ios::binary);
    if (!csv) {
      throw UsageError("cannot write '" + args.csv + "'");
    }
    csv << "trial,steps,stabilized,finalOutput\n";
    for (const TrialRecord &r : report.records) {
      csv << r.trial << ',' << r.steps << ',' << (r.stabilized ? 1 : 0) << ',' << to_string(r.final_output) << '\n';
    }
  }

  std::size_t outputs[3] = {0, 0, 0};
  for (const TrialRecord &r : report.records) {
    ++outputs[static_cast<int>(r.final_output)];
  }
  const json summary = {
      {"protocol", protocol.name()},
      {"initial", format_config(protocol, init)},
      {"population", population},
      {"graph", args.graph},
      {"stop", args.stop},
      {"seed", report.seed},
      {"max_steps", args.max_steps},
      {"trials", report.trials},
      {"stabilized", report.successes},
      {"mean_steps", report.mean_steps},
      {"median_steps", report.median_steps},
      {"p95_steps", report.p95_steps},
      {"final_outputs", {{"0", outputs[0]}, {"1", outputs[1]}, {"undefined", outputs[2]}}},
  };
  if (!args.json.empty()) {
    std::ofstream file(args.json, std::ios::binary);
    if (!file) {
      throw UsageError("cannot write '" + args.json + "'");
    }
    file << summary.dump(2) << '\n';
  } else {
    out << summary.dump(2) << '\n';
  }
  return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string file;
  std::string predicate;
  std::string leaders;
  std::string initial_states;
  std::string sizes = "2..8";
  std::size_t node_budget = kDefaultNodeBudget;
  std::size_t threads = 0;
};

json counterexample_json(const Protocol &protocol, const Counterexample &c, bool leader_mode) {
  json path = json::array();
  for (const auto &step : c.path) {
    path.push_back(format_config(protocol, step));
  }
  json j = {{"config", format_config(protocol, c.config)}, {"path", std::move(path)}};
  if (leader_mode) {
    j["leaders"] = c.leaders;
  } else {
    j["output"] = to_string(c.output);
  }
  return j;
}

int cmd_verify(const VerifyArgs &args, std::ostream &out) {
  if (args.predicate.empty() == args.leaders.empty()) {
    throw UsageError("give exactly one of --predicate and --leaders");
  }
  const Protocol protocol = load_protocol(args.file);
  const SizeRange sizes = parse_size_range(args.sizes);
  VerifyOptions options;
  options.node_budget = args.node_budget;
  options.threads = args.threads;

  const bool leader_mode = !args.leaders.empty();
  Verdict verdict;
  json report = {{"protocol", protocol.name()}, {"sizes", {{"min", sizes.min}, {"max", sizes.max}}}};
  if (leader_mode) {
    std::vector<StateId> leaders;
    for (const auto &name : split_list(args.leaders)) {
      leaders.push_back(protocol.state_id(name));
    }
    std::vector<StateId> initial;
    if (args.initial_states.empty()) {
      for (StateId s = 0; s < protocol.state_count(); ++s) {
        initial.push_back(s);
      }
    } else {
      for (const auto &name : split_list(args.initial_states)) {
        initial.push_back(protocol.state_id(name));
      }
    }
    verdict = stable_leader(protocol, leaders, sizes, initial, options);
    report["property"] = "unique leader among {" + args.leaders + "}";
  } else {
    const PredicateExpr predicate = parse_predicate(args.predicate);
    verdict = stably_computes(protocol, predicate, sizes, options);
    report["property"] = "stably computes " + to_string(predicate);
  }

  json results = json::array();
  std::size_t failures = 0;
  for (const InputVerdict &v : verdict.results) {
    json entry = {{"input", v.input},
                  {"pass", v.pass},
                  {"reachable", v.reachable_count},
                  {"bottom_sccs", v.bottom_scc_count}};
    if (!leader_mode) {
      entry["expected"] = v.expected ? 1 : 0;
    }
    if (v.counterexample) {
      entry["counterexample"] = counterexample_json(protocol, *v.counterexample, leader_mode);
    }
    failures += v.pass ? 0 : 1;
    results.push_back(std::move(entry));
  }
  report["all_pass"] = verdict.all_pass();
  report["inputs_checked"] = verdict.results.size();
  report["failures"] = failures;
  report["note"] = "exhaustive for populations " + range_text(sizes) + " only";
  report["results"] = std::move(results);
  out << report.dump(2) << '\n';
  return verdict.all_pass() ? kOk : kPropertyFails;
}

// ---- symmetrize / export ----------------------------------------------------

int cmd_symmetrize(const std::string &file, std::ostream &out) {
  const Protocol protocol = load_protocol(file);
  if (!is_deterministic(protocol)) {
    throw UsageError("symmetrize needs a deterministic protocol");
  }
  out << print_protocol(symmetrize(protocol));
  return kOk;
}

int cmd_export(const std::string &key, bool list, std::ostream &out) {
  if (list || key.empty()) {
    for (const auto &k : builtin_keys()) {
      out << k << "  " << builtin(k).description << '\n';
    }
    return kOk;
  }
  const NamedArtifact artifact = builtin(key);
  if (const auto *p = std::get_if<Protocol>(&artifact.value)) {
    out << print_protocol(*p);
  } else {
    out << print_game(std::get<Game>(artifact.value));
  }
  return kOk;
}

// ---- search ---------------------------------------------------------------

struct SearchArgs {
  std::size_t states = 2;
  std::string predicate;
  std::string sizes = "2..6";
  std::uint64_t budget = 0;
  std::string alphabet = "0,1";
  std::string mode;
  std::size_t node_budget = kDefaultNodeBudget;
};

std::uint64_t default_budget() {
  if (const char *env = std::getenv("POPGAME_BUDGET")) {
    const std::string_view text(env);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) {
      return value;
    }
    throw UsageError("POPGAME_BUDGET must be a positive integer");
  }
  return SearchOptions{}.candidate_budget;
}

int cmd_search(const SearchArgs &args, std::ostream &out) {
  if (args.states == 0) {
    throw UsageError("--states must be at least 1");
  }
  const PredicateExpr predicate = parse_predicate(args.predicate);
  const SizeRange sizes = parse_size_range(args.sizes);
  SearchOptions options;
  options.candidate_budget = args.budget ? args.budget : default_budget();
  options.node_budget = args.node_budget;
  options.alphabet = split_list(args.alphabet);
  if (!args.mode.empty()) {
    options.mode = parse_mode(args.mode);
  }

  json findings = json::array();
  auto record = [&](const SearchFinding &f) {
    findings.push_back({{"protocol", print_protocol(f.protocol)}, {"witness", witness_json(f.witness)}});
  };
  bool complete = true;
  try {
    search_pavlovian(args.states, predicate, sizes, options, record);
  } catch (const BudgetExceeded &) {
    complete = false;
  }
  const json report = {
      {"states", args.states},
      {"predicate", to_string(predicate)},
      {"sizes", {{"min", sizes.min}, {"max", sizes.max}}},
      {"candidate_budget", options.candidate_budget},
      {"complete", complete},
      {"note", "stable computation checked for populations " + range_text(sizes) + " only"},
      {"findings", std::move(findings)},
  };
  out << report.dump(2) << '\n';
  return complete ? kOk : kBudget;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"popgame: derive, check, simulate and verify protocols built from games", "popgame"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "popgame 0.1.0");

  CheckArgs check;
  auto *check_cmd = app.add_subcommand("check", "Structural checks; --pavlovian searches for a payoff matrix");
  check_cmd->add_option("file", check.file, "protocol file or builtin:<key>")->required();
  check_cmd->add_flag("--pavlovian", check.pavlovian, "decide whether a game and threshold produce the protocol");
  check_cmd->add_option("--mode", check.mode, "exact or subset (default: exact for deterministic protocols)")
      ->check(CLI::IsMember({"exact", "subset"}));
  check_cmd->add_flag("--json", check.json, "print the report as JSON");

  DeriveArgs derive;
  auto *derive_cmd = app.add_subcommand("derive", "Print the win-stay/lose-shift protocol of a game");
  derive_cmd->add_option("file", derive.file, "game file or builtin:<key>")->required();
  derive_cmd->add_option("--tie-break", derive.tie_break, "all or lowest")
      ->check(CLI::IsMember({"all", "lowest"}));
  derive_cmd->add_option("--inputs", derive.inputs, "input map, e.g. \"0=N,1=Y\"");
  derive_cmd->add_option("--outputs", derive.outputs, "output map covering every state, e.g. \"N=0,Y=1\"");

  SimulateArgs sim;
  auto *sim_cmd = app.add_subcommand("simulate", "Monte Carlo runs; JSON summary on stdout, per-trial CSV on request");
  sim_cmd->add_option("file", sim.file, "protocol file or builtin:<key>")->required();
  sim_cmd->add_option("--input", sim.input, "input counts, e.g. \"0:3,1:2\"");
  sim_cmd->add_option("--init-states", sim.init_states, "state counts \"C:1,D:2\" or all-<state> with --n");
  sim_cmd->add_option("--n", sim.n, "population for --init-states all-<state>");
  sim_cmd->add_option("--graph", sim.graph, "complete, ring or file:<path>");
  sim_cmd->add_option("--seed", sim.seed, "base seed");
  sim_cmd->add_option("--max-steps", sim.max_steps, "interaction cap per trial");
  sim_cmd->add_option("--trials", sim.trials, "number of independent runs");
  sim_cmd->add_option("--stop", sim.stop, "silent, window:<w> or all:<state>");
  sim_cmd->add_option("--csv", sim.csv, "write per-trial rows to this path");
  sim_cmd->add_option("--json", sim.json, "write the summary to this path instead of stdout");
  sim_cmd->add_option("--threads", sim.threads, "worker threads (0: hardware)");

  VerifyArgs ver;
  auto *verify_cmd = app.add_subcommand("verify", "Exhaustive bottom-SCC check over a population range");
  verify_cmd->add_option("file", ver.file, "protocol file or builtin:<key>")->required();
  verify_cmd->add_option("--predicate", ver.predicate, "predicate over input counts, e.g. \"n_1 >= 1\"");
  verify_cmd->add_option("--leaders", ver.leaders, "leader states, e.g. \"L1,L2\"");
  verify_cmd->add_option("--initial-states", ver.initial_states, "states allowed initially (leader mode)");
  verify_cmd->add_option("--sizes", ver.sizes, "population range a..b");
  verify_cmd->add_option("--node-budget", ver.node_budget, "reachable configurations per input");
  verify_cmd->add_option("--threads", ver.threads, "worker threads (0: hardware)");

  std::string sym_file;
  auto *sym_cmd = app.add_subcommand("symmetrize", "Print the symmetric doubled-state simulation");
  sym_cmd->add_option("file", sym_file, "protocol file or builtin:<key>")->required();

  SearchArgs search;
  auto *search_cmd = app.add_subcommand("search", "Enumerate Pavlovian protocols that stably compute a predicate");
  search_cmd->add_option("--states", search.states, "number of states")->required();
  search_cmd->add_option("--predicate", search.predicate, "target predicate")->required();
  search_cmd->add_option("--sizes", search.sizes, "population range a..b");
  search_cmd->add_option("--budget", search.budget, "candidate budget (default: $POPGAME_BUDGET or 5000000)");
  search_cmd->add_option("--alphabet", search.alphabet, "input symbols");
  search_cmd->add_option("--mode", search.mode, "exact or subset")->check(CLI::IsMember({"exact", "subset"}));
  search_cmd->add_option("--node-budget", search.node_budget, "reachable configurations per input");

  std::string export_key;
  bool export_list = false;
  auto *export_cmd = app.add_subcommand("export", "Print a builtin protocol or game");
  export_cmd->add_option("key", export_key, "builtin key");
  export_cmd->add_flag("--list", export_list, "list builtin keys");

  std::vector<std::string> argv_storage{"popgame"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &a : argv_storage) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check_cmd->parsed()) {
      return cmd_check(check, out);
    }
    if (derive_cmd->parsed()) {
      return cmd_derive(derive, out);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim, out);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(ver, out);
    }
    if (sym_cmd->parsed()) {
      return cmd_symmetrize(sym_file, out);
    }
    if (search_cmd->parsed()) {
      return cmd_search(search, out);
    }
    return cmd_export(export_key, export_list, out);
  } catch (const BudgetExceeded &e) {
    err << "popgame: budget exhausted: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception &e) {
    err << "popgame: error: " << e.what() << '\n';
    return kUsage;
  }
}

} // namespace popgame::cli
