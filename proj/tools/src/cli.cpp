#include "reformine/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "reformine/ast.hpp"
#include "reformine/csp.hpp"
#include "reformine/features.hpp"
#include "reformine/graph.hpp"
#include "reformine/ground.hpp"
#include "reformine/instances.hpp"
#include "reformine/mcts.hpp"
#include "reformine/parser.hpp"
#include "reformine/pretty.hpp"
#include "reformine/rewrite.hpp"
#include "reformine/solver.hpp"

namespace reformine::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// A domain failure tagged with the file it concerns.
struct Diagnosed {
  std::string file;
  Error error;
};

std::string format_diag(const Diagnosed& d) {
  std::string out = d.file;
  if (d.error.line() > 0) {
    out += ":" + std::to_string(d.error.line());
    if (d.error.column() > 0) out += ":" + std::to_string(d.error.column());
  }
  out += ": error: ";
  out += d.error.what();
  out += "\n";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Diagnosed{path, Error(ErrorKind::Io, "cannot open file")};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Ast load_spec(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_spec(text);
  } catch (const Error& e) {
    throw Diagnosed{path, e};
  }
}

Instance load_instance(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_instance(text);
  } catch (const Error& e) {
    throw Diagnosed{path, e};
  }
}

// Run `body`, attributing any library error to `file`.
template <typename F>
auto in_file(const std::string& file, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Diagnosed{file, e};
  }
}

std::string ensure_newline(std::string s) {
  if (s.empty() || s.back() != '\n') s += '\n';
  return s;
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json value_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int:
      return v.i;
    case Value::Kind::Bool:
      return v.b;
    case Value::Kind::Rel: {
      ordered_json rows = ordered_json::array();
      for (const auto& row : v.rel.rows) {
        if (v.rel.arity == 1) {
          rows.push_back(row[0]);
        } else {
          rows.push_back(row);
        }
      }
      return rows;
    }
  }
  return nullptr;
}

ordered_json instance_json(const Instance& inst) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, v] : inst) j[name] = value_json(v);
  return j;
}

ordered_json match_json(const Match& m) {
  ordered_json j;
  j["rule"] = m.rule;
  j["path"] = m.path;
  if (!m.bindings.empty()) j["bindings"] = m.bindings;
  return j;
}

// ---------------- subcommand argument bundles ----------------

struct FmtArgs {
  std::string spec;
  bool annotated = false;
};

struct GraphArgs {
  std::string spec;
  std::string format;
};

struct RewriteArgs {
  std::string spec;
  std::string rule;
  bool list = false;
  std::optional<std::uint32_t> index;
  bool run_normalize = false;
};

struct SolveArgs {
  std::string spec;
  std::string instance;
  bool all = false;
  bool optimize = false;
  std::uint64_t budget = 0;
};

struct GenArgs {
  std::string spec;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  double density = 0.5;
  std::int64_t cap = 50;
};

struct ExploreArgs {
  std::string spec;
  std::string instances_dir;
  std::uint64_t iters = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10000;
  double exploration = 1.4142135623730951;
  std::uint32_t depth = 8;
  std::uint32_t jobs = 1;
  std::string dot_file;
};

struct FeaturesArgs {
  std::vector<std::string> specs;
  bool pairwise = false;
};

// ---------------- subcommand handlers ----------------

void run_fmt(const FmtArgs& a, CommandOutcome& outcome) {
  const Ast spec = load_spec(a.spec);
  outcome.out = a.annotated ? ensure_newline(annotate(spec)) : pretty(spec);
}

void run_graph(const GraphArgs& a, CommandOutcome& outcome) {
  const Ast spec = load_spec(a.spec);
  const GraphDoc doc = to_graph(spec);
  if (a.format == "gp2") {
    outcome.out = ensure_newline(to_gp2(doc));
  } else if (a.format == "dot") {
    outcome.out = ensure_newline(to_dot(doc));
  } else {
    outcome.out = ensure_newline(to_graph_json(doc));
  }
}

void run_rewrite(const RewriteArgs& a, CommandOutcome& outcome) {
  const Ast spec = load_spec(a.spec);
  if (a.run_normalize) {
    outcome.out = in_file(a.spec, [&] { return pretty(normalize(spec)); });
    return;
  }
  const std::vector<Match> matches =
      in_file(a.spec, [&] { return enumerate_matches(spec, a.rule); });
  if (a.list) {
    ordered_json j = ordered_json::array();
    for (const Match& m : matches) j.push_back(match_json(m));
    outcome.out = j.dump(2) + "\n";
    return;
  }
  const std::uint32_t index = a.index.value_or(0);
  if (index >= matches.size()) {
    throw Diagnosed{
        a.spec,
        Error(ErrorKind::Rewrite, "rule '" + a.rule + "' has " +
                                      std::to_string(matches.size()) +
                                      " matches; index " + std::to_string(index) +
                                      " is out of range")};
  }
  in_file(a.spec, [&] {
    const std::uint64_t before = canonical_hash(spec);
    const Ast rewritten = apply_match(spec, matches[index]);
    ordered_json trace;
    trace["rule"] = matches[index].rule;
    trace["path"] = matches[index].path;
    trace["before-hash"] = hash_hex(before);
    trace["after-hash"] = hash_hex(canonical_hash(rewritten));
    outcome.err = trace.dump() + "\n";
    outcome.out = pretty(rewritten);
    return 0;
  });
}

void run_solve(const SolveArgs& a, CommandOutcome& outcome) {
  const Ast spec = load_spec(a.spec);
  const Instance inst =
      a.instance.empty() ? Instance{} : load_instance(a.instance);
  const Ast grounded = in_file(a.spec, [&] { return ground(spec, inst); });
  const GroundCsp csp = in_file(a.spec, [&] { return flatten(grounded); });

  SolveOptions opts;
  opts.node_budget = a.budget;
  if (a.all) {
    opts.mode = SolveOptions::Mode::All;
  } else if (a.optimize || csp.objective >= 0) {
    opts.mode = SolveOptions::Mode::Optimize;
  } else {
    opts.mode = SolveOptions::Mode::First;
  }
  const SolveResult res = in_file(a.spec, [&] { return solve(csp, opts); });

  ordered_json j;
  j["status"] = to_string(res.status);
  ordered_json sols = ordered_json::array();
  for (const Instance& s : res.solutions) sols.push_back(instance_json(s));
  j["solutions"] = std::move(sols);
  j["objective"] = res.objective ? ordered_json(*res.objective) : ordered_json(nullptr);
  j["nodes"] = res.nodes;
  j["failures"] = res.failures;
  j["millis"] = res.millis;
  outcome.out = j.dump(2) + "\n";
}

void run_gen(const GenArgs& a, CommandOutcome& outcome) {
  const Ast spec = load_spec(a.spec);
  SampleConfig cfg;
  cfg.count = a.count;
  cfg.seed = a.seed;
  cfg.density = a.density;
  cfg.cap = a.cap;
  const std::vector<Instance> instances =
      in_file(a.spec, [&] { return sample_instances(spec, cfg); });
  std::string out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (i > 0) out += "\n";
    out += "$ instance " + std::to_string(i) + "\n";
    out += instance_to_text(instances[i]);
  }
  outcome.out = out;
}

std::string tree_dot(const MctsResult& r) {
  std::string out = "digraph search {\n  node [shape=box];\n";
  char buf[160];
  for (const SearchNode& n : r.tree) {
    const char* style = n.duplicate   ? ", style=dashed"
                        : n.failed    ? ", style=dotted"
                        : n.terminal  ? ", style=bold"
                                      : "";
    std::snprintf(buf, sizeof buf,
                  "  n%d [label=\"#%d r=%.3f v=%llu\"%s];\n", n.id, n.id,
                  n.reward, static_cast<unsigned long long>(n.visits), style);
    out += buf;
    if (n.parent >= 0) {
      const std::string rule = n.action ? n.action->rule : "";
      std::snprintf(buf, sizeof buf, "  n%d -> n%d [label=\"%s\"];\n", n.parent,
                    n.id, rule.c_str());
      out += buf;
    }
  }
  out += "}\n";
  return out;
}

void run_explore(const ExploreArgs& a, CommandOutcome& outcome) {
  const Ast spec = load_spec(a.spec);
  if (!fs::is_directory(a.instances_dir)) {
    throw Diagnosed{a.instances_dir,
                    Error(ErrorKind::Io, "not a directory of instance files")};
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(a.instances_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Diagnosed{a.instances_dir,
                    Error(ErrorKind::Config, "no instance files found")};
  }
  std::vector<Instance> instances;
  instances.reserve(files.size());
  for (const std::string& f : files) instances.push_back(load_instance(f));

  MctsConfig cfg;
  cfg.iterations = a.iters;
  cfg.exploration = a.exploration;
  cfg.seed = a.seed;
  cfg.max_depth = a.depth;
  cfg.solver_budget = a.budget;
  cfg.jobs = a.jobs;

  const auto start = std::chrono::steady_clock::now();
  const MctsResult r = in_file(a.spec, [&] { return mcts(spec, instances, cfg); });
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  std::uint64_t duplicates = 0;
  std::vector<std::uint64_t> histogram;
  for (const SearchNode& n : r.tree) {
    duplicates += n.duplicate ? 1 : 0;
    if (histogram.size() <= static_cast<std::size_t>(n.depth)) {
      histogram.resize(static_cast<std::size_t>(n.depth) + 1, 0);
    }
    ++histogram[static_cast<std::size_t>(n.depth)];
  }

  ordered_json j;
  j["baseline"]["nodes"] = r.baseline_nodes;
  j["baseline"]["reward"] = 0.5;
  j["best"]["spec-text"] = pretty(r.best_spec);
  ordered_json seq = ordered_json::array();
  for (const Match& m : r.best_sequence) {
    ordered_json step;
    step["rule"] = m.rule;
    step["path"] = m.path;
    seq.push_back(std::move(step));
  }
  j["best"]["sequence"] = std::move(seq);
  j["best"]["nodes"] = r.tree[static_cast<std::size_t>(r.best)].solver_nodes;
  j["best"]["reward"] = r.best_reward;
  j["tree-summary"]["expanded"] = r.tree.size();
  j["tree-summary"]["duplicates"] = duplicates;
  j["tree-summary"]["depth-histogram"] = histogram;
  j["iterations"] = r.iterations_run;
  j["evaluations"] = r.evaluations;
  j["elapsed-millis"] = elapsed;
  outcome.out = j.dump(2) + "\n";

  if (!a.dot_file.empty()) {
    std::ofstream dot(a.dot_file, std::ios::binary);
    if (!dot) {
      throw Diagnosed{a.dot_file, Error(ErrorKind::Io, "cannot write file")};
    }
    dot << tree_dot(r);
  }
}

void run_features(const FeaturesArgs& a, CommandOutcome& outcome) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> vectors;
  for (const std::string& path : a.specs) {
    labels.push_back(fs::path(path).stem().string());
    vectors.push_back(featurize(load_spec(path)));
  }
  if (a.pairwise) {
    outcome.out = distances_csv(labels, pairwise_distances(vectors));
  } else {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    rows.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      rows.emplace_back(labels[i], vectors[i]);
    }
    outcome.out = features_csv(rows);
  }
}

}  // namespace

CommandOutcome run(const std::vector<std::string>& args) {
  CommandOutcome outcome;

  CLI::App app{"Constraint-specification reformulation workbench"};
  app.name("reformine");
  app.require_subcommand(1);

  FmtArgs fmt_args;
  auto* fmt_cmd = app.add_subcommand("fmt", "Print the canonical form of a specification");
  fmt_cmd->add_option("spec", fmt_args.spec, "Specification file")->required();
  fmt_cmd->add_flag("--annotate", fmt_args.annotated,
                    "Print the annotated syntax tree instead of surface text");

  GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph", "Encode a specification as a labelled graph");
  graph_cmd->add_option("spec", graph_args.spec, "Specification file")->required();
  graph_cmd->add_option("--format", graph_args.format, "Output format")
      ->required()
      ->check(CLI::IsMember({"gp2", "dot", "json"}));

  RewriteArgs rewrite_args;
  auto* rewrite_cmd = app.add_subcommand("rewrite", "Apply catalogue rewrites to a specification");
  rewrite_cmd->add_option("spec", rewrite_args.spec, "Specification file")->required();
  auto* rule_opt = rewrite_cmd->add_option("--rule", rewrite_args.rule, "Catalogue rule name")
                       ->check(CLI::IsMember(rule_names()));
  auto* list_flag =
      rewrite_cmd->add_flag("--list", rewrite_args.list, "List matches as JSON without applying");
  auto* index_opt = rewrite_cmd->add_option("--index", rewrite_args.index,
                                            "Apply the i-th match (0-based; default 0)");
  auto* normalize_flag = rewrite_cmd->add_flag(
      "--normalize", rewrite_args.run_normalize,
      "Apply the confluent normalization rules to a fixpoint instead");
  list_flag->excludes(index_opt)->excludes(normalize_flag);
  index_opt->excludes(normalize_flag);
  normalize_flag->excludes(rule_opt);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Ground, flatten, and solve a specification");
  solve_cmd->add_option("spec", solve_args.spec, "Specification file")->required();
  solve_cmd->add_option("--instance", solve_args.instance,
                        "Instance file binding the given parameters");
  auto* all_flag = solve_cmd->add_flag("--all", solve_args.all, "Enumerate every solution");
  auto* optimize_flag =
      solve_cmd->add_flag("--optimize", solve_args.optimize, "Prove the optimum");
  all_flag->excludes(optimize_flag);
  solve_cmd->add_option("--budget", solve_args.budget,
                        "Node budget; 0 means unlimited");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Sample training instances for a specification");
  gen_cmd->add_option("spec", gen_args.spec, "Specification file")->required();
  gen_cmd->add_option("--count", gen_args.count, "Number of instances")->required();
  gen_cmd->add_option("--seed", gen_args.seed, "Random seed")->required();
  gen_cmd->add_option("--density", gen_args.density,
                      "Tuple inclusion probability for relation parameters");
  gen_cmd->add_option("--cap", gen_args.cap, "Width cap for integer parameter ranges");

  ExploreArgs explore_args;
  auto* explore_cmd =
      app.add_subcommand("explore", "Search reformulation sequences with UCT");
  explore_cmd->add_option("spec", explore_args.spec, "Specification file")->required();
  explore_cmd->add_option("--instances", explore_args.instances_dir,
                          "Directory of training instance files")
      ->required();
  explore_cmd->add_option("--iters,--iterations", explore_args.iters, "Search iterations")
      ->required();
  explore_cmd->add_option("--seed", explore_args.seed, "Random seed")->required();
  explore_cmd->add_option("--budget", explore_args.budget,
                          "Per-instance solver node budget");
  explore_cmd->add_option("--c", explore_args.exploration, "UCT exploration constant");
  explore_cmd->add_option("--depth", explore_args.depth, "Maximum rewrite-sequence depth");
  explore_cmd->add_option("--jobs", explore_args.jobs, "Parallel evaluation workers");
  explore_cmd->add_option("--dot", explore_args.dot_file,
                          "Also write a DOT dump of the explored tree to this file");

  FeaturesArgs features_args;
  auto* features_cmd =
      app.add_subcommand("features", "Emit structural feature vectors as CSV");
  features_cmd->add_option("specs", features_args.specs, "Specification files")
      ->required()
      ->expected(-1);
  features_cmd->add_flag("--pairwise", features_args.pairwise,
                         "Emit the pairwise distance matrix instead");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out_ss, err_ss;
    const int code = app.exit(e, out_ss, err_ss);
    outcome.out = out_ss.str();
    outcome.err = err_ss.str();
    outcome.exit_code = code == 0 ? 0 : 2;
    return outcome;
  }

  try {
    if (rewrite_cmd->parsed() && !rewrite_args.run_normalize &&
        rewrite_args.rule.empty()) {
      outcome.err = "error: --rule is required unless --normalize is given\n";
      outcome.err += rewrite_cmd->help();
      outcome.exit_code = 2;
      return outcome;
    }
    if (fmt_cmd->parsed()) {
      run_fmt(fmt_args, outcome);
    } else if (graph_cmd->parsed()) {
      run_graph(graph_args, outcome);
    } else if (rewrite_cmd->parsed()) {
      run_rewrite(rewrite_args, outcome);
    } else if (solve_cmd->parsed()) {
      run_solve(solve_args, outcome);
    } else if (gen_cmd->parsed()) {
      run_gen(gen_args, outcome);
    } else if (explore_cmd->parsed()) {
      run_explore(explore_args, outcome);
    } else if (features_cmd->parsed()) {
      run_features(features_args, outcome);
    }
  } catch (const Diagnosed& d) {
    outcome.err = format_diag(d);
    outcome.exit_code = 1;
  } catch (const Error& e) {
    outcome.err = std::string("error: ") + e.what() + "\n";
    outcome.exit_code = 1;
  } catch (const std::exception& e) {
    outcome.err = std::string("error: ") + e.what() + "\n";
    outcome.exit_code = 1;
  }
  return outcome;
}

}  // namespace reformine::cli
