#ifndef REFORMINE_MCTS_HPP
#define REFORMINE_MCTS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "reformine/ast.hpp"
#include "reformine/rewrite.hpp"

namespace reformine {

struct MctsConfig {
  std::uint64_t iterations = 100;
  double exploration = 1.4142135623730951;  // sqrt(2)
  std::uint64_t seed = 0;
  int max_depth = 8;                 // longest rewrite sequence considered
  std::uint64_t solver_budget = 10000;  // per-instance search-effort cap
  int jobs = 1;                      // parallel instance evaluations
};

// Upper-confidence score of a child: mean reward plus an exploration bonus
// scaled by how rarely the child was tried relative to its parent.
// An unvisited child scores +infinity so it is always preferred.
double uct_score(double total_reward, std::uint64_t visits,
                 std::uint64_t parent_visits, double exploration);

// One node of the search tree, in discovery order.
struct SearchNode {
  int id = 0;
  int parent = -1;                 // -1 for the root
  std::optional<Match> action;     // rewrite that produced this spec
  Ast spec;
  std::uint64_t digest = 0;        // canonical digest of `spec`
  int depth = 0;
  bool terminal = false;
  bool duplicate = false;          // transposition of an earlier digest
  bool failed = false;             // evaluation raised an error
  double reward = 0.0;             // evaluation reward of `spec`
  std::uint64_t solver_nodes = 0;  // summed search effort over the instances
  std::uint64_t visits = 0;
  double total_reward = 0.0;
  std::vector<int> children;
};

struct MctsResult {
  std::vector<SearchNode> tree;    // [0] is the root
  std::uint64_t baseline_nodes = 0;
  int best = 0;                    // id of the best node
  double best_reward = 0.5;
  Ast best_spec;
  std::vector<Match> best_sequence;  // rewrites from the root to `best`
  std::uint64_t iterations_run = 0;
  std::uint64_t evaluations = 0;   // solver-backed evaluations (baseline included)
};

// Monte-Carlo tree search over semantics-preserving rewrite sequences.
//
// Each candidate specification is scored by grounding it on every training
// instance, flattening, and running the backtracking solver under the
// per-instance node budget; with B the baseline effort of the input
// specification and T the candidate's, the reward is B / (B + T) (0.5 when
// both are zero). A candidate whose canonical digest was already seen is a
// terminal transposition and reuses the recorded reward; a candidate that
// fails to evaluate is terminal with reward 0. Selection follows uct_score
// (first maximum wins), expansion picks an untried action uniformly with
// the seeded generator, and every iteration backpropagates one reward
// along the path. The best node has the maximum reward, with ties broken
// by shorter rewrite sequence and then by discovery order. Deterministic
// for a fixed seed, independent of `jobs`. Throws Error(ErrorKind::Config)
// when `instances` is empty; baseline evaluation errors propagate.
MctsResult mcts(const Ast& spec, const std::vector<Instance>& instances,
                const MctsConfig& config);

}  // namespace reformine

#endif  // REFORMINE_MCTS_HPP
