#include "reformine/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <utility>

#include "reformine/csp.hpp"
#include "reformine/ground.hpp"
#include "reformine/solver.hpp"

namespace reformine {

namespace {

// Unbiased draw from [0, n) via rejection: values below (2^64 - n) mod n
// would make the final modulo lopsided, so they are redrawn.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (~n + 1) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

bool has_objective(const Ast& spec) {
  for (const NodePtr& s : spec->children) {
    if (s->kind == Kind::Objective) return true;
  }
  return false;
}

// Search effort of one candidate on one instance: solver nodes under the
// budget (an exhausted run counts exactly the budget).
std::uint64_t instance_effort(const Ast& spec, const Instance& inst,
                              std::uint64_t budget) {
  Ast g = ground(spec, inst);
  SolveOptions opts;
  opts.mode = has_objective(spec) ? SolveOptions::Mode::Optimize
                                  : SolveOptions::Mode::First;
  opts.node_budget = budget;
  return solve(flatten(g), opts).nodes;
}

std::uint64_t total_effort(const Ast& spec, const std::vector<Instance>& instances,
                           std::uint64_t budget, int jobs) {
  std::uint64_t total = 0;
  if (jobs <= 1 || instances.size() <= 1) {
    for (const Instance& inst : instances) {
      total += instance_effort(spec, inst, budget);
    }
    return total;
  }
  // Batched asynchronous evaluation, joined in submission order so the
  // result (and any propagated error) is independent of scheduling.
  std::size_t next = 0;
  std::exception_ptr first_error;
  while (next < instances.size()) {
    const std::size_t batch =
        std::min(static_cast<std::size_t>(jobs), instances.size() - next);
    std::vector<std::future<std::uint64_t>> futures;
    futures.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) {
      const Instance& inst = instances[next + k];
      futures.push_back(std::async(std::launch::async, [&spec, &inst, budget] {
        return instance_effort(spec, inst, budget);
      }));
    }
    for (std::size_t k = 0; k < batch; ++k) {
      try {
        total += futures[k].get();
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    next += batch;
  }
  if (first_error) std::rethrow_exception(first_error);
  return total;
}

double reward_of(std::uint64_t baseline, std::uint64_t candidate) {
  if (baseline == 0 && candidate == 0) return 0.5;
  return static_cast<double>(baseline) /
         (static_cast<double>(baseline) + static_cast<double>(candidate));
}

struct CachedScore {
  double reward = 0.0;
  std::uint64_t solver_nodes = 0;
};

}  // namespace

double uct_score(double total_reward, std::uint64_t visits,
                 std::uint64_t parent_visits, double exploration) {
  if (visits == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(visits);
  return total_reward / n +
         exploration * std::sqrt(std::log(static_cast<double>(parent_visits)) / n);
}

MctsResult mcts(const Ast& spec, const std::vector<Instance>& instances,
                const MctsConfig& config) {
  if (instances.empty()) {
    throw Error(ErrorKind::Config, "at least one training instance is required");
  }

  MctsResult res;
  std::mt19937_64 rng(config.seed);
  std::map<std::uint64_t, CachedScore> digest_cache;
  std::vector<std::vector<Match>> untried(1);

  res.baseline_nodes =
      total_effort(spec, instances, config.solver_budget, config.jobs);
  res.evaluations = 1;

  SearchNode root;
  root.spec = spec;
  root.digest = canonical_hash(spec);
  root.reward = 0.5;  // the baseline compared with itself
  root.solver_nodes = res.baseline_nodes;
  root.visits = 1;
  root.total_reward = 0.5;
  digest_cache[root.digest] = {root.reward, root.solver_nodes};
  if (config.max_depth <= 0) {
    root.terminal = true;
  } else {
    untried[0] = enumerate_matches(spec);
    if (untried[0].empty()) root.terminal = true;
  }
  res.tree.push_back(std::move(root));

  for (std::uint64_t it = 0; it < config.iterations; ++it) {
    std::vector<int> path{0};
    double reward = 0.0;
    for (;;) {
      SearchNode& node = res.tree[static_cast<std::size_t>(path.back())];
      if (node.terminal) {
        reward = node.reward;  // a settled leaf restates its own score
        break;
      }
      if (!untried[static_cast<std::size_t>(node.id)].empty()) {
        std::vector<Match>& pending = untried[static_cast<std::size_t>(node.id)];
        const std::uint64_t pick = bounded_draw(rng, pending.size());
        Match action = pending[static_cast<std::size_t>(pick)];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));

        SearchNode child;
        child.id = static_cast<int>(res.tree.size());
        child.parent = node.id;
        child.action = action;
        child.depth = node.depth + 1;
        try {
          child.spec = apply_match(node.spec, action);
        } catch (const Error&) {
          child.spec = node.spec;  // unreachable for a fresh match; stay safe
          child.failed = true;
          child.terminal = true;
        }
        if (!child.failed) {
          child.digest = canonical_hash(child.spec);
          auto cached = digest_cache.find(child.digest);
          if (cached != digest_cache.end()) {
            child.duplicate = true;
            child.terminal = true;
            child.reward = cached->second.reward;
            child.solver_nodes = cached->second.solver_nodes;
          } else {
            try {
              child.solver_nodes = total_effort(child.spec, instances,
                                                config.solver_budget, config.jobs);
              child.reward = reward_of(res.baseline_nodes, child.solver_nodes);
              ++res.evaluations;
            } catch (const Error&) {
              child.failed = true;
              child.terminal = true;
              child.reward = 0.0;
            }
            digest_cache[child.digest] = {child.reward, child.solver_nodes};
          }
        }
        untried.emplace_back();
        if (!child.terminal) {
          if (child.depth >= config.max_depth) {
            child.terminal = true;
          } else {
            untried.back() = enumerate_matches(child.spec);
            if (untried.back().empty()) child.terminal = true;
          }
        }
        reward = child.reward;
        path.push_back(child.id);
        node.children.push_back(child.id);
        res.tree.push_back(std::move(child));
        break;
      }
      // Fully expanded: descend to the child with the best UCT score
      // (the first of equals wins).
      int pick = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int c : node.children) {
        const SearchNode& cand = res.tree[static_cast<std::size_t>(c)];
        const double s = uct_score(cand.total_reward, cand.visits, node.visits,
                                   config.exploration);
        if (s > best_score) {
          best_score = s;
          pick = c;
        }
      }
      if (pick < 0) {
        // No actions and no children: nothing left under this node.
        SearchNode& dead = res.tree[static_cast<std::size_t>(path.back())];
        dead.terminal = true;
        reward = dead.reward;
        break;
      }
      path.push_back(pick);
    }
    for (int id : path) {
      SearchNode& n = res.tree[static_cast<std::size_t>(id)];
      n.visits += 1;
      n.total_reward += reward;
    }
  }

  res.iterations_run = config.iterations;
  int best = 0;
  for (const SearchNode& n : res.tree) {
    const SearchNode& cur = res.tree[static_cast<std::size_t>(best)];
    if (n.failed) continue;
    if (n.reward > cur.reward ||
        (n.reward == cur.reward && n.depth < cur.depth)) {
      best = n.id;
    }
  }
  res.best = best;
  res.best_reward = res.tree[static_cast<std::size_t>(best)].reward;
  res.best_spec = res.tree[static_cast<std::size_t>(best)].spec;
  for (int id = best; id > 0;
       id = res.tree[static_cast<std::size_t>(id)].parent) {
    res.best_sequence.push_back(*res.tree[static_cast<std::size_t>(id)].action);
  }
  std::reverse(res.best_sequence.begin(), res.best_sequence.end());
  return res;
}

}  // namespace reformine
