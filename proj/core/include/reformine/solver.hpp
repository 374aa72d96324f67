#ifndef REFORMINE_SOLVER_HPP
#define REFORMINE_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "reformine/ast.hpp"
#include "reformine/csp.hpp"

namespace reformine {

struct SolveOptions {
  enum class Mode { First, All, Optimize };
  Mode mode = Mode::First;
  std::uint64_t node_budget = 0;  // 0 = unlimited; one node = one value try
};

struct SolveResult {
  enum class Status { Sat, Unsat, Optimal, NodeBudgetExhausted };
  Status status = Status::Unsat;
  // First: at most one entry. All: every solution in search order.
  // Optimize: the incumbent (best found), if any.
  std::vector<Instance> solutions;
  std::optional<std::int64_t> objective;  // incumbent objective value
  std::uint64_t nodes = 0;                // value-assignment attempts made
  std::uint64_t failures = 0;             // dead ends: attempts rejected, and
                                          // complete assignments discarded for
                                          // an undefined objective
  std::uint64_t millis = 0;               // wall-clock time; informational
                                          // only (nodes is the effort measure)
};

const char* to_string(SolveResult::Status s);

// Deterministic chronological backtracking over the variables in
// declaration order, values ascending. After each assignment only the
// constraints mentioning that variable are re-evaluated, with conservative
// interval reasoning: a branch is abandoned only when some constraint is
// definitely false there. Division by zero or overflow inside a comparison
// makes that comparison false. In Optimize mode solutions must strictly
// improve on the incumbent; a solution whose objective cannot be evaluated
// is discarded. Exceeding the node budget stops the search with status
// NodeBudgetExhausted and whatever was found so far.
SolveResult solve(const GroundCsp& csp, const SolveOptions& opts = {});

// Independent reference evaluator: enumerates every assignment of the
// finds directly from the grounded tree and keeps those where all
// constraints evaluate to true (an evaluation error counts as false) and
// the domain attributes hold. Throws Error(ErrorKind::Solve) when the
// assignment space exceeds 2^20 or a domain is unbounded.
std::vector<Instance> brute_force_solutions(const Ast& grounded);

}  // namespace reformine

#endif  // REFORMINE_SOLVER_HPP
