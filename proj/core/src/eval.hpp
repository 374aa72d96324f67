#ifndef REFORMINE_SRC_EVAL_HPP
#define REFORMINE_SRC_EVAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reformine/ast.hpp"

namespace reformine {

// ---- Checked 64-bit arithmetic -------------------------------
//
// Division floors (quotient rounds toward negative infinity) and the
// remainder takes the divisor's sign, so `a = (a/b)*b + a%b` holds.

std::optional<std::int64_t> checked_add(std::int64_t a, std::int64_t b);
std::optional<std::int64_t> checked_sub(std::int64_t a, std::int64_t b);
std::optional<std::int64_t> checked_mul(std::int64_t a, std::int64_t b);
std::optional<std::int64_t> checked_neg(std::int64_t a);
// Preconditions: b != 0 and not (a == INT64_MIN, b == -1).
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t b);

// ---- Exact evaluation ----------------------------------------

// Evaluation-time value: instance values plus transient tuples bound by
// quantifiers over relations.
struct EvalValue {
  enum class Kind { Int, Bool, Rel, Tuple };
  Kind kind = Kind::Int;
  std::int64_t i = 0;
  bool b = false;
  RelValue rel;
  std::vector<std::int64_t> tup;

  static EvalValue of_int(std::int64_t v);
  static EvalValue of_bool(bool v);
  static EvalValue of_rel(RelValue v);
  static EvalValue of_tuple(std::vector<std::int64_t> v);
  static EvalValue of_value(const Value& v);
};

// Name environment: optional top-level parameter bindings plus a stack of
// quantifier binders (innermost wins). Evaluation counts work against a
// step budget so closed-term evaluation always terminates promptly.
class EvalEnv {
 public:
  EvalEnv() = default;
  explicit EvalEnv(const std::map<std::string, Value>* params) : params_(params) {}

  void push_binder(std::string name, EvalValue v) {
    binders_.emplace_back(std::move(name), std::move(v));
  }
  void pop_binder() { binders_.pop_back(); }
  const EvalValue* lookup(const std::string& name);

  void set_step_limit(std::uint64_t limit) { step_limit_ = limit; }
  void count_step();

 private:
  const std::map<std::string, Value>* params_ = nullptr;
  std::vector<std::pair<std::string, EvalValue>> binders_;
  std::uint64_t steps_ = 0;
  std::uint64_t step_limit_ = 10'000'000;
  EvalValue scratch_;
};

// Exact evaluation of an expression under `env`. Throws
// Error(ErrorKind::Ground) on unbound references, division by zero,
// overflow, unenumerable quantifier ranges, or budget exhaustion.
// Boolean connectives short-circuit left to right.
EvalValue eval_expr(const NodePtr& e, EvalEnv& env);
std::int64_t eval_int(const NodePtr& e, EvalEnv& env);
bool eval_bool(const NodePtr& e, EvalEnv& env);
RelValue eval_rel(const NodePtr& e, EvalEnv& env);

// The element values of a quantifier range node: an int domain enumerates
// its (evaluated) bounds, a set-valued reference or relation literal
// enumerates its rows (ints for arity 1, tuples otherwise). Throws when
// the range cannot be enumerated (unbounded or oversized domain).
std::vector<EvalValue> enumerate_range(const NodePtr& range, EvalEnv& env);

}  // namespace reformine

#endif  // REFORMINE_SRC_EVAL_HPP
