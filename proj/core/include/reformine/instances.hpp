#ifndef REFORMINE_INSTANCES_HPP
#define REFORMINE_INSTANCES_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "reformine/ast.hpp"

namespace reformine {

struct SampleConfig {
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  double density = 0.5;   // tuple-inclusion probability for attribute-free
                          // relation parameters
  std::int64_t cap = 50;  // global width cap for integer parameter ranges
  std::uint64_t max_rejections = 10000;  // resampling attempts per instance
};

// Draw `count` instances for a specification class by rejection sampling:
// parameters are sampled in declaration order (integers uniformly over
// their declared range, width-capped at `cap` and anchored at the lower
// bound for unbounded ranges; booleans uniformly; relations by independent
// tuple inclusion with probability `density`, or uniformly at an
// attribute-admissible cardinality when size attributes are declared), and
// any draw the specification rejects — a violated where clause, an emptied
// domain — is discarded and redrawn. Deterministic for a fixed seed. Every
// returned instance grounds the specification. Throws
// Error(ErrorKind::Generate) when the specification has no given
// parameters, a candidate pool is oversized, density is outside [0, 1], or
// an instance exceeds `max_rejections` attempts.
std::vector<Instance> sample_instances(const Ast& spec, const SampleConfig& cfg = {});

// ---- Instance files ------------------------------------------
//
// Text form: one `letting <name> be <value>` per line, where a value is a
// signed integer, `true`/`false`, or a relation literal such as
// `{1, 2}` / `{(1, 2), (3, 4)}` (an optional `relation` keyword may
// precede it). `$` starts a comment. The JSON form is one object mapping
// names to integers, booleans, or arrays (of integers for arity one, of
// integer arrays otherwise). parse_instance accepts either, deciding by
// the first meaningful character. Throws Error(ErrorKind::Instance) on
// malformed input.

Instance parse_instance(std::string_view text);
std::string instance_to_text(const Instance& inst);
std::string instance_to_json(const Instance& inst);

}  // namespace reformine

#endif  // REFORMINE_INSTANCES_HPP
