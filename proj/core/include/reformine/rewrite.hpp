#ifndef REFORMINE_REWRITE_HPP
#define REFORMINE_REWRITE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reformine/ast.hpp"

namespace reformine {

// One applicable occurrence of a catalogue rule: the rule name, the 1-based
// child-ordinal path from the root to the anchor node, and rule-specific
// bindings fixed at enumeration time (e.g. the derived attribute and value,
// or whether the strict variant was selected). Bindings let apply_match
// verify that the anchor still matches the same way.
struct Match {
  std::string rule;
  std::vector<int> path;
  std::map<std::string, std::int64_t> bindings;
};

// Catalogue rule names in enumeration order:
//   commute       swap the operands of a commutative binary operator
//   fold          replace a closed subexpression by its value
//   identity      drop arithmetic/boolean identity operands (x*1, x+0,
//                 b /\ true, b \/ false, !!b)
//   implied-sum   from a top-level forAll whose body compares two int
//                 expressions, append the implied comparison of their sums
//   card-to-attr  turn a top-level cardinality comparison against a
//                 constant into a size/minSize/maxSize attribute
//   witness       from a top-level constant-membership constraint,
//                 set minSize 1 on the target's domain (constraint kept)
const std::vector<std::string>& rule_names();

// All rule occurrences in `spec`, deterministically ordered: rules in
// catalogue order, anchors in pre-order, then rule-specific variants.
// `spec` must be validated (reference targets filled in).
std::vector<Match> enumerate_matches(const Ast& spec);
// Occurrences of one rule; throws on an unknown rule name.
std::vector<Match> enumerate_matches(const Ast& spec, const std::string& rule);

// Apply one match to the tree it was enumerated on (or one where the
// anchor still matches identically). The result is validated. Throws
// Error(ErrorKind::Rewrite) when the rule name is unknown or the match is
// stale: the path no longer addresses a node matching the rule with the
// same bindings.
Ast apply_match(const Ast& spec, const Match& m);

// Order-insensitive cleanup used for equivalence digests: one bottom-up
// sweep that folds closed subexpressions, removes identity operands, and
// sorts commutative operands; the sweep is a fixpoint of itself.
Ast normalize(const Ast& spec);

// FNV-1a digest of the canonical text of the normalized tree. Two specs
// that normalization identifies hash equal.
std::uint64_t canonical_hash(const Ast& spec);

}  // namespace reformine

#endif  // REFORMINE_REWRITE_HPP
