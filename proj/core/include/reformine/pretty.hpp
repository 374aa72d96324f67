#ifndef REFORMINE_PRETTY_HPP
#define REFORMINE_PRETTY_HPP

#include <string>

#include "reformine/ast.hpp"

namespace reformine {

// Canonical surface text of a specification. Parsing the result yields a
// structurally equal tree (pretty . parse is a fixpoint on canonical text).
std::string pretty(const Ast& spec);

// Canonical text of one expression or domain subtree.
std::string pretty_expr(const NodePtr& node);

// Box-drawing tree view with one `token  #Tag` line per vertex.
std::string annotate(const Ast& spec);

}  // namespace reformine

#endif  // REFORMINE_PRETTY_HPP
