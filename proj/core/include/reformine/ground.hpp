#ifndef REFORMINE_GROUND_HPP
#define REFORMINE_GROUND_HPP

#include "reformine/ast.hpp"

namespace reformine {

// Ground a specification against an instance: substitute given/letting
// parameters by constants, resolve domain aliases, evaluate every domain
// bound and attribute to a literal, check and drop where clauses, and
// simplify quantifiers whose constant range is empty. The result contains
// only find, such-that, and objective statements.
//
// Throws Error(ErrorKind::Ground) when a given is unbound (or the instance
// binds an unknown name), a binding falls outside its declared domain, a
// where clause is violated, constant evaluation fails (division by zero,
// overflow), a decision variable's domain is empty or unbounded, or
// attribute values are negative or contradictory (minSize > maxSize).
Ast ground(const Ast& spec, const Instance& inst);

}  // namespace reformine

#endif  // REFORMINE_GROUND_HPP
