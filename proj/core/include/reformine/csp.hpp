#ifndef REFORMINE_CSP_HPP
#define REFORMINE_CSP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "reformine/ast.hpp"

namespace reformine {

// One finite-domain variable: an int/bool find, or one 0/1 incidence
// variable per candidate tuple of a relation find.
struct CspVar {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool boolean = false;
};

// Flattened expression node; `args` index into GroundCsp::exprs. Sum, And,
// and Or are n-ary; every other operator has a fixed arity.
struct CExpr {
  enum class Op : std::uint8_t {
    IntConst, IntVar, Sum, Mul, Div, Mod, Neg, ToInt,       // int-valued
    BoolConst, BoolVar, Not, And, Or, Implies, Iff,         // bool-valued
    Eq, Ne, Lt, Le, Gt, Ge,                                 // int comparisons
  };
  Op op = Op::IntConst;
  std::int64_t value = 0;  // IntConst (BoolConst: 0/1)
  int var = -1;            // IntVar/BoolVar
  std::vector<int> args;
};

// How one source find maps onto solver variables, for solution reporting.
struct FindInfo {
  std::string name;
  bool relational = false;
  bool boolean = false;                                // scalar bool find
  int var = -1;                                        // scalar case
  int arity = 0;                                       // relational case
  std::vector<std::vector<std::int64_t>> tuples;       // candidates, lex order
  int first_var = -1;                                  // incidence var block
};

struct GroundCsp {
  std::vector<CspVar> vars;        // declaration order, tuples lex within a find
  std::vector<CExpr> exprs;
  std::vector<int> constraints;    // bool expr ids: source order, then
                                   // attribute cardinality bounds
  int objective = -1;              // int expr id, -1 when absent
  ObjDir objective_dir = ObjDir::Minimising;
  std::vector<FindInfo> finds;
};

// Lower a grounded specification to finite-domain form: quantifiers are
// unrolled, memberships and subset constraints become incidence formulas,
// cardinalities become sums, tuple comparisons go component-wise, and
// domain attributes append cardinality constraints. Throws
// Error(ErrorKind::Solve) on non-grounded input, unbounded domains, more
// than 1'000'000 candidate tuples per find, oversized quantifier ranges,
// or an oversized flattened model.
GroundCsp flatten(const Ast& grounded);

}  // namespace reformine

#endif  // REFORMINE_CSP_HPP
