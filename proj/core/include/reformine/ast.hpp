#ifndef REFORMINE_AST_HPP
#define REFORMINE_AST_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reformine {

// ============================================================
// Errors
// ============================================================

enum class ErrorKind {
  Syntax,      // lexing/parsing failures
  Resolve,     // unresolved or duplicate identifiers
  Type,        // ill-typed expressions or malformed domains
  Ground,      // instance does not ground the specification
  Instance,    // malformed instance file
  Graph,       // malformed graph document
  Rewrite,     // stale or inapplicable rewrite match
  Solve,       // flattening/solving preconditions violated
  Generate,    // instance sampling failures
  Config,      // bad configuration values
  Io,          // file system problems
};

// Library-wide error. `line`/`column` are 1-based and 0 when unknown.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, int line = 0, int column = 0)
      : std::runtime_error(std::move(message)), kind_(kind), line_(line), column_(column) {}

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

// ============================================================
// Values (instance bindings and solver solutions)
// ============================================================

// A relation value: a sorted, duplicate-free table of integer rows.
// Sets are arity-1 relations. An empty table may carry arity 0 ("unknown");
// empty tables compare equal regardless of recorded arity.
struct RelValue {
  int arity = 0;
  std::vector<std::vector<std::int64_t>> rows;  // each row has `arity` entries

  void canonicalize();  // sort rows, drop duplicates
  bool contains(const std::vector<std::int64_t>& row) const;

  friend bool operator==(const RelValue& a, const RelValue& b) {
    return a.rows == b.rows;
  }
  friend bool operator<(const RelValue& a, const RelValue& b) {
    return a.rows < b.rows;
  }
};

struct Value {
  enum class Kind { Int, Bool, Rel };
  Kind kind = Kind::Int;
  std::int64_t i = 0;
  bool b = false;
  RelValue rel;

  static Value of_int(std::int64_t v);
  static Value of_bool(bool v);
  static Value of_rel(RelValue v);

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator<(const Value& a, const Value& b);
};

// Parameter bindings for one problem instance, keyed by parameter name.
using Instance = std::map<std::string, Value>;

// ============================================================
// Abstract syntax
// ============================================================

// Every specification is a uniform kinded tree: one vertex per surface
// construct, children in surface order. Keeping the shape uniform makes
// pre-order paths, graph encoding, and spine-rebuilding rewrites trivial.
enum class Kind : std::uint8_t {
  Root,            // whole specification
  Find,            // find statement (one decision variable after desugaring)
  Given,           // given statement (one or more parameters, shared domain)
  Letting,         // letting statement (parameter + int expression or domain)
  Where,           // where statement (one instance guard)
  SuchThat,        // such that statement (one or more constraints)
  Objective,       // minimising/maximising statement
  DecisionVar,     // declared decision variable (carries its domain as child)
  Parameter,       // declared parameter name (leaf)
  BinderVar,       // quantifier binder (carries its range as child)
  IntDomain,       // int(lo..hi) or int(lo..)
  BoolDomain,      // bool
  RelationDomain,  // relation/set domain: attribute children then components
  SizeAttr,        // size attribute (one int expression child)
  MinSizeAttr,     // minSize attribute
  MaxSizeAttr,     // maxSize attribute
  DomainRef,       // reference to a letting-declared domain alias
  IntLit,          // integer literal
  BoolLit,         // boolean literal
  Reference,       // reference to a declared name (target recorded after resolve)
  Unary,           // unary expression
  Binary,          // binary expression
  Quantifier,      // forAll/exists/sum
  TupleLit,        // tuple of int expressions, arity >= 2
  RelationLit,     // constant relation/set value
};

enum class RefTarget : std::uint8_t { Unresolved, DecisionVariable, Parameter, Binder };

enum class UnaryOp : std::uint8_t { Neg, Not, ToInt, Card };

enum class BinaryOp : std::uint8_t {
  Add, Sub, Mul, Div, Mod,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Implies, Iff,
  In, SubsetEq,
};

enum class QuantKind : std::uint8_t { ForAll, Exists, Sum };

enum class ObjDir : std::uint8_t { Minimising, Maximising };

struct Node;
using NodePtr = std::shared_ptr<const Node>;
using Ast = NodePtr;

struct Node {
  Kind kind = Kind::Root;

  // Payload; which fields are meaningful depends on `kind`.
  std::int64_t ival = 0;            // IntLit
  bool bval = false;                // BoolLit
  std::string name;                 // declared names, references, aliases
  UnaryOp uop = UnaryOp::Neg;       // Unary
  BinaryOp bop = BinaryOp::Add;     // Binary
  QuantKind quant = QuantKind::ForAll;  // Quantifier
  ObjDir dir = ObjDir::Minimising;  // Objective
  RefTarget target = RefTarget::Unresolved;  // Reference
  int rel_arity = 0;                // RelationLit (meaningful when rows empty)

  std::vector<NodePtr> children;
};

// ---- Builders -------------------------------------------------

NodePtr mk_node(Kind kind, std::vector<NodePtr> children = {});
NodePtr mk_int(std::int64_t v);
NodePtr mk_bool(bool v);
NodePtr mk_ref(std::string name, RefTarget target = RefTarget::Unresolved);
NodePtr mk_unary(UnaryOp op, NodePtr e);
NodePtr mk_binary(BinaryOp op, NodePtr l, NodePtr r);
NodePtr mk_quant(QuantKind kind, std::string binder, NodePtr range, NodePtr body);
NodePtr mk_tuple(std::vector<NodePtr> components);
NodePtr mk_relation_lit(const RelValue& value);
NodePtr mk_int_domain(NodePtr lo, NodePtr hi);        // hi may be null (unbounded)
NodePtr mk_bool_domain();
NodePtr mk_relation_domain(std::vector<NodePtr> attrs, std::vector<NodePtr> components);
NodePtr mk_attr(Kind attr_kind, NodePtr value);
NodePtr mk_domain_ref(std::string name);
NodePtr mk_decision_var(std::string name, NodePtr domain);
NodePtr mk_binder_var(std::string name, NodePtr range);
NodePtr mk_parameter(std::string name);
NodePtr mk_find(std::string name, NodePtr domain);
NodePtr mk_given(std::vector<std::string> names, NodePtr domain);
NodePtr mk_letting(std::string name, NodePtr value_or_domain);
NodePtr mk_where(NodePtr expr);
NodePtr mk_such_that(std::vector<NodePtr> constraints);
NodePtr mk_objective(ObjDir dir, NodePtr expr);
NodePtr mk_root(std::vector<NodePtr> statements);

// Rebuild `node` with one child replaced (functional update).
NodePtr with_child(const NodePtr& node, std::size_t index, NodePtr child);
// Rebuild `node` with a new child list.
NodePtr with_children(const NodePtr& node, std::vector<NodePtr> children);

// ---- Classification ------------------------------------------

bool is_statement(Kind k);
bool is_domain(Kind k);   // IntDomain/BoolDomain/RelationDomain/DomainRef
bool is_expr(Kind k);     // literal, reference, operator, quantifier, tuple
bool is_attr(Kind k);
bool is_literal(Kind k);  // IntLit/BoolLit/RelationLit

bool is_commutative(BinaryOp op);  // +, *, =, !=, /\, \/

// ---- Surface / annotation vocabulary -------------------------

// The surface token of a vertex ("find", "+", "such that", "20", ...).
std::string node_token(const Node& n);
// The annotation tag of a vertex ("FindStatement", "BinaryExpression", ...).
std::string_view kind_tag(const Node& n);
std::string_view binary_op_token(BinaryOp op);
std::string_view unary_op_token(UnaryOp op);
std::string_view quant_token(QuantKind k);

// ---- Structure helpers ---------------------------------------

// Structural equality (payload + children; empty relation literals compare
// equal regardless of recorded arity).
bool ast_equal(const NodePtr& a, const NodePtr& b);

// Total order used for canonical commutative-operand ordering:
// literals < references < compound nodes, ties broken lexicographically by
// surface token and then structurally. Returns <0, 0, >0.
int ast_compare(const NodePtr& a, const NodePtr& b);

// Relation-literal rows in sorted order.
RelValue rel_lit_value(const Node& n);

// Arity of a relation domain (number of component domains).
int relation_domain_arity(const Node& dom);
// Attribute child of a relation domain if present.
const Node* find_attr(const Node& dom, Kind attr_kind);

// Navigate a 1-based child-ordinal path from `root`; throws ErrorKind::Rewrite
// on a dangling path.
NodePtr node_at_path(const NodePtr& root, const std::vector<int>& path);

// Rebuild the spine so the node at `path` becomes `replacement`.
NodePtr replace_at_path(const NodePtr& root, const std::vector<int>& path,
                        NodePtr replacement);

std::size_t count_nodes(const NodePtr& root);

// True for names usable as identifiers: [A-Za-z_][A-Za-z0-9_]* and not a
// language keyword.
bool is_valid_identifier(std::string_view name);

// ============================================================
// Static checking
// ============================================================

// Expression types. Relations carry their arity; arity 0 unifies with any
// relation arity (empty literals).
struct Type {
  enum class Kind { Int, Bool, Tuple, Relation };
  Kind kind = Kind::Int;
  int arity = 0;

  static Type int_t() { return {Kind::Int, 0}; }
  static Type bool_t() { return {Kind::Bool, 0}; }
  static Type tuple_t(int k) { return {Kind::Tuple, k}; }
  static Type rel_t(int k) { return {Kind::Relation, k}; }
};

// Re-resolve and type-check a built tree: verifies grammar shape, scoping
// (declaration before use, binder shadowing), reference targets, and types.
// Returns a tree identical to the input except that unresolved reference
// targets are filled in. Throws Error on violations.
Ast validate(const Ast& root);

}  // namespace reformine

#endif  // REFORMINE_AST_HPP
