#include "reformine/ast.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <sstream>

namespace reformine {

// ============================================================
// Values
// ============================================================

void RelValue::canonicalize() {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (rows.empty()) return;
  arity = static_cast<int>(rows.front().size());
}

bool RelValue::contains(const std::vector<std::int64_t>& row) const {
  return std::binary_search(rows.begin(), rows.end(), row);
}

Value Value::of_int(std::int64_t v) {
  Value out;
  out.kind = Kind::Int;
  out.i = v;
  return out;
}

Value Value::of_bool(bool v) {
  Value out;
  out.kind = Kind::Bool;
  out.b = v;
  return out;
}

Value Value::of_rel(RelValue v) {
  Value out;
  out.kind = Kind::Rel;
  v.canonicalize();
  out.rel = std::move(v);
  return out;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Int: return a.i == b.i;
    case Value::Kind::Bool: return a.b == b.b;
    case Value::Kind::Rel: return a.rel == b.rel;
  }
  return false;
}

bool operator<(const Value& a, const Value& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  switch (a.kind) {
    case Value::Kind::Int: return a.i < b.i;
    case Value::Kind::Bool: return a.b < b.b;
    case Value::Kind::Rel: return a.rel < b.rel;
  }
  return false;
}

// ============================================================
// Builders
// ============================================================

namespace {

std::shared_ptr<Node> make_raw(Kind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

}  // namespace

NodePtr mk_node(Kind kind, std::vector<NodePtr> children) {
  auto n = make_raw(kind);
  n->children = std::move(children);
  return n;
}

NodePtr mk_int(std::int64_t v) {
  auto n = make_raw(Kind::IntLit);
  n->ival = v;
  return n;
}

NodePtr mk_bool(bool v) {
  auto n = make_raw(Kind::BoolLit);
  n->bval = v;
  return n;
}

NodePtr mk_ref(std::string name, RefTarget target) {
  auto n = make_raw(Kind::Reference);
  n->name = std::move(name);
  n->target = target;
  return n;
}

NodePtr mk_unary(UnaryOp op, NodePtr e) {
  auto n = make_raw(Kind::Unary);
  n->uop = op;
  n->children = {std::move(e)};
  return n;
}

NodePtr mk_binary(BinaryOp op, NodePtr l, NodePtr r) {
  auto n = make_raw(Kind::Binary);
  n->bop = op;
  n->children = {std::move(l), std::move(r)};
  return n;
}

NodePtr mk_quant(QuantKind kind, std::string binder, NodePtr range, NodePtr body) {
  auto n = make_raw(Kind::Quantifier);
  n->quant = kind;
  n->children = {mk_binder_var(std::move(binder), std::move(range)), std::move(body)};
  return n;
}

NodePtr mk_tuple(std::vector<NodePtr> components) {
  auto n = make_raw(Kind::TupleLit);
  n->children = std::move(components);
  return n;
}

NodePtr mk_relation_lit(const RelValue& value) {
  RelValue v = value;
  v.canonicalize();
  auto n = make_raw(Kind::RelationLit);
  n->rel_arity = v.arity;
  for (const auto& row : v.rows) {
    if (v.arity == 1) {
      n->children.push_back(mk_int(row.at(0)));
    } else {
      std::vector<NodePtr> comps;
      comps.reserve(row.size());
      for (std::int64_t x : row) comps.push_back(mk_int(x));
      auto tup = make_raw(Kind::TupleLit);
      tup->children = std::move(comps);
      n->children.push_back(tup);
    }
  }
  return n;
}

NodePtr mk_int_domain(NodePtr lo, NodePtr hi) {
  auto n = make_raw(Kind::IntDomain);
  n->children = {std::move(lo)};
  if (hi) n->children.push_back(std::move(hi));
  return n;
}

NodePtr mk_bool_domain() { return make_raw(Kind::BoolDomain); }

NodePtr mk_relation_domain(std::vector<NodePtr> attrs, std::vector<NodePtr> components) {
  auto n = make_raw(Kind::RelationDomain);
  n->children = std::move(attrs);
  for (auto& c : components) n->children.push_back(std::move(c));
  return n;
}

NodePtr mk_attr(Kind attr_kind, NodePtr value) {
  auto n = make_raw(attr_kind);
  n->children = {std::move(value)};
  return n;
}

NodePtr mk_domain_ref(std::string name) {
  auto n = make_raw(Kind::DomainRef);
  n->name = std::move(name);
  return n;
}

NodePtr mk_decision_var(std::string name, NodePtr domain) {
  auto n = make_raw(Kind::DecisionVar);
  n->name = std::move(name);
  n->children = {std::move(domain)};
  return n;
}

NodePtr mk_binder_var(std::string name, NodePtr range) {
  auto n = make_raw(Kind::BinderVar);
  n->name = std::move(name);
  n->children = {std::move(range)};
  return n;
}

NodePtr mk_parameter(std::string name) {
  auto n = make_raw(Kind::Parameter);
  n->name = std::move(name);
  return n;
}

NodePtr mk_find(std::string name, NodePtr domain) {
  auto n = make_raw(Kind::Find);
  n->children = {mk_decision_var(std::move(name), std::move(domain))};
  return n;
}

NodePtr mk_given(std::vector<std::string> names, NodePtr domain) {
  auto n = make_raw(Kind::Given);
  for (auto& name : names) n->children.push_back(mk_parameter(std::move(name)));
  n->children.push_back(std::move(domain));
  return n;
}

NodePtr mk_letting(std::string name, NodePtr value_or_domain) {
  auto n = make_raw(Kind::Letting);
  n->children = {mk_parameter(std::move(name)), std::move(value_or_domain)};
  return n;
}

NodePtr mk_where(NodePtr expr) {
  auto n = make_raw(Kind::Where);
  n->children = {std::move(expr)};
  return n;
}

NodePtr mk_such_that(std::vector<NodePtr> constraints) {
  auto n = make_raw(Kind::SuchThat);
  n->children = std::move(constraints);
  return n;
}

NodePtr mk_objective(ObjDir dir, NodePtr expr) {
  auto n = make_raw(Kind::Objective);
  n->dir = dir;
  n->children = {std::move(expr)};
  return n;
}

NodePtr mk_root(std::vector<NodePtr> statements) {
  auto n = make_raw(Kind::Root);
  n->children = std::move(statements);
  return n;
}

NodePtr with_child(const NodePtr& node, std::size_t index, NodePtr child) {
  assert(index < node->children.size());
  auto n = std::make_shared<Node>(*node);
  n->children[index] = std::move(child);
  return n;
}

NodePtr with_children(const NodePtr& node, std::vector<NodePtr> children) {
  auto n = std::make_shared<Node>(*node);
  n->children = std::move(children);
  return n;
}

// ============================================================
// Classification
// ============================================================

bool is_statement(Kind k) {
  switch (k) {
    case Kind::Find:
    case Kind::Given:
    case Kind::Letting:
    case Kind::Where:
    case Kind::SuchThat:
    case Kind::Objective:
      return true;
    default:
      return false;
  }
}

bool is_domain(Kind k) {
  switch (k) {
    case Kind::IntDomain:
    case Kind::BoolDomain:
    case Kind::RelationDomain:
    case Kind::DomainRef:
      return true;
    default:
      return false;
  }
}

bool is_expr(Kind k) {
  switch (k) {
    case Kind::IntLit:
    case Kind::BoolLit:
    case Kind::Reference:
    case Kind::Unary:
    case Kind::Binary:
    case Kind::Quantifier:
    case Kind::TupleLit:
    case Kind::RelationLit:
      return true;
    default:
      return false;
  }
}

bool is_attr(Kind k) {
  return k == Kind::SizeAttr || k == Kind::MinSizeAttr || k == Kind::MaxSizeAttr;
}

bool is_literal(Kind k) {
  return k == Kind::IntLit || k == Kind::BoolLit || k == Kind::RelationLit;
}

bool is_commutative(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Mul:
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::And:
    case BinaryOp::Or:
      return true;
    default:
      return false;
  }
}

// ============================================================
// Surface tokens and kind tags
// ============================================================

std::string_view binary_op_token(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "/\\";
    case BinaryOp::Or: return "\\/";
    case BinaryOp::Implies: return "->";
    case BinaryOp::Iff: return "<->";
    case BinaryOp::In: return "in";
    case BinaryOp::SubsetEq: return "subsetEq";
  }
  return "?";
}

std::string_view unary_op_token(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Not: return "!";
    case UnaryOp::ToInt: return "toInt";
    case UnaryOp::Card: return "|.|";
  }
  return "?";
}

std::string_view quant_token(QuantKind k) {
  switch (k) {
    case QuantKind::ForAll: return "forAll";
    case QuantKind::Exists: return "exists";
    case QuantKind::Sum: return "sum";
  }
  return "?";
}

std::string node_token(const Node& n) {
  switch (n.kind) {
    case Kind::Root: return "root";
    case Kind::Find: return "find";
    case Kind::Given: return "given";
    case Kind::Letting: return "letting";
    case Kind::Where: return "where";
    case Kind::SuchThat: return "such that";
    case Kind::Objective:
      return n.dir == ObjDir::Minimising ? "minimising" : "maximising";
    case Kind::DecisionVar:
    case Kind::Parameter:
    case Kind::BinderVar:
    case Kind::Reference:
    case Kind::DomainRef:
      return n.name;
    case Kind::IntDomain: return "int";
    case Kind::BoolDomain: return "bool";
    case Kind::RelationDomain:
      return relation_domain_arity(n) == 1 ? "set" : "relation";
    case Kind::SizeAttr: return "size";
    case Kind::MinSizeAttr: return "minSize";
    case Kind::MaxSizeAttr: return "maxSize";
    case Kind::IntLit: return std::to_string(n.ival);
    case Kind::BoolLit: return n.bval ? "true" : "false";
    case Kind::Unary: return std::string(unary_op_token(n.uop));
    case Kind::Binary: return std::string(binary_op_token(n.bop));
    case Kind::Quantifier: return std::string(quant_token(n.quant));
    case Kind::TupleLit: return "tuple";
    case Kind::RelationLit:
      return (n.children.empty() || n.rel_arity == 1) ? "set" : "relation";
  }
  return "?";
}

std::string_view kind_tag(const Node& n) {
  switch (n.kind) {
    case Kind::Root: return "Node";
    case Kind::Find: return "FindStatement";
    case Kind::Given: return "GivenStatement";
    case Kind::Letting: return "LettingStatement";
    case Kind::Where: return "WhereStatement";
    case Kind::SuchThat: return "SuchThatStatement";
    case Kind::Objective: return "ObjectiveStatement";
    case Kind::DecisionVar: return "DecisionVariable";
    case Kind::Parameter: return "Parameter";
    case Kind::BinderVar: return "BinderVariable";
    case Kind::IntDomain: return "IntDomain";
    case Kind::BoolDomain: return "BoolDomain";
    case Kind::RelationDomain: return "RelationDomain";
    case Kind::SizeAttr: return "SizeAttribute";
    case Kind::MinSizeAttr: return "MinSizeAttribute";
    case Kind::MaxSizeAttr: return "MaxSizeAttribute";
    case Kind::DomainRef: return "ReferenceToDomain";
    case Kind::IntLit: return "Integer";
    case Kind::BoolLit: return "Boolean";
    case Kind::Unary: return "UnaryExpression";
    case Kind::Binary: return "BinaryExpression";
    case Kind::Quantifier: return "Quantifier";
    case Kind::TupleLit: return "TupleLiteral";
    case Kind::RelationLit: return "RelationLiteral";
    case Kind::Reference:
      switch (n.target) {
        case RefTarget::DecisionVariable: return "ReferenceToDecisionVariable";
        case RefTarget::Parameter: return "ReferenceToParameter";
        case RefTarget::Binder: return "ReferenceToBinder";
        case RefTarget::Unresolved: return "Reference";
      }
      return "Reference";
  }
  return "?";
}

// ============================================================
// Structural equality and ordering
// ============================================================

namespace {

bool payload_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::IntLit: return a.ival == b.ival;
    case Kind::BoolLit: return a.bval == b.bval;
    case Kind::Reference: return a.name == b.name && a.target == b.target;
    case Kind::DecisionVar:
    case Kind::Parameter:
    case Kind::BinderVar:
    case Kind::DomainRef:
      return a.name == b.name;
    case Kind::Unary: return a.uop == b.uop;
    case Kind::Binary: return a.bop == b.bop;
    case Kind::Quantifier: return a.quant == b.quant;
    case Kind::Objective: return a.dir == b.dir;
    case Kind::RelationLit:
      // Empty tables compare equal regardless of recorded arity.
      if (a.children.empty() && b.children.empty()) return true;
      return true;  // arity follows from children
    default:
      return true;
  }
}

}  // namespace

bool ast_equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (!payload_equal(*a, *b)) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!ast_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

int ast_compare(const NodePtr& a, const NodePtr& b) {
  auto rank = [](const Node& n) {
    if (is_literal(n.kind)) return 0;
    if (n.kind == Kind::Reference) return 1;
    return 2;
  };
  int ra = rank(*a), rb = rank(*b);
  if (ra != rb) return ra < rb ? -1 : 1;
  std::string ta = node_token(*a), tb = node_token(*b);
  if (ta != tb) return ta < tb ? -1 : 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->kind == Kind::Reference && a->target != b->target) {
    return a->target < b->target ? -1 : 1;
  }
  if (a->children.size() != b->children.size()) {
    return a->children.size() < b->children.size() ? -1 : 1;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    int c = ast_compare(a->children[i], b->children[i]);
    if (c != 0) return c;
  }
  return 0;
}

RelValue rel_lit_value(const Node& n) {
  assert(n.kind == Kind::RelationLit);
  RelValue out;
  out.arity = n.rel_arity;
  for (const auto& row_node : n.children) {
    std::vector<std::int64_t> row;
    if (row_node->kind == Kind::IntLit) {
      row.push_back(row_node->ival);
    } else {
      for (const auto& c : row_node->children) row.push_back(c->ival);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

int relation_domain_arity(const Node& dom) {
  assert(dom.kind == Kind::RelationDomain);
  int components = 0;
  for (const auto& c : dom.children) {
    if (!is_attr(c->kind)) ++components;
  }
  return components;
}

const Node* find_attr(const Node& dom, Kind attr_kind) {
  for (const auto& c : dom.children) {
    if (c->kind == attr_kind) return c.get();
  }
  return nullptr;
}

NodePtr node_at_path(const NodePtr& root, const std::vector<int>& path) {
  NodePtr cur = root;
  for (int ordinal : path) {
    if (ordinal < 1 || static_cast<std::size_t>(ordinal) > cur->children.size()) {
      throw Error(ErrorKind::Rewrite, "stale match: path does not address a node");
    }
    cur = cur->children[static_cast<std::size_t>(ordinal) - 1];
  }
  return cur;
}

NodePtr replace_at_path(const NodePtr& root, const std::vector<int>& path,
                        NodePtr replacement) {
  if (path.empty()) return replacement;
  int ordinal = path.front();
  if (ordinal < 1 || static_cast<std::size_t>(ordinal) > root->children.size()) {
    throw Error(ErrorKind::Rewrite, "stale match: path does not address a node");
  }
  std::vector<int> rest(path.begin() + 1, path.end());
  NodePtr child = root->children[static_cast<std::size_t>(ordinal) - 1];
  return with_child(root, static_cast<std::size_t>(ordinal) - 1,
                    replace_at_path(child, rest, std::move(replacement)));
}

std::size_t count_nodes(const NodePtr& root) {
  std::size_t n = 1;
  for (const auto& c : root->children) n += count_nodes(c);
  return n;
}

// ============================================================
// Validation: grammar shape, scoping, types
// ============================================================

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

bool type_equal(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::Tuple) return a.arity == b.arity;
  if (a.kind == Type::Kind::Relation) {
    return a.arity == 0 || b.arity == 0 || a.arity == b.arity;
  }
  return true;
}

std::string type_name(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int: return "int";
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Tuple: return "tuple of arity " + std::to_string(t.arity);
    case Type::Kind::Relation:
      return t.arity == 1 ? "set" : "relation of arity " + std::to_string(t.arity);
  }
  return "?";
}

struct TopDecl {
  enum class What { Find, GivenParam, LettingParam, DomainAlias };
  What what = What::Find;
  Type type;
  NodePtr domain;  // declared domain for finds/givens, aliased domain for aliases
};

struct Checker {
  std::map<std::string, TopDecl> top;
  std::vector<std::pair<std::string, Type>> binders;
  bool saw_objective = false;

  // When true, expressions may not reference decision variables.
  // When additionally no_binders is set (domain bounds, attribute values),
  // they may reference parameters only.
  NodePtr check_expr(const NodePtr& e, Type expect, bool no_finds, bool no_binders);
  std::pair<NodePtr, Type> infer_expr(const NodePtr& e, bool no_finds, bool no_binders);
  NodePtr check_domain(const NodePtr& d, bool allow_relation);
  Type domain_type(const NodePtr& d);
  NodePtr check_statement(const NodePtr& s);

  void declare(const std::string& name, TopDecl decl) {
    if (!name.empty() && top.count(name)) {
      fail(ErrorKind::Resolve, "duplicate declaration of '" + name + "'");
    }
    top.emplace(name, std::move(decl));
  }
};

void expect_children(const Node& n, std::size_t lo, std::size_t hi,
                     const char* what) {
  if (n.children.size() < lo || n.children.size() > hi) {
    fail(ErrorKind::Type, std::string(what) + " has " +
                              std::to_string(n.children.size()) +
                              " children, expected between " + std::to_string(lo) +
                              " and " + std::to_string(hi));
  }
}

void check_name(const std::string& name, const char* what) {
  if (!is_valid_identifier(name)) {
    fail(ErrorKind::Resolve,
         std::string(what) + " name '" + name + "' is not a valid identifier");
  }
}

NodePtr Checker::check_domain(const NodePtr& d, bool allow_relation) {
  switch (d->kind) {
    case Kind::BoolDomain:
      expect_children(*d, 0, 0, "bool domain");
      return d;
    case Kind::IntDomain: {
      expect_children(*d, 1, 2, "int domain");
      std::vector<NodePtr> kids;
      for (const auto& bound : d->children) {
        kids.push_back(check_expr(bound, Type::int_t(), true, true));
      }
      return with_children(d, std::move(kids));
    }
    case Kind::DomainRef: {
      expect_children(*d, 0, 0, "domain reference");
      check_name(d->name, "domain reference");
      auto it = top.find(d->name);
      if (it == top.end() || it->second.what != TopDecl::What::DomainAlias) {
        fail(ErrorKind::Resolve, "unresolved domain alias '" + d->name + "'");
      }
      if (!allow_relation && it->second.type.kind == Type::Kind::Relation) {
        fail(ErrorKind::Type, "domain alias '" + d->name +
                                  "' names a relation domain where an int domain "
                                  "is required");
      }
      return d;
    }
    case Kind::RelationDomain: {
      if (!allow_relation) {
        fail(ErrorKind::Type, "nested relation domains are not supported");
      }
      bool seen_component = false;
      bool has_size = false, has_min = false, has_max = false;
      int components = 0;
      std::vector<NodePtr> kids;
      for (const auto& c : d->children) {
        if (is_attr(c->kind)) {
          if (seen_component) {
            fail(ErrorKind::Type, "relation domain attributes must precede components");
          }
          expect_children(*c, 1, 1, "domain attribute");
          bool* flag = c->kind == Kind::SizeAttr ? &has_size
                       : c->kind == Kind::MinSizeAttr ? &has_min
                                                      : &has_max;
          if (*flag) fail(ErrorKind::Type, "repeated domain attribute");
          *flag = true;
          kids.push_back(with_child(
              c, 0, check_expr(c->children[0], Type::int_t(), true, true)));
        } else {
          seen_component = true;
          ++components;
          NodePtr comp = check_domain(c, false);
          Type t = domain_type(comp);
          if (t.kind != Type::Kind::Int) {
            fail(ErrorKind::Type, "relation component domains must be int domains");
          }
          kids.push_back(std::move(comp));
        }
      }
      if (components < 1) {
        fail(ErrorKind::Type, "relation domain needs at least one component");
      }
      if (has_size && (has_min || has_max)) {
        fail(ErrorKind::Type, "size excludes minSize/maxSize");
      }
      return with_children(d, std::move(kids));
    }
    default:
      fail(ErrorKind::Type, "expected a domain");
  }
}

Type Checker::domain_type(const NodePtr& d) {
  switch (d->kind) {
    case Kind::BoolDomain: return Type::bool_t();
    case Kind::IntDomain: return Type::int_t();
    case Kind::RelationDomain: return Type::rel_t(relation_domain_arity(*d));
    case Kind::DomainRef: {
      auto it = top.find(d->name);
      assert(it != top.end());
      return it->second.type;
    }
    default:
      fail(ErrorKind::Type, "expected a domain");
  }
}

std::pair<NodePtr, Type> Checker::infer_expr(const NodePtr& e, bool no_finds,
                                             bool no_binders) {
  switch (e->kind) {
    case Kind::IntLit:
      expect_children(*e, 0, 0, "integer literal");
      return {e, Type::int_t()};
    case Kind::BoolLit:
      expect_children(*e, 0, 0, "boolean literal");
      return {e, Type::bool_t()};
    case Kind::RelationLit: {
      int arity = 0;
      for (const auto& row : e->children) {
        int row_arity = 0;
        if (row->kind == Kind::IntLit) {
          row_arity = 1;
        } else if (row->kind == Kind::TupleLit) {
          for (const auto& c : row->children) {
            if (c->kind != Kind::IntLit) {
              fail(ErrorKind::Type, "relation literal rows must be integer constants");
            }
          }
          row_arity = static_cast<int>(row->children.size());
        } else {
          fail(ErrorKind::Type, "relation literal rows must be integer constants");
        }
        if (arity == 0) {
          arity = row_arity;
        } else if (arity != row_arity) {
          fail(ErrorKind::Type, "relation literal rows have mixed arities");
        }
      }
      RelValue v = rel_lit_value(*e);
      RelValue canon = v;
      canon.canonicalize();
      if (v.rows != canon.rows) {
        fail(ErrorKind::Type, "relation literal rows must be sorted and distinct");
      }
      if (!e->children.empty() && e->rel_arity != arity) {
        fail(ErrorKind::Type, "relation literal arity does not match its rows");
      }
      return {e, Type::rel_t(arity)};
    }
    case Kind::Reference: {
      expect_children(*e, 0, 0, "reference");
      check_name(e->name, "reference");
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
        if (it->first == e->name) {
          if (no_binders) {
            fail(ErrorKind::Type, "domain bounds and attributes may only reference "
                                  "parameters, not binder '" + e->name + "'");
          }
          if (e->target != RefTarget::Unresolved && e->target != RefTarget::Binder) {
            fail(ErrorKind::Resolve,
                 "reference '" + e->name + "' resolves to a binder but is tagged " +
                     std::string(kind_tag(*e)));
          }
          return {mk_ref(e->name, RefTarget::Binder), it->second};
        }
      }
      auto it = top.find(e->name);
      if (it == top.end()) {
        fail(ErrorKind::Resolve, "unresolved identifier '" + e->name + "'");
      }
      const TopDecl& decl = it->second;
      RefTarget want;
      switch (decl.what) {
        case TopDecl::What::Find:
          want = RefTarget::DecisionVariable;
          break;
        case TopDecl::What::GivenParam:
        case TopDecl::What::LettingParam:
          want = RefTarget::Parameter;
          break;
        case TopDecl::What::DomainAlias:
          fail(ErrorKind::Type,
               "domain alias '" + e->name + "' used as a value");
      }
      if (no_finds && want == RefTarget::DecisionVariable) {
        fail(ErrorKind::Type, "decision variable '" + e->name +
                                  "' referenced where only parameters are allowed");
      }
      if (e->target != RefTarget::Unresolved && e->target != want) {
        fail(ErrorKind::Resolve, "reference '" + e->name +
                                     "' is tagged " + std::string(kind_tag(*e)) +
                                     " but resolves otherwise");
      }
      return {mk_ref(e->name, want), decl.type};
    }
    case Kind::TupleLit: {
      if (e->children.size() < 2) {
        fail(ErrorKind::Type, "tuple literals need at least two components");
      }
      std::vector<NodePtr> kids;
      for (const auto& c : e->children) {
        kids.push_back(check_expr(c, Type::int_t(), no_finds, no_binders));
      }
      return {with_children(e, std::move(kids)),
              Type::tuple_t(static_cast<int>(e->children.size()))};
    }
    case Kind::Unary: {
      expect_children(*e, 1, 1, "unary expression");
      switch (e->uop) {
        case UnaryOp::Neg: {
          auto c = check_expr(e->children[0], Type::int_t(), no_finds, no_binders);
          return {with_child(e, 0, std::move(c)), Type::int_t()};
        }
        case UnaryOp::Not: {
          auto c = check_expr(e->children[0], Type::bool_t(), no_finds, no_binders);
          return {with_child(e, 0, std::move(c)), Type::bool_t()};
        }
        case UnaryOp::ToInt: {
          auto c = check_expr(e->children[0], Type::bool_t(), no_finds, no_binders);
          return {with_child(e, 0, std::move(c)), Type::int_t()};
        }
        case UnaryOp::Card: {
          auto [c, t] = infer_expr(e->children[0], no_finds, no_binders);
          if (t.kind != Type::Kind::Relation) {
            fail(ErrorKind::Type, "cardinality applies to sets and relations, got " +
                                      type_name(t));
          }
          return {with_child(e, 0, std::move(c)), Type::int_t()};
        }
      }
      fail(ErrorKind::Type, "unknown unary operator");
    }
    case Kind::Binary: {
      expect_children(*e, 2, 2, "binary expression");
      auto arith = [&](Type t) {
        auto l = check_expr(e->children[0], t, no_finds, no_binders);
        auto r = check_expr(e->children[1], t, no_finds, no_binders);
        return with_children(e, {std::move(l), std::move(r)});
      };
      switch (e->bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod:
          return {arith(Type::int_t()), Type::int_t()};
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
          return {arith(Type::int_t()), Type::bool_t()};
        case BinaryOp::And:
        case BinaryOp::Or:
        case BinaryOp::Implies:
        case BinaryOp::Iff:
          return {arith(Type::bool_t()), Type::bool_t()};
        case BinaryOp::Eq:
        case BinaryOp::Ne: {
          auto [l, lt] = infer_expr(e->children[0], no_finds, no_binders);
          auto [r, rt] = infer_expr(e->children[1], no_finds, no_binders);
          bool ok = type_equal(lt, rt) &&
                    (lt.kind == Type::Kind::Int || lt.kind == Type::Kind::Bool ||
                     lt.kind == Type::Kind::Tuple);
          if (!ok) {
            fail(ErrorKind::Type, "cannot compare " + type_name(lt) + " with " +
                                      type_name(rt));
          }
          return {with_children(e, {std::move(l), std::move(r)}), Type::bool_t()};
        }
        case BinaryOp::In: {
          auto [l, lt] = infer_expr(e->children[0], no_finds, no_binders);
          auto [r, rt] = infer_expr(e->children[1], no_finds, no_binders);
          if (rt.kind != Type::Kind::Relation) {
            fail(ErrorKind::Type, "right operand of 'in' must be a set or relation");
          }
          bool ok = (lt.kind == Type::Kind::Int &&
                     (rt.arity == 1 || rt.arity == 0)) ||
                    (lt.kind == Type::Kind::Tuple &&
                     (rt.arity == lt.arity || rt.arity == 0));
          if (!ok) {
            fail(ErrorKind::Type, "membership arity mismatch: " + type_name(lt) +
                                      " in " + type_name(rt));
          }
          return {with_children(e, {std::move(l), std::move(r)}), Type::bool_t()};
        }
        case BinaryOp::SubsetEq: {
          auto [l, lt] = infer_expr(e->children[0], no_finds, no_binders);
          auto [r, rt] = infer_expr(e->children[1], no_finds, no_binders);
          if (lt.kind != Type::Kind::Relation || rt.kind != Type::Kind::Relation ||
              !type_equal(lt, rt)) {
            fail(ErrorKind::Type, "subsetEq relates relations of equal arity, got " +
                                      type_name(lt) + " and " + type_name(rt));
          }
          return {with_children(e, {std::move(l), std::move(r)}), Type::bool_t()};
        }
      }
      fail(ErrorKind::Type, "unknown binary operator");
    }
    case Kind::Quantifier: {
      expect_children(*e, 2, 2, "quantifier");
      const NodePtr& binder = e->children[0];
      if (binder->kind != Kind::BinderVar || binder->children.size() != 1) {
        fail(ErrorKind::Type, "quantifier binder is malformed");
      }
      check_name(binder->name, "binder");
      const NodePtr& range = binder->children[0];
      NodePtr checked_range;
      Type binder_type;
      if (is_domain(range->kind)) {
        checked_range = check_domain(range, false);
        binder_type = domain_type(checked_range);
      } else if (range->kind == Kind::Reference) {
        auto [r, rt] = infer_expr(range, no_finds, no_binders);
        if (rt.kind != Type::Kind::Relation) {
          fail(ErrorKind::Type, "quantifier range must be an int domain or a "
                                "set-valued reference");
        }
        checked_range = std::move(r);
        binder_type = rt.arity == 1 || rt.arity == 0 ? Type::int_t()
                                                     : Type::tuple_t(rt.arity);
      } else if (range->kind == Kind::RelationLit) {
        auto [r, rt] = infer_expr(range, no_finds, no_binders);
        checked_range = std::move(r);
        binder_type = rt.arity == 1 || rt.arity == 0 ? Type::int_t()
                                                     : Type::tuple_t(rt.arity);
      } else {
        fail(ErrorKind::Type, "quantifier range must be an int domain or a "
                              "set-valued reference");
      }
      binders.emplace_back(binder->name, binder_type);
      Type body_type =
          e->quant == QuantKind::Sum ? Type::int_t() : Type::bool_t();
      NodePtr body;
      try {
        body = check_expr(e->children[1], body_type, no_finds, no_binders);
      } catch (...) {
        binders.pop_back();
        throw;
      }
      binders.pop_back();
      NodePtr new_binder = mk_binder_var(binder->name, std::move(checked_range));
      Type result = e->quant == QuantKind::Sum ? Type::int_t() : Type::bool_t();
      return {with_children(e, {std::move(new_binder), std::move(body)}), result};
    }
    default:
      fail(ErrorKind::Type, "expected an expression, found " +
                                std::string(kind_tag(*e)));
  }
}

NodePtr Checker::check_expr(const NodePtr& e, Type expect, bool no_finds,
                            bool no_binders) {
  auto [node, t] = infer_expr(e, no_finds, no_binders);
  if (!type_equal(t, expect)) {
    fail(ErrorKind::Type,
         "expected " + type_name(expect) + ", got " + type_name(t));
  }
  return node;
}

NodePtr Checker::check_statement(const NodePtr& s) {
  switch (s->kind) {
    case Kind::Find: {
      expect_children(*s, 1, 1, "find statement");
      const NodePtr& dv = s->children[0];
      if (dv->kind != Kind::DecisionVar || dv->children.size() != 1) {
        fail(ErrorKind::Type, "find statement is malformed");
      }
      check_name(dv->name, "decision variable");
      NodePtr domain = check_domain(dv->children[0], true);
      Type t = domain_type(domain);
      declare(dv->name, {TopDecl::What::Find, t, domain});
      return mk_find(dv->name, std::move(domain));
    }
    case Kind::Given: {
      if (s->children.size() < 2) {
        fail(ErrorKind::Type, "given statement needs names and a domain");
      }
      std::vector<std::string> names;
      for (std::size_t i = 0; i + 1 < s->children.size(); ++i) {
        const NodePtr& p = s->children[i];
        if (p->kind != Kind::Parameter || !p->children.empty()) {
          fail(ErrorKind::Type, "given statement is malformed");
        }
        check_name(p->name, "parameter");
        names.push_back(p->name);
      }
      NodePtr domain = check_domain(s->children.back(), true);
      Type t = domain_type(domain);
      if (t.kind != Type::Kind::Int && t.kind != Type::Kind::Relation) {
        fail(ErrorKind::Type, "given parameters must have int or relation domains");
      }
      for (const auto& name : names) {
        declare(name, {TopDecl::What::GivenParam, t, domain});
      }
      return mk_given(std::move(names), std::move(domain));
    }
    case Kind::Letting: {
      expect_children(*s, 2, 2, "letting statement");
      const NodePtr& p = s->children[0];
      if (p->kind != Kind::Parameter || !p->children.empty()) {
        fail(ErrorKind::Type, "letting statement is malformed");
      }
      check_name(p->name, "parameter");
      const NodePtr& value = s->children[1];
      if (is_domain(value->kind)) {
        NodePtr domain = check_domain(value, true);
        Type t = domain_type(domain);
        declare(p->name, {TopDecl::What::DomainAlias, t, domain});
        return mk_letting(p->name, std::move(domain));
      }
      NodePtr expr = check_expr(value, Type::int_t(), true, true);
      declare(p->name, {TopDecl::What::LettingParam, Type::int_t(), nullptr});
      return mk_letting(p->name, std::move(expr));
    }
    case Kind::Where: {
      expect_children(*s, 1, 1, "where statement");
      return mk_where(check_expr(s->children[0], Type::bool_t(), true, false));
    }
    case Kind::SuchThat: {
      if (s->children.empty()) {
        fail(ErrorKind::Type, "such that statement needs at least one constraint");
      }
      std::vector<NodePtr> constraints;
      for (const auto& c : s->children) {
        constraints.push_back(check_expr(c, Type::bool_t(), false, false));
      }
      return mk_such_that(std::move(constraints));
    }
    case Kind::Objective: {
      expect_children(*s, 1, 1, "objective statement");
      if (saw_objective) {
        fail(ErrorKind::Type, "at most one objective statement is allowed");
      }
      saw_objective = true;
      NodePtr expr = check_expr(s->children[0], Type::int_t(), false, false);
      return mk_objective(s->dir, std::move(expr));
    }
    default:
      fail(ErrorKind::Type, "expected a statement, found " +
                                std::string(kind_tag(*s)));
  }
}

}  // namespace

bool is_valid_identifier(std::string_view name) {
  static const std::array<std::string_view, 23> kReserved = {
      "given", "letting", "where", "find", "such", "that", "minimising",
      "maximising", "be", "domain", "int", "bool", "set", "relation", "of",
      "size", "minSize", "maxSize", "forAll", "exists", "sum", "in",
      "subsetEq"};
  if (name.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alnum(c)) return false;
  }
  for (auto kw : kReserved) {
    if (name == kw) return false;
  }
  if (name == "true" || name == "false" || name == "toInt") return false;
  return true;
}

Ast validate(const Ast& root) {
  if (!root || root->kind != Kind::Root) {
    fail(ErrorKind::Type, "specification root is malformed");
  }
  Checker checker;
  std::vector<NodePtr> statements;
  statements.reserve(root->children.size());
  for (const auto& s : root->children) {
    statements.push_back(checker.check_statement(s));
  }
  return mk_root(std::move(statements));
}

}  // namespace reformine
