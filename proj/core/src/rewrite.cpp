#include "reformine/rewrite.hpp"

#include <algorithm>
#include <optional>
#include <utility>

#include "eval.hpp"
#include "reformine/pretty.hpp"

namespace reformine {

namespace {

[[noreturn]] void stale(const std::string& why) {
  throw Error(ErrorKind::Rewrite, "stale match: " + why);
}

// Step budget for closed-subtree evaluation during matching; large enough
// for any reasonable constant subtree, small enough to keep enumeration
// prompt when a closed quantifier nest is huge.
constexpr std::uint64_t kFoldSteps = 1'000'000;

// ---- Closedness ----------------------------------------------

bool closed_rec(const NodePtr& n, std::vector<std::string>& bound) {
  switch (n->kind) {
    case Kind::Reference: {
      if (n->target != RefTarget::Binder) return false;
      return std::find(bound.rbegin(), bound.rend(), n->name) != bound.rend();
    }
    case Kind::DomainRef:
      return false;
    case Kind::Quantifier: {
      const NodePtr& binder = n->children[0];
      if (!closed_rec(binder->children[0], bound)) return false;
      bound.push_back(binder->name);
      bool ok = closed_rec(n->children[1], bound);
      bound.pop_back();
      return ok;
    }
    default:
      for (const NodePtr& c : n->children)
        if (!closed_rec(c, bound)) return false;
      return true;
  }
}

// An expression mentioning no name bound outside it.
bool is_closed(const NodePtr& n) {
  std::vector<std::string> bound;
  return closed_rec(n, bound);
}

NodePtr literal_of(const EvalValue& v) {
  switch (v.kind) {
    case EvalValue::Kind::Int: return mk_int(v.i);
    case EvalValue::Kind::Bool: return mk_bool(v.b);
    case EvalValue::Kind::Rel: return mk_relation_lit(v.rel);
    case EvalValue::Kind::Tuple: {
      std::vector<NodePtr> comps;
      comps.reserve(v.tup.size());
      for (std::int64_t c : v.tup) comps.push_back(mk_int(c));
      return mk_tuple(std::move(comps));
    }
  }
  return nullptr;
}

// The folded form of a closed, evaluable, non-literal expression whose
// value differs from its current spelling; null when the node is no such
// thing.
NodePtr try_fold(const NodePtr& n) {
  if (!is_expr(n->kind) || is_literal(n->kind)) return nullptr;
  if (!is_closed(n)) return nullptr;
  try {
    EvalEnv env;
    env.set_step_limit(kFoldSteps);
    NodePtr lit = literal_of(eval_expr(n, env));
    if (lit == nullptr || ast_equal(lit, n)) return nullptr;
    return lit;
  } catch (const Error&) {
    return nullptr;
  }
}

// True when the expression is constant: closed and evaluable.
bool is_const_expr(const NodePtr& n) {
  if (!is_expr(n->kind) || !is_closed(n)) return false;
  try {
    EvalEnv env;
    env.set_step_limit(kFoldSteps);
    eval_expr(n, env);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// ---- Identity patterns ---------------------------------------

bool int_lit(const NodePtr& n, std::int64_t v) {
  return n->kind == Kind::IntLit && n->ival == v;
}
bool bool_lit(const NodePtr& n, bool v) {
  return n->kind == Kind::BoolLit && n->bval == v;
}

// The operand an identity anchor reduces to, or null.
NodePtr identity_residue(const NodePtr& n) {
  if (n->kind == Kind::Unary && n->uop == UnaryOp::Not) {
    const NodePtr& inner = n->children[0];
    if (inner->kind == Kind::Unary && inner->uop == UnaryOp::Not)
      return inner->children[0];
    return nullptr;
  }
  if (n->kind != Kind::Binary) return nullptr;
  const NodePtr& l = n->children[0];
  const NodePtr& r = n->children[1];
  switch (n->bop) {
    case BinaryOp::Mul:
      if (int_lit(r, 1)) return l;
      if (int_lit(l, 1)) return r;
      return nullptr;
    case BinaryOp::Add:
      if (int_lit(r, 0)) return l;
      if (int_lit(l, 0)) return r;
      return nullptr;
    case BinaryOp::And:
      if (bool_lit(r, true)) return l;
      if (bool_lit(l, true)) return r;
      return nullptr;
    case BinaryOp::Or:
      if (bool_lit(r, false)) return l;
      if (bool_lit(l, false)) return r;
      return nullptr;
    default:
      return nullptr;
  }
}

// ---- Declared-domain lookup ----------------------------------

// The declared domain of `name` (a find or given), or null.
NodePtr declared_domain(const Ast& root, const std::string& name) {
  for (const NodePtr& stmt : root->children) {
    if (stmt->kind == Kind::Find) {
      const NodePtr& var = stmt->children[0];
      if (var->name == name) return var->children[0];
    } else if (stmt->kind == Kind::Given) {
      for (const NodePtr& p : stmt->children)
        if (p->kind == Kind::Parameter && p->name == name)
          return stmt->children.back();
    }
  }
  return nullptr;
}

std::optional<std::int64_t> literal_attr(const NodePtr& dom, Kind attr_kind) {
  const Node* a = find_attr(*dom, attr_kind);
  if (a == nullptr) return std::nullopt;
  if (a->children[0]->kind != Kind::IntLit) return std::nullopt;
  return a->children[0]->ival;
}

bool has_attr(const NodePtr& dom, Kind attr_kind) {
  return find_attr(*dom, attr_kind) != nullptr;
}

// All attribute values literal (vacuously true without attributes).
bool attrs_literal(const NodePtr& dom) {
  for (const NodePtr& c : dom->children)
    if (is_attr(c->kind) && c->children[0]->kind != Kind::IntLit) return false;
  return true;
}

// ---- implied-sum helpers -------------------------------------

bool weakenable_cmp(BinaryOp op) {
  return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt ||
         op == BinaryOp::Ge;
}
BinaryOp weakened(BinaryOp op) {
  if (op == BinaryOp::Lt) return BinaryOp::Le;
  if (op == BinaryOp::Gt) return BinaryOp::Ge;
  return op;
}

// Ranges whose nonemptiness is evident from the tree: a nonempty literal,
// bool, a literal int range with lo <= hi (or no upper bound), or a
// reference whose declared domain carries a literal size/minSize >= 1.
bool provably_nonempty(const NodePtr& range, const Ast& root) {
  switch (range->kind) {
    case Kind::RelationLit:
      return !range->children.empty();
    case Kind::BoolDomain:
      return true;
    case Kind::IntDomain:
      if (range->children[0]->kind != Kind::IntLit) return false;
      if (range->children.size() == 1) return true;
      return range->children[1]->kind == Kind::IntLit &&
             range->children[0]->ival <= range->children[1]->ival;
    case Kind::Reference: {
      NodePtr dom = declared_domain(root, range->name);
      if (dom == nullptr || dom->kind != Kind::RelationDomain) return false;
      auto size = literal_attr(dom, Kind::SizeAttr);
      auto min = literal_attr(dom, Kind::MinSizeAttr);
      return (size && *size >= 1) || (min && *min >= 1);
    }
    default:
      return false;
  }
}

// A forAll over int expressions directly under a such-that statement.
bool implied_sum_anchor(const NodePtr& n) {
  if (n->kind != Kind::Quantifier || n->quant != QuantKind::ForAll) return false;
  const NodePtr& body = n->children[1];
  return body->kind == Kind::Binary && weakenable_cmp(body->bop);
}

// ---- card-to-attr helpers ------------------------------------

struct CardPattern {
  std::string var;     // the find whose domain gains the attribute
  Kind attr;           // SizeAttr/MinSizeAttr/MaxSizeAttr
  std::int64_t value;  // the attribute value
};

std::int64_t attr_code(Kind k) {
  return k == Kind::SizeAttr ? 0 : k == Kind::MinSizeAttr ? 1 : 2;
}

BinaryOp flipped_cmp(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: return BinaryOp::Gt;
    case BinaryOp::Le: return BinaryOp::Ge;
    case BinaryOp::Gt: return BinaryOp::Lt;
    case BinaryOp::Ge: return BinaryOp::Le;
    default: return op;
  }
}

const NodePtr* card_operand(const NodePtr& side) {
  if (side->kind == Kind::Unary && side->uop == UnaryOp::Card &&
      side->children[0]->kind == Kind::Reference &&
      side->children[0]->target == RefTarget::DecisionVariable)
    return &side->children[0];
  return nullptr;
}

// Decompose `|S| cmp k` / `k cmp |S|` into the attribute it encodes.
std::optional<CardPattern> match_card(const NodePtr& c) {
  if (c->kind != Kind::Binary) return std::nullopt;
  BinaryOp op = c->bop;
  if (op != BinaryOp::Eq && !weakenable_cmp(op)) return std::nullopt;
  const NodePtr* ref = card_operand(c->children[0]);
  NodePtr lit = c->children[1];
  if (ref == nullptr) {
    ref = card_operand(c->children[1]);
    lit = c->children[0];
    op = flipped_cmp(op);
  }
  if (ref == nullptr || lit->kind != Kind::IntLit || lit->ival < 0)
    return std::nullopt;
  std::int64_t k = lit->ival;
  CardPattern p;
  p.var = (*ref)->name;
  switch (op) {
    case BinaryOp::Eq: p.attr = Kind::SizeAttr; p.value = k; break;
    case BinaryOp::Le: p.attr = Kind::MaxSizeAttr; p.value = k; break;
    case BinaryOp::Ge: p.attr = Kind::MinSizeAttr; p.value = k; break;
    case BinaryOp::Lt: {
      if (k == 0) return std::nullopt;
      p.attr = Kind::MaxSizeAttr;
      p.value = k - 1;
      break;
    }
    case BinaryOp::Gt: {
      auto v = checked_add(k, 1);
      if (!v) return std::nullopt;
      p.attr = Kind::MinSizeAttr;
      p.value = *v;
      break;
    }
    default:
      return std::nullopt;
  }
  return p;
}

// Merge the derived attribute into the domain's attribute set: size
// replaces bounds it is consistent with, minSize maximises, maxSize
// minimises. Null on inconsistency or non-literal existing attributes.
std::optional<NodePtr> merge_attr(const NodePtr& dom, Kind attr, std::int64_t value) {
  if (dom->kind != Kind::RelationDomain || !attrs_literal(dom)) return std::nullopt;
  auto size = literal_attr(dom, Kind::SizeAttr);
  auto min = literal_attr(dom, Kind::MinSizeAttr);
  auto max = literal_attr(dom, Kind::MaxSizeAttr);

  std::vector<NodePtr> attrs;
  if (attr == Kind::SizeAttr) {
    if (size && *size != value) return std::nullopt;
    if (min && *min > value) return std::nullopt;
    if (max && *max < value) return std::nullopt;
    attrs.push_back(mk_attr(Kind::SizeAttr, mk_int(value)));
  } else if (attr == Kind::MinSizeAttr) {
    if (size) {
      if (*size < value) return std::nullopt;
      attrs.push_back(mk_attr(Kind::SizeAttr, mk_int(*size)));
    } else {
      std::int64_t merged = std::max(min.value_or(0), value);
      if (max && merged > *max) return std::nullopt;
      attrs.push_back(mk_attr(Kind::MinSizeAttr, mk_int(merged)));
      if (max) attrs.push_back(mk_attr(Kind::MaxSizeAttr, mk_int(*max)));
    }
  } else {
    if (size) {
      if (*size > value) return std::nullopt;
      attrs.push_back(mk_attr(Kind::SizeAttr, mk_int(*size)));
    } else {
      std::int64_t merged = max ? std::min(*max, value) : value;
      if (min.value_or(0) > merged) return std::nullopt;
      if (min) attrs.push_back(mk_attr(Kind::MinSizeAttr, mk_int(*min)));
      attrs.push_back(mk_attr(Kind::MaxSizeAttr, mk_int(merged)));
    }
  }

  std::vector<NodePtr> components;
  for (const NodePtr& c : dom->children)
    if (!is_attr(c->kind)) components.push_back(c);
  return mk_relation_domain(std::move(attrs), std::move(components));
}

// ---- witness helpers -----------------------------------------

// `t in S` with constant t and S a find whose domain can absorb minSize 1.
bool witness_anchor(const NodePtr& c, const Ast& root) {
  if (c->kind != Kind::Binary || c->bop != BinaryOp::In) return false;
  const NodePtr& rhs = c->children[1];
  if (rhs->kind != Kind::Reference || rhs->target != RefTarget::DecisionVariable)
    return false;
  NodePtr dom = declared_domain(root, rhs->name);
  if (dom == nullptr || dom->kind != Kind::RelationDomain || !attrs_literal(dom))
    return false;
  if (has_attr(dom, Kind::SizeAttr)) return false;
  if (auto min = literal_attr(dom, Kind::MinSizeAttr); min && *min != 0) return false;
  if (auto max = literal_attr(dom, Kind::MaxSizeAttr); max && *max < 1) return false;
  return is_const_expr(c->children[0]);
}

NodePtr with_min_size_one(const NodePtr& dom) {
  std::vector<NodePtr> attrs = {mk_attr(Kind::MinSizeAttr, mk_int(1))};
  std::vector<NodePtr> components;
  for (const NodePtr& c : dom->children) {
    if (c->kind == Kind::MaxSizeAttr) attrs.push_back(c);
    else if (!is_attr(c->kind)) components.push_back(c);
  }
  return mk_relation_domain(std::move(attrs), std::move(components));
}

// ---- Enumeration ---------------------------------------------

// Pre-order walk over every node, extending `path` with 1-based ordinals.
template <typename Fn>
void walk(const NodePtr& n, std::vector<int>& path, Fn&& fn) {
  fn(n, path);
  for (std::size_t i = 0; i < n->children.size(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    walk(n->children[i], path, fn);
    path.pop_back();
  }
}

// The 1-based path to the find statement declaring `name`.
std::vector<int> find_statement_path(const Ast& root, const std::string& name) {
  for (std::size_t i = 0; i < root->children.size(); ++i) {
    const NodePtr& stmt = root->children[i];
    if (stmt->kind == Kind::Find && stmt->children[0]->name == name)
      return {static_cast<int>(i) + 1};
  }
  stale("the target find statement is gone");
}

void enumerate_rule(const Ast& spec, const std::string& rule,
                    std::vector<Match>& out) {
  std::vector<int> path;
  if (rule == "commute") {
    walk(spec, path, [&](const NodePtr& n, const std::vector<int>& p) {
      if (n->kind == Kind::Binary && is_commutative(n->bop))
        out.push_back({rule, p, {}});
    });
  } else if (rule == "fold") {
    walk(spec, path, [&](const NodePtr& n, const std::vector<int>& p) {
      if (try_fold(n) != nullptr) out.push_back({rule, p, {}});
    });
  } else if (rule == "identity") {
    walk(spec, path, [&](const NodePtr& n, const std::vector<int>& p) {
      if (identity_residue(n) != nullptr) out.push_back({rule, p, {}});
    });
  } else if (rule == "implied-sum") {
    for (std::size_t s = 0; s < spec->children.size(); ++s) {
      const NodePtr& stmt = spec->children[s];
      if (stmt->kind != Kind::SuchThat) continue;
      for (std::size_t c = 0; c < stmt->children.size(); ++c) {
        const NodePtr& con = stmt->children[c];
        if (!implied_sum_anchor(con)) continue;
        std::vector<int> p = {static_cast<int>(s) + 1, static_cast<int>(c) + 1};
        out.push_back({rule, p, {{"strict", 0}}});
        BinaryOp op = con->children[1]->bop;
        if ((op == BinaryOp::Lt || op == BinaryOp::Gt) &&
            provably_nonempty(con->children[0]->children[0], spec))
          out.push_back({rule, p, {{"strict", 1}}});
      }
    }
  } else if (rule == "card-to-attr") {
    for (std::size_t s = 0; s < spec->children.size(); ++s) {
      const NodePtr& stmt = spec->children[s];
      if (stmt->kind != Kind::SuchThat) continue;
      for (std::size_t c = 0; c < stmt->children.size(); ++c) {
        auto pat = match_card(stmt->children[c]);
        if (!pat) continue;
        NodePtr dom = declared_domain(spec, pat->var);
        if (dom == nullptr || !merge_attr(dom, pat->attr, pat->value)) continue;
        out.push_back({rule,
                       {static_cast<int>(s) + 1, static_cast<int>(c) + 1},
                       {{"attr", attr_code(pat->attr)}, {"value", pat->value}}});
      }
    }
  } else if (rule == "witness") {
    for (std::size_t s = 0; s < spec->children.size(); ++s) {
      const NodePtr& stmt = spec->children[s];
      if (stmt->kind != Kind::SuchThat) continue;
      for (std::size_t c = 0; c < stmt->children.size(); ++c) {
        if (witness_anchor(stmt->children[c], spec))
          out.push_back(
              {rule, {static_cast<int>(s) + 1, static_cast<int>(c) + 1}, {}});
      }
    }
  } else {
    throw Error(ErrorKind::Rewrite, "unknown rule '" + rule + "'");
  }
}

std::int64_t binding(const Match& m, const std::string& key) {
  auto it = m.bindings.find(key);
  if (it == m.bindings.end()) stale("match lacks the '" + key + "' binding");
  return it->second;
}

Ast apply_unchecked(const Ast& spec, const Match& m) {
  if (m.rule == "commute") {
    NodePtr n = node_at_path(spec, m.path);
    if (n->kind != Kind::Binary || !is_commutative(n->bop))
      stale("the anchor is no longer a commutative operator");
    return replace_at_path(spec, m.path,
                           with_children(n, {n->children[1], n->children[0]}));
  }
  if (m.rule == "fold") {
    NodePtr lit = try_fold(node_at_path(spec, m.path));
    if (lit == nullptr) stale("the anchor is no longer a foldable expression");
    return replace_at_path(spec, m.path, lit);
  }
  if (m.rule == "identity") {
    NodePtr residue = identity_residue(node_at_path(spec, m.path));
    if (residue == nullptr) stale("the anchor is no longer an identity pattern");
    return replace_at_path(spec, m.path, residue);
  }
  if (m.rule == "implied-sum") {
    NodePtr con = node_at_path(spec, m.path);
    if (!implied_sum_anchor(con)) stale("the anchor is no longer a forAll comparison");
    bool strict = binding(m, "strict") != 0;
    const NodePtr& binder = con->children[0];
    const NodePtr& range = binder->children[0];
    const NodePtr& body = con->children[1];
    if (strict && !((body->bop == BinaryOp::Lt || body->bop == BinaryOp::Gt) &&
                    provably_nonempty(range, spec)))
      stale("the strict variant no longer applies");
    std::vector<int> parent_path(m.path.begin(), m.path.end() - 1);
    NodePtr parent = node_at_path(spec, parent_path);
    if (parent->kind != Kind::SuchThat)
      stale("the anchor is no longer a top-level constraint");
    NodePtr derived = mk_binary(
        strict ? body->bop : weakened(body->bop),
        mk_quant(QuantKind::Sum, binder->name, range, body->children[0]),
        mk_quant(QuantKind::Sum, binder->name, range, body->children[1]));
    std::vector<NodePtr> cons = parent->children;
    cons.push_back(std::move(derived));
    return replace_at_path(spec, parent_path, with_children(parent, std::move(cons)));
  }
  if (m.rule == "card-to-attr") {
    NodePtr con = node_at_path(spec, m.path);
    auto pat = match_card(con);
    if (!pat || attr_code(pat->attr) != binding(m, "attr") ||
        pat->value != binding(m, "value"))
      stale("the anchor no longer encodes the recorded attribute");
    if (m.path.size() != 2) stale("the anchor is no longer a top-level constraint");
    NodePtr dom = declared_domain(spec, pat->var);
    std::optional<NodePtr> merged =
        dom ? merge_attr(dom, pat->attr, pat->value) : std::nullopt;
    if (!merged) stale("the attribute no longer merges consistently");
    std::vector<int> dom_path = find_statement_path(spec, pat->var);
    dom_path.push_back(1);
    dom_path.push_back(1);
    Ast out = replace_at_path(spec, dom_path, *merged);
    // Remove the absorbed constraint; drop the statement if it empties.
    const NodePtr& stmt = out->children[m.path[0] - 1];
    std::vector<NodePtr> cons;
    for (std::size_t i = 0; i < stmt->children.size(); ++i)
      if (static_cast<int>(i) + 1 != m.path[1]) cons.push_back(stmt->children[i]);
    std::vector<NodePtr> stmts = out->children;
    if (cons.empty())
      stmts.erase(stmts.begin() + (m.path[0] - 1));
    else
      stmts[m.path[0] - 1] = with_children(stmt, std::move(cons));
    return with_children(out, std::move(stmts));
  }
  if (m.rule == "witness") {
    NodePtr con = node_at_path(spec, m.path);
    if (!witness_anchor(con, spec)) stale("the anchor is no longer a witness pattern");
    const std::string& var = con->children[1]->name;
    std::vector<int> dom_path = find_statement_path(spec, var);
    dom_path.push_back(1);
    dom_path.push_back(1);
    return replace_at_path(spec, dom_path,
                           with_min_size_one(declared_domain(spec, var)));
  }
  throw Error(ErrorKind::Rewrite, "unknown rule '" + m.rule + "'");
}

// ---- Normalization -------------------------------------------

NodePtr normalize_rec(const NodePtr& n) {
  std::vector<NodePtr> kids;
  kids.reserve(n->children.size());
  bool changed = false;
  for (const NodePtr& c : n->children) {
    NodePtr s = normalize_rec(c);
    changed = changed || s != c;
    kids.push_back(std::move(s));
  }
  NodePtr cur = changed ? with_children(n, std::move(kids)) : n;
  if (!is_expr(cur->kind)) return cur;
  if (NodePtr lit = try_fold(cur)) return lit;
  if (NodePtr residue = identity_residue(cur)) return residue;
  if (cur->kind == Kind::Binary && is_commutative(cur->bop) &&
      ast_compare(cur->children[0], cur->children[1]) > 0)
    return with_children(cur, {cur->children[1], cur->children[0]});
  return cur;
}

}  // namespace

const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names = {
      "commute", "fold", "identity", "implied-sum", "card-to-attr", "witness"};
  return names;
}

std::vector<Match> enumerate_matches(const Ast& spec) {
  std::vector<Match> out;
  for (const std::string& rule : rule_names()) enumerate_rule(spec, rule, out);
  return out;
}

std::vector<Match> enumerate_matches(const Ast& spec, const std::string& rule) {
  std::vector<Match> out;
  enumerate_rule(spec, rule, out);
  return out;
}

Ast apply_match(const Ast& spec, const Match& m) {
  return validate(apply_unchecked(spec, m));
}

Ast normalize(const Ast& spec) { return normalize_rec(spec); }

std::uint64_t canonical_hash(const Ast& spec) {
  std::string text = pretty(normalize(spec));
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace reformine
