#include "reformine/ground.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eval.hpp"
#include "reformine/pretty.hpp"

namespace reformine {

namespace {

[[noreturn]] void groundfail(std::string msg) {
  throw Error(ErrorKind::Ground, std::move(msg));
}

// Literal integer payload of an attribute child, if the attribute exists.
std::optional<std::int64_t> attr_literal(const Node& dom, Kind attr_kind) {
  const Node* a = find_attr(dom, attr_kind);
  if (a == nullptr) return std::nullopt;
  return a->children.at(0)->ival;
}

bool range_is_empty(const NodePtr& range) {
  if (range->kind == Kind::RelationLit) return range->children.empty();
  if (range->kind == Kind::IntDomain && range->children.size() == 2 &&
      range->children[0]->kind == Kind::IntLit &&
      range->children[1]->kind == Kind::IntLit) {
    return range->children[0]->ival > range->children[1]->ival;
  }
  return false;
}

NodePtr empty_range_value(QuantKind k) {
  switch (k) {
    case QuantKind::ForAll: return mk_bool(true);
    case QuantKind::Exists: return mk_bool(false);
    case QuantKind::Sum: return mk_int(0);
  }
  groundfail("unknown quantifier kind");
}

struct Grounder {
  std::map<std::string, Value> params;
  std::map<std::string, NodePtr> aliases;

  NodePtr literal_for(const Value& v) const {
    switch (v.kind) {
      case Value::Kind::Int: return mk_int(v.i);
      case Value::Kind::Bool: return mk_bool(v.b);
      case Value::Kind::Rel: return mk_relation_lit(v.rel);
    }
    groundfail("unknown value kind");
  }

  std::int64_t eval_param_int(const NodePtr& e) {
    EvalEnv env(&params);
    return eval_int(e, env);
  }

  bool eval_param_bool(const NodePtr& e) {
    EvalEnv env(&params);
    return eval_bool(e, env);
  }

  // Substitute parameters/aliases in a domain, evaluate every bound and
  // attribute expression to an integer literal, and check attribute sanity.
  NodePtr ground_domain(const NodePtr& d) {
    switch (d->kind) {
      case Kind::BoolDomain:
        return d;
      case Kind::DomainRef: {
        auto it = aliases.find(d->name);
        if (it == aliases.end())
          groundfail("unknown domain alias '" + d->name + "'");
        return it->second;
      }
      case Kind::IntDomain: {
        NodePtr lo = mk_int(eval_param_int(d->children.at(0)));
        NodePtr hi =
            d->children.size() > 1 ? mk_int(eval_param_int(d->children[1])) : nullptr;
        return mk_int_domain(lo, hi);
      }
      case Kind::RelationDomain: {
        std::vector<NodePtr> attrs;
        std::vector<NodePtr> components;
        for (const NodePtr& c : d->children) {
          if (is_attr(c->kind)) {
            std::int64_t v = eval_param_int(c->children.at(0));
            if (v < 0)
              groundfail(node_token(*c) + " attribute must be non-negative, got " +
                         std::to_string(v));
            attrs.push_back(mk_attr(c->kind, mk_int(v)));
          } else {
            components.push_back(ground_domain(c));
          }
        }
        NodePtr out = mk_relation_domain(std::move(attrs), std::move(components));
        std::optional<std::int64_t> mn = attr_literal(*out, Kind::MinSizeAttr);
        std::optional<std::int64_t> mx = attr_literal(*out, Kind::MaxSizeAttr);
        if (mn && mx && *mn > *mx)
          groundfail("minSize " + std::to_string(*mn) + " exceeds maxSize " +
                     std::to_string(*mx));
        return out;
      }
      default:
        groundfail("expected a domain node, found " + std::string(kind_tag(*d)));
    }
  }

  // Substitute parameter references by their literal values, resolve alias
  // ranges, and simplify quantifiers over empty constant ranges.
  NodePtr subst(const NodePtr& n) {
    switch (n->kind) {
      case Kind::Reference: {
        if (n->target != RefTarget::Parameter) return n;
        auto it = params.find(n->name);
        if (it == params.end())
          groundfail("parameter '" + n->name + "' has no value");
        return literal_for(it->second);
      }
      case Kind::Quantifier: {
        const NodePtr& binder = n->children.at(0);
        const NodePtr& range = binder->children.at(0);
        NodePtr grange = is_domain(range->kind) ? ground_domain(range) : subst(range);
        NodePtr gbody = subst(n->children.at(1));
        if (range_is_empty(grange)) return empty_range_value(n->quant);
        return mk_quant(n->quant, binder->name, std::move(grange), std::move(gbody));
      }
      default: {
        if (is_domain(n->kind)) return ground_domain(n);
        std::vector<NodePtr> kids;
        kids.reserve(n->children.size());
        bool changed = false;
        for (const NodePtr& c : n->children) {
          NodePtr s = subst(c);
          changed = changed || s != c;
          kids.push_back(std::move(s));
        }
        if (!changed) return n;
        return with_children(n, std::move(kids));
      }
    }
  }

  // Reject decision-variable domains that contain an empty integer box.
  void check_nonempty(const NodePtr& dom, const std::string& var) const {
    if (dom->kind == Kind::IntDomain && dom->children.size() == 2 &&
        dom->children[0]->ival > dom->children[1]->ival) {
      groundfail("domain of '" + var + "' is empty (" +
                 std::to_string(dom->children[0]->ival) + ".." +
                 std::to_string(dom->children[1]->ival) + ")");
    }
    if (dom->kind == Kind::RelationDomain) {
      for (const NodePtr& c : dom->children)
        if (is_domain(c->kind)) check_nonempty(c, var);
    }
  }

  void check_binding(const std::string& name, const Value& v, const NodePtr& dom) const {
    if (dom->kind == Kind::IntDomain) {
      if (v.kind != Value::Kind::Int)
        groundfail("binding for '" + name + "' must be an integer");
      std::int64_t lo = dom->children.at(0)->ival;
      if (v.i < lo || (dom->children.size() > 1 && v.i > dom->children[1]->ival))
        groundfail("binding for '" + name + "' (" + std::to_string(v.i) +
                   ") lies outside its domain");
      return;
    }
    // Validation admits only int and relation domains for givens.
    if (v.kind != Value::Kind::Rel)
      groundfail("binding for '" + name + "' must be a relation");
    int arity = relation_domain_arity(*dom);
    if (!v.rel.rows.empty() && v.rel.arity != arity)
      groundfail("binding for '" + name + "' has arity " +
                 std::to_string(v.rel.arity) + ", its domain expects " +
                 std::to_string(arity));
    std::vector<const Node*> boxes;
    for (const NodePtr& c : dom->children)
      if (is_domain(c->kind)) boxes.push_back(c.get());
    for (const auto& row : v.rel.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        const Node* box = boxes.at(j);
        std::int64_t lo = box->children.at(0)->ival;
        if (row[j] < lo ||
            (box->children.size() > 1 && row[j] > box->children[1]->ival))
          groundfail("binding for '" + name + "' contains " +
                     std::to_string(row[j]) + ", outside component " +
                     std::to_string(j + 1) + " of its domain");
      }
    }
    std::int64_t count = static_cast<std::int64_t>(v.rel.rows.size());
    if (auto s = attr_literal(*dom, Kind::SizeAttr); s && count != *s)
      groundfail("binding for '" + name + "' has " + std::to_string(count) +
                 " rows, the size attribute requires " + std::to_string(*s));
    if (auto mn = attr_literal(*dom, Kind::MinSizeAttr); mn && count < *mn)
      groundfail("binding for '" + name + "' has " + std::to_string(count) +
                 " rows, fewer than minSize " + std::to_string(*mn));
    if (auto mx = attr_literal(*dom, Kind::MaxSizeAttr); mx && count > *mx)
      groundfail("binding for '" + name + "' has " + std::to_string(count) +
                 " rows, more than maxSize " + std::to_string(*mx));
  }
};

}  // namespace

Ast ground(const Ast& spec, const Instance& inst) {
  Ast checked = validate(spec);
  Grounder g;
  std::set<std::string> given_names;
  std::vector<NodePtr> kept;

  for (const NodePtr& stmt : checked->children) {
    switch (stmt->kind) {
      case Kind::Given: {
        NodePtr dom = g.ground_domain(stmt->children.back());
        for (const NodePtr& p : stmt->children) {
          if (p->kind != Kind::Parameter) continue;
          given_names.insert(p->name);
          auto it = inst.find(p->name);
          if (it == inst.end())
            groundfail("given '" + p->name + "' is not bound by the instance");
          g.check_binding(p->name, it->second, dom);
          g.params[p->name] = it->second;
        }
        break;
      }
      case Kind::Letting: {
        const std::string& name = stmt->children.at(0)->name;
        const NodePtr& rhs = stmt->children.at(1);
        if (is_domain(rhs->kind)) {
          g.aliases[name] = g.ground_domain(rhs);
        } else {
          g.params[name] = Value::of_int(g.eval_param_int(rhs));
        }
        break;
      }
      case Kind::Where: {
        const NodePtr& cond = stmt->children.at(0);
        if (!g.eval_param_bool(cond))
          groundfail("where clause violated: " + pretty_expr(cond));
        break;
      }
      case Kind::Find: {
        const NodePtr& var = stmt->children.at(0);
        NodePtr dom = g.ground_domain(var->children.at(0));
        g.check_nonempty(dom, var->name);
        kept.push_back(mk_find(var->name, std::move(dom)));
        break;
      }
      case Kind::SuchThat: {
        std::vector<NodePtr> constraints;
        constraints.reserve(stmt->children.size());
        for (const NodePtr& c : stmt->children) constraints.push_back(g.subst(c));
        kept.push_back(mk_such_that(std::move(constraints)));
        break;
      }
      case Kind::Objective: {
        kept.push_back(mk_objective(stmt->dir, g.subst(stmt->children.at(0))));
        break;
      }
      default:
        groundfail("unexpected statement kind " + std::string(kind_tag(*stmt)));
    }
  }

  for (const auto& [name, value] : inst) {
    (void)value;
    if (!given_names.count(name))
      groundfail("instance binds '" + name + "', which is not a given of the specification");
  }

  return validate(mk_root(std::move(kept)));
}

}  // namespace reformine
