#include "reformine/csp.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace reformine {

namespace {

constexpr std::int64_t kMaxCandidateTuples = 1'000'000;
constexpr std::int64_t kMaxRangeWidth = 1'000'000;
constexpr std::size_t kMaxModelExprs = 5'000'000;

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorKind::Solve, msg);
}

// Literal bounds of an int domain; grounding has already evaluated them.
struct IntBounds {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

IntBounds int_domain_bounds(const Node& dom, const std::string& owner) {
  if (dom.children.size() != 2) {
    fail("domain of '" + owner + "' is unbounded; it cannot be flattened");
  }
  const Node& lo = *dom.children[0];
  const Node& hi = *dom.children[1];
  if (lo.kind != Kind::IntLit || hi.kind != Kind::IntLit) {
    fail("domain of '" + owner + "' has symbolic bounds; ground the specification first");
  }
  return {lo.ival, hi.ival};
}

// Every tuple of the component box of a relation domain, in lexicographic
// order (last component varies fastest).
std::vector<std::vector<std::int64_t>> box_tuples(const Node& dom,
                                                  const std::string& owner) {
  std::vector<IntBounds> comps;
  for (const NodePtr& c : dom.children) {
    if (is_attr(c->kind)) continue;
    comps.push_back(int_domain_bounds(*c, owner));
  }
  std::int64_t count = 1;
  for (const IntBounds& b : comps) {
    __int128 width = static_cast<__int128>(b.hi) - b.lo + 1;
    if (width > kMaxCandidateTuples ||
        count > kMaxCandidateTuples / static_cast<std::int64_t>(width)) {
      fail("domain of '" + owner + "' has more than 1000000 candidate tuples");
    }
    count *= static_cast<std::int64_t>(width);
  }
  std::vector<std::vector<std::int64_t>> tuples;
  tuples.reserve(static_cast<std::size_t>(count));
  std::vector<std::int64_t> cur(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) cur[i] = comps[i].lo;
  for (std::int64_t n = 0; n < count; ++n) {
    tuples.push_back(cur);
    for (std::size_t i = comps.size(); i-- > 0;) {
      if (cur[i] < comps[i].hi) {
        ++cur[i];
        break;
      }
      cur[i] = comps[i].lo;
    }
  }
  return tuples;
}

// A binder unrolled to one concrete element of its range.
struct Bound {
  bool boolean = false;
  std::vector<std::int64_t> comps;  // one entry unless the range was a relation
};

class Flattener {
 public:
  GroundCsp run(const Ast& spec) {
    for (const NodePtr& stmt : spec->children) declare(stmt);
    for (const NodePtr& stmt : spec->children) {
      if (stmt->kind == Kind::SuchThat) {
        for (const NodePtr& c : stmt->children) {
          csp_.constraints.push_back(flat_bool(c));
        }
      } else if (stmt->kind == Kind::Objective) {
        csp_.objective = flat_int(stmt->children[0]);
        csp_.objective_dir = stmt->dir;
      }
    }
    csp_.constraints.insert(csp_.constraints.end(), attr_constraints_.begin(),
                            attr_constraints_.end());
    return std::move(csp_);
  }

 private:
  // ---- Declarations ------------------------------------------

  void declare(const NodePtr& stmt) {
    switch (stmt->kind) {
      case Kind::Given:
      case Kind::Letting:
      case Kind::Where:
        fail("specification still has instance statements; ground it first");
      case Kind::Find:
        declare_find(*stmt->children[0]);
        return;
      default:
        return;
    }
  }

  void declare_find(const Node& dv) {
    const Node& dom = *dv.children[0];
    FindInfo info;
    info.name = dv.name;
    switch (dom.kind) {
      case Kind::BoolDomain:
        info.boolean = true;
        info.var = add_var({dv.name, 0, 1, true});
        break;
      case Kind::IntDomain: {
        IntBounds b = int_domain_bounds(dom, dv.name);
        info.var = add_var({dv.name, b.lo, b.hi, false});
        break;
      }
      case Kind::RelationDomain: {
        info.relational = true;
        info.arity = relation_domain_arity(dom);
        info.tuples = box_tuples(dom, dv.name);
        info.first_var = static_cast<int>(csp_.vars.size());
        for (const auto& t : info.tuples) {
          std::string n = dv.name + "(";
          for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) n += ",";
            n += std::to_string(t[i]);
          }
          n += ")";
          add_var({std::move(n), 0, 1, true});
        }
        declare_attrs(dom, info);
        break;
      }
      default:
        fail("domain of '" + dv.name + "' is symbolic; ground the specification first");
    }
    find_index_[dv.name] = static_cast<int>(csp_.finds.size());
    csp_.finds.push_back(std::move(info));
  }

  void declare_attrs(const Node& dom, const FindInfo& info) {
    struct Entry {
      Kind kind;
      CExpr::Op cmp;
    };
    static const Entry kEntries[] = {
        {Kind::SizeAttr, CExpr::Op::Eq},
        {Kind::MinSizeAttr, CExpr::Op::Ge},
        {Kind::MaxSizeAttr, CExpr::Op::Le},
    };
    for (const Entry& e : kEntries) {
      const Node* attr = find_attr(dom, e.kind);
      if (attr == nullptr) continue;
      const Node& v = *attr->children[0];
      if (v.kind != Kind::IntLit) {
        fail("attribute bound of '" + info.name +
             "' is symbolic; ground the specification first");
      }
      attr_constraints_.push_back(
          add({e.cmp, 0, -1, {cardinality(info), iconst(v.ival)}}));
    }
  }

  // ---- Arena helpers -----------------------------------------

  int add(CExpr e) {
    if (csp_.exprs.size() >= kMaxModelExprs) {
      fail("flattened model exceeds the size limit");
    }
    csp_.exprs.push_back(std::move(e));
    return static_cast<int>(csp_.exprs.size()) - 1;
  }

  int add_var(CspVar v) {
    csp_.vars.push_back(std::move(v));
    return static_cast<int>(csp_.vars.size()) - 1;
  }

  int iconst(std::int64_t v) { return add({CExpr::Op::IntConst, v, -1, {}}); }
  int bconst(bool v) { return add({CExpr::Op::BoolConst, v ? 1 : 0, -1, {}}); }
  int ivar(int var) { return add({CExpr::Op::IntVar, 0, var, {}}); }
  int bvar(int var) { return add({CExpr::Op::BoolVar, 0, var, {}}); }

  int nary(CExpr::Op op, std::vector<int> args, bool empty_value) {
    if (args.empty()) {
      return op == CExpr::Op::Sum ? iconst(0) : bconst(empty_value);
    }
    if (args.size() == 1) return args[0];
    return add({op, 0, -1, std::move(args)});
  }

  int incidence(const FindInfo& info, const std::vector<std::int64_t>& tuple) {
    auto it = std::lower_bound(info.tuples.begin(), info.tuples.end(), tuple);
    if (it == info.tuples.end() || *it != tuple) return bconst(false);
    return bvar(info.first_var +
                static_cast<int>(it - info.tuples.begin()));
  }

  int cardinality(const FindInfo& info) {
    std::vector<int> terms;
    terms.reserve(info.tuples.size());
    for (std::size_t i = 0; i < info.tuples.size(); ++i) {
      terms.push_back(add({CExpr::Op::ToInt, 0, -1,
                           {bvar(info.first_var + static_cast<int>(i))}}));
    }
    return nary(CExpr::Op::Sum, std::move(terms), false);
  }

  // ---- Local typing ------------------------------------------

  enum class VKind { Int, Bool, Tuple, Rel };

  VKind kind_of(const Node& e) const {
    switch (e.kind) {
      case Kind::IntLit:
        return VKind::Int;
      case Kind::BoolLit:
        return VKind::Bool;
      case Kind::TupleLit:
        return VKind::Tuple;
      case Kind::RelationLit:
        return VKind::Rel;
      case Kind::Reference: {
        if (e.target == RefTarget::Binder) {
          const Bound& b = binders_.at(e.name);
          if (b.comps.size() > 1) return VKind::Tuple;
          return b.boolean ? VKind::Bool : VKind::Int;
        }
        const FindInfo& f = find_of(e.name);
        if (f.relational) return VKind::Rel;
        return f.boolean ? VKind::Bool : VKind::Int;
      }
      case Kind::Unary:
        return e.uop == UnaryOp::Not ? VKind::Bool : VKind::Int;
      case Kind::Binary:
        switch (e.bop) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul:
          case BinaryOp::Div:
          case BinaryOp::Mod:
            return VKind::Int;
          default:
            return VKind::Bool;
        }
      case Kind::Quantifier:
        return e.quant == QuantKind::Sum ? VKind::Int : VKind::Bool;
      default:
        fail("unexpected node in an expression position");
    }
  }

  const FindInfo& find_of(const std::string& name) const {
    auto it = find_index_.find(name);
    if (it == find_index_.end()) {
      fail("reference to '" + name + "' is not a decision variable; ground the specification first");
    }
    return csp_.finds[static_cast<std::size_t>(it->second)];
  }

  // ---- Expression flattening ---------------------------------

  int flat_int(const NodePtr& ep) {
    const Node& e = *ep;
    switch (e.kind) {
      case Kind::IntLit:
        return iconst(e.ival);
      case Kind::Reference: {
        if (e.target == RefTarget::Binder) {
          return iconst(binders_.at(e.name).comps.at(0));
        }
        const FindInfo& f = find_of(e.name);
        return ivar(f.var);
      }
      case Kind::Unary:
        switch (e.uop) {
          case UnaryOp::Neg:
            return add({CExpr::Op::Neg, 0, -1, {flat_int(e.children[0])}});
          case UnaryOp::ToInt:
            return add({CExpr::Op::ToInt, 0, -1, {flat_bool(e.children[0])}});
          case UnaryOp::Card: {
            const Node& s = *e.children[0];
            if (s.kind == Kind::RelationLit) {
              return iconst(static_cast<std::int64_t>(s.children.size()));
            }
            return cardinality(find_of(s.name));
          }
          case UnaryOp::Not:
            break;
        }
        fail("boolean operator in an integer position");
      case Kind::Binary:
        switch (e.bop) {
          case BinaryOp::Add:
            return add({CExpr::Op::Sum, 0, -1,
                        {flat_int(e.children[0]), flat_int(e.children[1])}});
          case BinaryOp::Sub:
            return add({CExpr::Op::Sum, 0, -1,
                        {flat_int(e.children[0]),
                         add({CExpr::Op::Neg, 0, -1, {flat_int(e.children[1])}})}});
          case BinaryOp::Mul:
            return add({CExpr::Op::Mul, 0, -1,
                        {flat_int(e.children[0]), flat_int(e.children[1])}});
          case BinaryOp::Div:
            return add({CExpr::Op::Div, 0, -1,
                        {flat_int(e.children[0]), flat_int(e.children[1])}});
          case BinaryOp::Mod:
            return add({CExpr::Op::Mod, 0, -1,
                        {flat_int(e.children[0]), flat_int(e.children[1])}});
          default:
            fail("boolean operator in an integer position");
        }
      case Kind::Quantifier: {
        if (e.quant != QuantKind::Sum) fail("boolean quantifier in an integer position");
        std::vector<int> terms;
        unroll(e, [&](int guard, const NodePtr& body) {
          int b = flat_int(body);
          if (guard >= 0) {
            b = add({CExpr::Op::Mul, 0, -1,
                     {add({CExpr::Op::ToInt, 0, -1, {guard}}), b}});
          }
          terms.push_back(b);
        });
        return nary(CExpr::Op::Sum, std::move(terms), false);
      }
      default:
        fail("unexpected node in an integer position");
    }
  }

  int flat_bool(const NodePtr& ep) {
    const Node& e = *ep;
    switch (e.kind) {
      case Kind::BoolLit:
        return bconst(e.bval);
      case Kind::Reference: {
        if (e.target == RefTarget::Binder) {
          return bconst(binders_.at(e.name).comps.at(0) != 0);
        }
        return bvar(find_of(e.name).var);
      }
      case Kind::Unary:
        if (e.uop == UnaryOp::Not) {
          return add({CExpr::Op::Not, 0, -1, {flat_bool(e.children[0])}});
        }
        fail("integer operator in a boolean position");
      case Kind::Binary:
        return flat_bool_binary(e);
      case Kind::Quantifier: {
        if (e.quant == QuantKind::Sum) fail("integer quantifier in a boolean position");
        bool universal = e.quant == QuantKind::ForAll;
        std::vector<int> parts;
        unroll(e, [&](int guard, const NodePtr& body) {
          int b = flat_bool(body);
          if (guard >= 0) {
            b = universal ? add({CExpr::Op::Implies, 0, -1, {guard, b}})
                          : add({CExpr::Op::And, 0, -1, {guard, b}});
          }
          parts.push_back(b);
        });
        return nary(universal ? CExpr::Op::And : CExpr::Op::Or, std::move(parts),
                    universal);
      }
      default:
        fail("unexpected node in a boolean position");
    }
  }

  int flat_bool_binary(const Node& e) {
    switch (e.bop) {
      case BinaryOp::And:
        return add({CExpr::Op::And, 0, -1,
                    {flat_bool(e.children[0]), flat_bool(e.children[1])}});
      case BinaryOp::Or:
        return add({CExpr::Op::Or, 0, -1,
                    {flat_bool(e.children[0]), flat_bool(e.children[1])}});
      case BinaryOp::Implies:
        return add({CExpr::Op::Implies, 0, -1,
                    {flat_bool(e.children[0]), flat_bool(e.children[1])}});
      case BinaryOp::Iff:
        return add({CExpr::Op::Iff, 0, -1,
                    {flat_bool(e.children[0]), flat_bool(e.children[1])}});
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        return flat_equality(e);
      case BinaryOp::Lt:
        return cmp(CExpr::Op::Lt, e);
      case BinaryOp::Le:
        return cmp(CExpr::Op::Le, e);
      case BinaryOp::Gt:
        return cmp(CExpr::Op::Gt, e);
      case BinaryOp::Ge:
        return cmp(CExpr::Op::Ge, e);
      case BinaryOp::In:
        return flat_membership(e);
      case BinaryOp::SubsetEq:
        return flat_subset(e);
      default:
        fail("integer operator in a boolean position");
    }
  }

  int cmp(CExpr::Op op, const Node& e) {
    return add({op, 0, -1, {flat_int(e.children[0]), flat_int(e.children[1])}});
  }

  int flat_equality(const Node& e) {
    VKind k = kind_of(*e.children[0]);
    int eq;
    if (k == VKind::Bool) {
      eq = add({CExpr::Op::Iff, 0, -1,
                {flat_bool(e.children[0]), flat_bool(e.children[1])}});
    } else if (k == VKind::Tuple) {
      std::vector<int> l = tuple_exprs(e.children[0]);
      std::vector<int> r = tuple_exprs(e.children[1]);
      std::vector<int> parts;
      for (std::size_t i = 0; i < l.size(); ++i) {
        parts.push_back(add({CExpr::Op::Eq, 0, -1, {l[i], r[i]}}));
      }
      eq = nary(CExpr::Op::And, std::move(parts), true);
    } else {
      return add({e.bop == BinaryOp::Eq ? CExpr::Op::Eq : CExpr::Op::Ne, 0, -1,
                  {flat_int(e.children[0]), flat_int(e.children[1])}});
    }
    if (e.bop == BinaryOp::Ne) eq = add({CExpr::Op::Not, 0, -1, {eq}});
    return eq;
  }

  // The component expressions of a tuple-valued operand (a single entry
  // for a plain int expression).
  std::vector<int> tuple_exprs(const NodePtr& ep) {
    const Node& e = *ep;
    if (e.kind == Kind::TupleLit) {
      std::vector<int> out;
      for (const NodePtr& c : e.children) out.push_back(flat_int(c));
      return out;
    }
    if (e.kind == Kind::Reference && e.target == RefTarget::Binder) {
      const Bound& b = binders_.at(e.name);
      if (b.comps.size() > 1 || b.boolean) {
        std::vector<int> out;
        for (std::int64_t v : b.comps) out.push_back(iconst(v));
        return out;
      }
    }
    return {flat_int(ep)};
  }

  bool all_const(const std::vector<int>& exprs,
                 std::vector<std::int64_t>* values) const {
    values->clear();
    for (int id : exprs) {
      const CExpr& e = csp_.exprs[static_cast<std::size_t>(id)];
      if (e.op != CExpr::Op::IntConst) return false;
      values->push_back(e.value);
    }
    return true;
  }

  int flat_membership(const Node& e) {
    std::vector<int> lhs = tuple_exprs(e.children[0]);
    std::vector<std::int64_t> lhs_vals;
    bool lhs_const = all_const(lhs, &lhs_vals);
    const Node& rhs = *e.children[1];
    if (rhs.kind == Kind::RelationLit) {
      RelValue rel = rel_lit_value(rhs);
      if (rel.rows.empty()) return bconst(false);
      if (static_cast<int>(lhs.size()) != rel.arity) return bconst(false);
      if (lhs_const) return bconst(rel.contains(lhs_vals));
      std::vector<int> alts;
      for (const auto& row : rel.rows) alts.push_back(tuple_match(lhs, row));
      return nary(CExpr::Op::Or, std::move(alts), false);
    }
    const FindInfo& f = find_of(rhs.name);
    if (static_cast<int>(lhs.size()) != f.arity) return bconst(false);
    if (lhs_const) return incidence(f, lhs_vals);
    std::vector<int> alts;
    for (std::size_t i = 0; i < f.tuples.size(); ++i) {
      alts.push_back(
          add({CExpr::Op::And, 0, -1,
               {bvar(f.first_var + static_cast<int>(i)),
                tuple_match(lhs, f.tuples[i])}}));
    }
    return nary(CExpr::Op::Or, std::move(alts), false);
  }

  // lhs components all equal to the given constant row.
  int tuple_match(const std::vector<int>& lhs,
                  const std::vector<std::int64_t>& row) {
    std::vector<int> parts;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      parts.push_back(add({CExpr::Op::Eq, 0, -1, {lhs[i], iconst(row[i])}}));
    }
    return nary(CExpr::Op::And, std::move(parts), true);
  }

  int flat_subset(const Node& e) {
    const Node& l = *e.children[0];
    const Node& r = *e.children[1];
    if (l.kind == Kind::RelationLit) {
      RelValue lv = rel_lit_value(l);
      if (r.kind == Kind::RelationLit) {
        RelValue rv = rel_lit_value(r);
        bool ok = true;
        for (const auto& row : lv.rows) ok = ok && rv.contains(row);
        return bconst(ok);
      }
      const FindInfo& f = find_of(r.name);
      std::vector<int> parts;
      for (const auto& row : lv.rows) {
        parts.push_back(static_cast<int>(row.size()) == f.arity
                            ? incidence(f, row)
                            : bconst(false));
      }
      return nary(CExpr::Op::And, std::move(parts), true);
    }
    const FindInfo& lf = find_of(l.name);
    std::vector<int> parts;
    for (std::size_t i = 0; i < lf.tuples.size(); ++i) {
      int member;
      if (r.kind == Kind::RelationLit) {
        RelValue rv = rel_lit_value(r);
        member = bconst(rv.arity == lf.arity && rv.contains(lf.tuples[i]));
      } else {
        const FindInfo& rf = find_of(r.name);
        member = rf.arity == lf.arity ? incidence(rf, lf.tuples[i]) : bconst(false);
      }
      parts.push_back(
          add({CExpr::Op::Implies, 0, -1,
               {bvar(lf.first_var + static_cast<int>(i)), member}}));
    }
    return nary(CExpr::Op::And, std::move(parts), true);
  }

  // ---- Quantifier unrolling ----------------------------------

  // Calls `emit(guard, body)` once per range element with the binder bound
  // to that element; `guard` is the membership literal when the range is a
  // set-valued decision variable, -1 otherwise.
  template <typename Emit>
  void unroll(const Node& q, Emit emit) {
    const Node& binder = *q.children[0];
    const NodePtr& range = binder.children[0];
    const NodePtr& body = q.children[1];
    const std::string& name = binder.name;

    auto with = [&](Bound b, int guard) {
      auto it = binders_.find(name);
      Bound saved;
      bool had = it != binders_.end();
      if (had) saved = it->second;
      binders_[name] = std::move(b);
      emit(guard, body);
      if (had) {
        binders_[name] = std::move(saved);
      } else {
        binders_.erase(name);
      }
    };

    switch (range->kind) {
      case Kind::BoolDomain:
        with({true, {0}}, -1);
        with({true, {1}}, -1);
        return;
      case Kind::IntDomain: {
        IntBounds b = int_domain_bounds(*range, name);
        if (static_cast<__int128>(b.hi) - b.lo + 1 > kMaxRangeWidth) {
          fail("quantifier range of '" + name + "' has more than 1000000 elements");
        }
        for (__int128 v = b.lo; v <= b.hi; ++v) {
          with({false, {static_cast<std::int64_t>(v)}}, -1);
        }
        return;
      }
      case Kind::RelationLit: {
        RelValue rel = rel_lit_value(*range);
        for (const auto& row : rel.rows) with({false, row}, -1);
        return;
      }
      case Kind::Reference: {
        const FindInfo& f = find_of(range->name);
        if (!f.relational) {
          fail("quantifier range '" + range->name + "' is not set-valued");
        }
        for (std::size_t i = 0; i < f.tuples.size(); ++i) {
          with({false, f.tuples[i]}, bvar(f.first_var + static_cast<int>(i)));
        }
        return;
      }
      default:
        fail("quantifier range of '" + name +
             "' is symbolic; ground the specification first");
    }
  }

  GroundCsp csp_;
  std::map<std::string, int> find_index_;
  std::map<std::string, Bound> binders_;
  std::vector<int> attr_constraints_;
};

}  // namespace

GroundCsp flatten(const Ast& grounded) {
  Flattener f;
  return f.run(grounded);
}

}  // namespace reformine
