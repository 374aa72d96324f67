#include "spec_gen.hpp"

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reformine::testing {

namespace {

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::uint64_t size() const { return static_cast<std::uint64_t>(hi - lo + 1); }
};

// Builds one specification in canonical statement order (givens and
// lettings, wheres, finds, such-thats, objective), tracking scope so every
// generated reference resolves and type-checks by construction.
class Builder {
 public:
  Builder(std::mt19937_64& rng, const GenOptions& opt) : rng_(rng), opt_(opt) {}

  Ast build() {
    std::vector<NodePtr> stmts;
    add_parameters(stmts);
    add_wheres(stmts);
    add_finds(stmts);
    add_such_that(stmts);
    if (!opt_.oracle_sized && chance(0.25) && !int_finds_.empty()) {
      stmts.push_back(mk_objective(pick({ObjDir::Minimising, ObjDir::Maximising}),
                                   int_expr(1, false)));
    }
    return validate(mk_root(std::move(stmts)));
  }

 private:
  // ---- randomness ---------------------------------------------

  std::uint64_t draw(std::uint64_t n) { return n <= 1 ? 0 : rng_() % n; }
  std::int64_t draw_in(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(draw(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool chance(double p) { return (rng_() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  T pick(std::initializer_list<T> xs) {
    return *(xs.begin() + draw(xs.size()));
  }

  // ---- scope --------------------------------------------------

  struct RelDecl {
    std::string name;
    int arity = 1;
    bool is_find = false;
    std::vector<IntRange> comps;  // literal component bounds when known
  };
  struct BinderDecl {
    std::string name;
    int arity = 0;  // 0 = int-valued binder, else tuple arity
  };

  std::vector<std::pair<std::string, IntRange>> int_params_;
  std::vector<std::pair<std::string, IntRange>> aliases_;
  std::vector<std::pair<std::string, IntRange>> int_finds_;
  std::vector<std::string> bool_finds_;
  std::vector<RelDecl> rels_;
  std::vector<BinderDecl> binders_;
  std::size_t given_count_ = 0;
  int binder_counter_ = 0;
  // Product of the find enumeration sizes accumulated so far (oracle mode).
  std::uint64_t space_ = 1;
  // Index into rels_ of the attribute-free find reserved for the motif.
  int motif_rel_ = -1;

  std::mt19937_64& rng_;
  GenOptions opt_;

  std::uint64_t space_left() const {
    return space_ >= opt_.max_assignments ? 1 : opt_.max_assignments / space_;
  }

  bool needs_rel_motif() const {
    return opt_.motif == "card-to-attr" || opt_.motif == "witness";
  }

  // ---- parameters and lettings --------------------------------

  void add_parameters(std::vector<NodePtr>& stmts) {
    const bool allow = opt_.oracle_sized ? chance(0.4) : chance(0.8);
    if (allow) {
      std::vector<std::string> names = {"n"};
      if (chance(0.3)) names.push_back("m");
      IntRange r{draw_in(-3, 2), 0};
      r.hi = r.lo + draw_in(0, 4);
      for (const auto& nm : names) int_params_.emplace_back(nm, r);
      NodePtr hi = opt_.oracle_sized || chance(0.9) ? mk_int(r.hi) : nullptr;
      stmts.push_back(mk_given(names, mk_int_domain(mk_int(r.lo), std::move(hi))));
    }
    given_count_ = int_params_.size();
    if (!int_params_.empty() && chance(0.3)) {
      // letting k be <parameter-only int expression>
      stmts.push_back(mk_letting("k", int_expr(1, true)));
      int_params_.emplace_back("k", IntRange{-20, 20});
    }
    if (chance(0.3)) {
      IntRange r{draw_in(0, 2), 0};
      r.hi = r.lo + draw_in(0, 3);
      stmts.push_back(mk_letting("D", mk_int_domain(mk_int(r.lo), mk_int(r.hi))));
      aliases_.emplace_back("D", r);
    }
    if (!opt_.oracle_sized && chance(0.3)) {
      // A relation-valued given parameter.
      RelDecl rd;
      rd.name = "G";
      rd.arity = chance(0.5) ? 1 : 2;
      std::vector<NodePtr> comps;
      for (int i = 0; i < rd.arity; ++i) {
        IntRange r{draw_in(0, 2), 0};
        r.hi = r.lo + draw_in(0, 3);
        rd.comps.push_back(r);
        comps.push_back(mk_int_domain(mk_int(r.lo), mk_int(r.hi)));
      }
      std::vector<NodePtr> attrs;
      if (chance(0.3)) attrs.push_back(mk_attr(Kind::MaxSizeAttr, mk_int(draw_in(1, 4))));
      stmts.push_back(mk_given({rd.name}, mk_relation_domain(std::move(attrs),
                                                             std::move(comps))));
      rels_.push_back(std::move(rd));
    }
  }

  void add_wheres(std::vector<NodePtr>& stmts) {
    if (given_count_ == 0 || !chance(0.3)) return;
    // Guards range over given parameters only and hold for most of the
    // sampled range, so instance generation stays cheap.
    const auto& [name, r] = int_params_[draw(given_count_)];
    NodePtr guard = chance(0.5)
                        ? mk_binary(BinaryOp::Ge, mk_ref(name), mk_int(r.lo))
                        : mk_binary(BinaryOp::Ne, mk_ref(name), mk_int(r.lo));
    stmts.push_back(mk_where(guard));
  }

  // ---- finds --------------------------------------------------

  NodePtr int_find_domain(IntRange& out) {
    if (opt_.oracle_sized) {
      const std::uint64_t cap = std::min<std::uint64_t>(space_left(), 8);
      out.lo = draw_in(-3, 3);
      out.hi = out.lo + static_cast<std::int64_t>(draw(cap));
      space_ *= out.size();
      return mk_int_domain(mk_int(out.lo), mk_int(out.hi));
    }
    if (!aliases_.empty() && chance(0.25)) {
      const auto& alias = aliases_[draw(aliases_.size())];
      out = alias.second;
      return mk_domain_ref(alias.first);
    }
    out.lo = draw_in(-5, 3);
    out.hi = out.lo + draw_in(0, 11);
    NodePtr lo = mk_int(out.lo);
    NodePtr hi = mk_int(out.hi);
    if (!int_params_.empty() && chance(0.2)) {
      // Parameter-dependent upper bound: lo..(p + c).
      hi = mk_binary(BinaryOp::Add, mk_ref(int_params_[0].first),
                     mk_int(draw_in(1, 4)));
    }
    return mk_int_domain(std::move(lo), std::move(hi));
  }

  NodePtr rel_find_domain(RelDecl& rd, bool attr_free) {
    std::uint64_t pool_cap = 64;
    if (opt_.oracle_sized) {
      // The relation multiplies the assignment space by 2^pool.
      std::uint64_t left = space_left();
      std::uint64_t bits = 0;
      while ((std::uint64_t{1} << (bits + 1)) <= left && bits < 6) ++bits;
      pool_cap = bits;
    }
    rd.arity = !opt_.oracle_sized && chance(0.15) ? 3 : chance(0.35) ? 2 : 1;
    std::vector<NodePtr> comps;
    std::uint64_t pool = 1;
    for (int i = 0; i < rd.arity; ++i) {
      const std::uint64_t left = std::max<std::uint64_t>(pool_cap / pool, 1);
      const std::uint64_t width = std::min<std::uint64_t>(
          left, opt_.oracle_sized ? 6 : 4);
      IntRange r;
      r.lo = draw_in(0, 3);
      r.hi = r.lo + static_cast<std::int64_t>(draw(width));
      pool *= r.size();
      rd.comps.push_back(r);
      comps.push_back(mk_int_domain(mk_int(r.lo), mk_int(r.hi)));
    }
    if (opt_.oracle_sized) {
      std::uint64_t subsets = 1;
      for (std::uint64_t i = 0; i < pool; ++i) subsets *= 2;
      space_ *= subsets;
    }
    std::vector<NodePtr> attrs;
    if (!attr_free && chance(0.4)) {
      const std::int64_t cap = static_cast<std::int64_t>(pool);
      if (chance(0.4)) {
        attrs.push_back(mk_attr(Kind::SizeAttr, mk_int(draw_in(0, cap))));
      } else {
        const std::int64_t min = draw_in(0, cap);
        attrs.push_back(mk_attr(Kind::MinSizeAttr, mk_int(min)));
        if (chance(0.7))
          attrs.push_back(mk_attr(Kind::MaxSizeAttr, mk_int(draw_in(min, cap))));
      }
    }
    return mk_relation_domain(std::move(attrs), std::move(comps));
  }

  void add_finds(std::vector<NodePtr>& stmts) {
    const bool motif_needs_int = !opt_.motif.empty();
    int n_int = static_cast<int>(draw(opt_.oracle_sized ? 2 : 3)) + 1;
    if (motif_needs_int) n_int = std::max(n_int, 1);
    static const char* kIntNames[] = {"x", "y", "z"};
    for (int i = 0; i < n_int; ++i) {
      IntRange r;
      NodePtr dom = int_find_domain(r);
      stmts.push_back(mk_find(kIntNames[i], dom));
      int_finds_.emplace_back(kIntNames[i], r);
    }
    if (!opt_.oracle_sized && chance(0.3)) {
      stmts.push_back(mk_find("b", mk_bool_domain()));
      bool_finds_.push_back("b");
      space_ *= 2;
    }
    const bool want_rel =
        needs_rel_motif() ||
        (opt_.oracle_sized ? (space_left() >= 4 && chance(0.5)) : chance(0.5));
    if (want_rel) {
      RelDecl rd;
      rd.name = "S";
      rd.is_find = true;
      const bool attr_free = needs_rel_motif();
      stmts.push_back(mk_find(rd.name, rel_find_domain(rd, attr_free)));
      if (attr_free) motif_rel_ = static_cast<int>(rels_.size());
      rels_.push_back(std::move(rd));
    }
  }

  // ---- expressions --------------------------------------------

  // Relation-valued term of any arity; `arity` = -1 for "any".
  NodePtr rel_expr(int arity, bool params_only, int* out_arity) {
    std::vector<const RelDecl*> usable;
    for (const RelDecl& r : rels_) {
      if (params_only && r.is_find) continue;
      if (arity >= 0 && r.arity != arity) continue;
      usable.push_back(&r);
    }
    if (!usable.empty() && chance(0.7)) {
      const RelDecl* r = usable[draw(usable.size())];
      *out_arity = r->arity;
      return mk_ref(r->name);
    }
    // A literal relation value.
    RelValue v;
    v.arity = arity >= 0 ? arity : (chance(0.7) ? 1 : 2);
    const int rows = static_cast<int>(draw(5));
    for (int i = 0; i < rows; ++i) {
      std::vector<std::int64_t> row;
      for (int c = 0; c < v.arity; ++c) row.push_back(draw_in(0, 4));
      v.rows.push_back(std::move(row));
    }
    v.canonicalize();
    *out_arity = v.rows.empty() ? 0 : v.arity;
    return mk_relation_lit(v);
  }

  NodePtr binder_range(bool params_only, int* binder_arity) {
    *binder_arity = 0;
    const double r = (rng_() >> 11) * 0x1.0p-53;
    if (r < 0.45 || (params_only && rels_.empty() && aliases_.empty())) {
      const std::int64_t lo = draw_in(0, 2);
      return mk_int_domain(mk_int(lo), mk_int(lo + draw_in(0, 2)));
    }
    if (r < 0.6 && !aliases_.empty())
      return mk_domain_ref(aliases_[draw(aliases_.size())].first);
    int arity = 0;
    NodePtr range = rel_expr(1, params_only, &arity);
    return range;
  }

  NodePtr quantifier(QuantKind kind, int depth, bool params_only) {
    int arity = 0;
    NodePtr range = binder_range(params_only, &arity);
    const std::string name = "q" + std::to_string(binder_counter_++);
    binders_.push_back({name, arity});
    NodePtr body = kind == QuantKind::Sum ? int_expr(depth - 1, params_only)
                                          : bool_expr(depth - 1, params_only);
    binders_.pop_back();
    return mk_quant(kind, name, std::move(range), std::move(body));
  }

  NodePtr int_expr(int depth, bool params_only) {
    enum { Lit, Param, Find, Binder, Neg, ToInt, Card, Arith, Sum };
    std::vector<int> ops = {Lit, Lit, Lit, Param, Param};
    if (!params_only) {
      ops.insert(ops.end(), {Find, Find, Find, Binder});
    }
    if (depth > 0) {
      ops.insert(ops.end(), {Arith, Arith, Arith, Neg});
      if (!params_only) ops.insert(ops.end(), {ToInt, Card, Sum});
    }
    switch (ops[draw(ops.size())]) {
      case Param:
        if (int_params_.empty()) break;
        return mk_ref(int_params_[draw(int_params_.size())].first);
      case Find:
        if (int_finds_.empty()) break;
        return mk_ref(int_finds_[draw(int_finds_.size())].first);
      case Binder: {
        std::vector<const BinderDecl*> ints;
        for (const BinderDecl& b : binders_)
          if (b.arity == 0) ints.push_back(&b);
        if (ints.empty()) break;
        return mk_ref(ints[draw(ints.size())]->name);
      }
      case Neg: {
        NodePtr e = int_expr(depth - 1, params_only);
        // The parser folds minus over a literal into the literal itself.
        if (e->kind == Kind::IntLit) return mk_int(-e->ival);
        return mk_unary(UnaryOp::Neg, std::move(e));
      }
      case ToInt:
        return mk_unary(UnaryOp::ToInt, bool_expr(depth - 1, params_only));
      case Card: {
        int arity = 0;
        NodePtr r = rel_expr(-1, params_only, &arity);
        return mk_unary(UnaryOp::Card, std::move(r));
      }
      case Arith: {
        const BinaryOp op = pick({BinaryOp::Add, BinaryOp::Add, BinaryOp::Sub,
                                  BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod});
        NodePtr l = int_expr(depth - 1, params_only);
        NodePtr r = (op == BinaryOp::Div || op == BinaryOp::Mod) && chance(0.8)
                        ? mk_int(draw_in(1, 5))
                        : int_expr(depth - 1, params_only);
        return mk_binary(op, std::move(l), std::move(r));
      }
      case Sum:
        return quantifier(QuantKind::Sum, depth, params_only);
      default:
        break;
    }
    return mk_int(draw_in(-9, 9));
  }

  NodePtr bool_expr(int depth, bool params_only) {
    enum { Lit, Find, Cmp, Logic, Not, In, Subset, Quant };
    std::vector<int> ops = {Cmp, Cmp, Cmp, Cmp, Lit};
    if (!params_only && !bool_finds_.empty()) ops.push_back(Find);
    if (depth > 0) {
      ops.insert(ops.end(), {Logic, Logic, Not, In});
      if (!params_only) {
        ops.push_back(Quant);
        if (!opt_.oracle_sized) ops.push_back(Subset);
      }
    }
    switch (ops[draw(ops.size())]) {
      case Find:
        return mk_ref(bool_finds_[draw(bool_finds_.size())]);
      case Cmp: {
        const BinaryOp op = pick({BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                  BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge});
        return mk_binary(op, int_expr(depth - 1, params_only),
                         int_expr(depth - 1, params_only));
      }
      case Logic: {
        const BinaryOp op = pick({BinaryOp::And, BinaryOp::Or, BinaryOp::Implies,
                                  BinaryOp::Iff});
        return mk_binary(op, bool_expr(depth - 1, params_only),
                         bool_expr(depth - 1, params_only));
      }
      case Not:
        return mk_unary(UnaryOp::Not, bool_expr(depth - 1, params_only));
      case In: {
        int arity = 0;
        NodePtr rel = rel_expr(-1, params_only, &arity);
        NodePtr elem;
        if (arity >= 2) {
          std::vector<NodePtr> comps;
          for (int i = 0; i < arity; ++i)
            comps.push_back(int_expr(depth - 1, params_only));
          elem = mk_tuple(std::move(comps));
        } else {
          // Tuple binders can witness membership in matching-arity tables.
          std::vector<const BinderDecl*> tup;
          for (const BinderDecl& b : binders_)
            if (b.arity >= 2) tup.push_back(&b);
          if (!params_only && !tup.empty() && chance(0.5)) {
            const BinderDecl* b = tup[draw(tup.size())];
            int rel_arity = 0;
            NodePtr typed = rel_expr(b->arity, params_only, &rel_arity);
            return mk_binary(BinaryOp::In, mk_ref(b->name), std::move(typed));
          }
          elem = int_expr(depth - 1, params_only);
        }
        return mk_binary(BinaryOp::In, std::move(elem), std::move(rel));
      }
      case Subset: {
        int arity = 0;
        NodePtr l = rel_expr(chance(0.6) ? 1 : 2, params_only, &arity);
        int arity2 = 0;
        NodePtr r = rel_expr(arity == 0 ? 1 : arity, params_only, &arity2);
        return mk_binary(BinaryOp::SubsetEq, std::move(l), std::move(r));
      }
      case Quant:
        return quantifier(chance(0.6) ? QuantKind::ForAll : QuantKind::Exists,
                          depth, params_only);
      default:
        break;
    }
    return mk_bool(chance(0.7));
  }

  // ---- motifs -------------------------------------------------

  NodePtr int_find_ref(IntRange* r) {
    const auto& f = int_finds_[draw(int_finds_.size())];
    if (r != nullptr) *r = f.second;
    return mk_ref(f.first);
  }

  NodePtr motif_constraint() {
    if (opt_.motif == "commute") {
      // Both = and + anchor the rule.
      return mk_binary(BinaryOp::Eq,
                       mk_binary(BinaryOp::Add, int_find_ref(nullptr),
                                 mk_int(draw_in(-3, 3))),
                       int_expr(1, false));
    }
    if (opt_.motif == "fold") {
      NodePtr closed = mk_binary(
          BinaryOp::Sub, mk_int(draw_in(-4, 4)),
          mk_binary(BinaryOp::Add, mk_int(draw_in(0, 3)), mk_int(draw_in(0, 3))));
      return mk_binary(BinaryOp::Ge, int_find_ref(nullptr), std::move(closed));
    }
    if (opt_.motif == "identity") {
      IntRange r;
      NodePtr ref = int_find_ref(&r);
      switch (draw(3)) {
        case 0:
          return mk_binary(BinaryOp::Ge,
                           mk_binary(BinaryOp::Mul, std::move(ref), mk_int(1)),
                           mk_int(r.lo));
        case 1:
          return mk_binary(BinaryOp::Le,
                           mk_binary(BinaryOp::Add, std::move(ref), mk_int(0)),
                           mk_int(r.hi));
        default:
          return mk_unary(UnaryOp::Not,
                          mk_unary(UnaryOp::Not, bool_expr(1, false)));
      }
    }
    if (opt_.motif == "implied-sum") {
      const BinaryOp cmp =
          pick({BinaryOp::Le, BinaryOp::Lt, BinaryOp::Ge, BinaryOp::Gt});
      const std::string name = "q" + std::to_string(binder_counter_++);
      NodePtr range;
      int arity = 0;
      const RelDecl* set = nullptr;
      for (const RelDecl& r : rels_)
        if (r.arity == 1) set = &r;
      if (set != nullptr && chance(0.5)) {
        range = mk_ref(set->name);
      } else {
        const std::int64_t lo = draw_in(0, 2);
        range = mk_int_domain(mk_int(lo), mk_int(lo + draw_in(0, 2)));
      }
      binders_.push_back({name, arity});
      NodePtr lhs = chance(0.5)
                        ? mk_binary(BinaryOp::Add, mk_ref(name), int_expr(1, false))
                        : mk_ref(name);
      binders_.pop_back();
      return mk_quant(QuantKind::ForAll, name, std::move(range),
                      mk_binary(cmp, std::move(lhs), mk_int(draw_in(-2, 8))));
    }
    if (opt_.motif == "card-to-attr" || opt_.motif == "witness") {
      const RelDecl& rd = rels_.at(static_cast<std::size_t>(motif_rel_));
      if (opt_.motif == "witness") {
        if (rd.arity == 1) {
          // Mostly a member of the candidate box, so the spec stays
          // satisfiable; occasionally outside it.
          const IntRange& c = rd.comps[0];
          const std::int64_t v =
              chance(0.8) ? draw_in(c.lo, c.hi) : c.hi + 1;
          return mk_binary(BinaryOp::In, mk_int(v), mk_ref(rd.name));
        }
        std::vector<NodePtr> comps;
        for (const IntRange& c : rd.comps)
          comps.push_back(mk_int(draw_in(c.lo, c.hi)));
        return mk_binary(BinaryOp::In, mk_tuple(std::move(comps)), mk_ref(rd.name));
      }
      std::uint64_t pool = 1;
      for (const IntRange& c : rd.comps) pool *= c.size();
      const BinaryOp cmp =
          pick({BinaryOp::Eq, BinaryOp::Le, BinaryOp::Ge, BinaryOp::Lt, BinaryOp::Gt});
      const std::int64_t k =
          cmp == BinaryOp::Lt ? draw_in(1, static_cast<std::int64_t>(pool))
                              : draw_in(0, static_cast<std::int64_t>(pool));
      NodePtr card = mk_unary(UnaryOp::Card, mk_ref(rd.name));
      if (chance(0.3))  // the flipped spelling `k cmp |S|`
        return mk_binary(cmp, mk_int(k), std::move(card));
      return mk_binary(cmp, std::move(card), mk_int(k));
    }
    throw std::invalid_argument("unknown motif '" + opt_.motif + "'");
  }

  void add_such_that(std::vector<NodePtr>& stmts) {
    std::vector<NodePtr> cons;
    const int n = static_cast<int>(draw(3)) + 1;
    for (int i = 0; i < n; ++i)
      cons.push_back(bool_expr(opt_.max_expr_depth, false));
    if (!opt_.motif.empty()) {
      cons.insert(cons.begin() + static_cast<std::ptrdiff_t>(draw(cons.size() + 1)),
                  motif_constraint());
    }
    if (!opt_.oracle_sized && cons.size() >= 2 && chance(0.2)) {
      // Split into two such-that statements.
      std::vector<NodePtr> first(cons.begin(), cons.begin() + 1);
      std::vector<NodePtr> rest(cons.begin() + 1, cons.end());
      stmts.push_back(mk_such_that(std::move(first)));
      stmts.push_back(mk_such_that(std::move(rest)));
      return;
    }
    stmts.push_back(mk_such_that(std::move(cons)));
  }
};

}  // namespace

Ast random_spec(std::mt19937_64& rng, const GenOptions& opt) {
  return Builder(rng, opt).build();
}

}  // namespace reformine::testing
