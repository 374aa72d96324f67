#include "reformine/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eval.hpp"

namespace reformine {

namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

// ---- Conservative interval arithmetic ------------------------
//
// `[lo, hi]` bounds every value the expression can still take; `err` records
// that some completion may fail to evaluate (division by zero, overflow);
// `empty` records that no completion evaluates (every outcome errors).
// On fully assigned variables all intervals are points and `err` implies
// `empty`, so the final feasibility checks are exact.

struct IntInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool err = false;
  bool empty = false;

  static IntInterval point(std::int64_t v) { return {v, v, false, false}; }
  static IntInterval none() { return {0, -1, true, true}; }
};

IntInterval clamp128(__int128 lo, __int128 hi, bool err) {
  if (lo > kMax || hi < kMin) return IntInterval::none();
  IntInterval r;
  if (lo < kMin) {
    r.lo = kMin;
    err = true;
  } else {
    r.lo = static_cast<std::int64_t>(lo);
  }
  if (hi > kMax) {
    r.hi = kMax;
    err = true;
  } else {
    r.hi = static_cast<std::int64_t>(hi);
  }
  r.err = err;
  return r;
}

// Three-valued truth: which outcomes are still possible. An evaluation
// error inside a comparison makes that comparison false, so `err` on an
// operand feeds can_false and never can_true.
struct BoolInfo {
  bool can_true = true;
  bool can_false = true;
};

class Engine {
 public:
  explicit Engine(const GroundCsp& csp)
      : csp_(csp),
        value_(csp.vars.size(), 0),
        assigned_(csp.vars.size(), 0),
        var_constraints_(csp.vars.size()) {
    for (std::size_t c = 0; c < csp_.constraints.size(); ++c) {
      std::set<int> vars;
      collect_vars(csp_.constraints[c], vars);
      for (int v : vars) var_constraints_[static_cast<std::size_t>(v)].push_back(static_cast<int>(c));
    }
  }

  SolveResult run(const SolveOptions& opts) {
    if (opts.mode == SolveOptions::Mode::Optimize && csp_.objective < 0) {
      throw Error(ErrorKind::Solve, "optimize mode requires an objective");
    }
    SolveResult res;
    // Constant constraints (and initial domains) can already be refutable.
    for (int c : csp_.constraints) {
      if (!beval(c).can_true) {
        res.status = SolveResult::Status::Unsat;
        return res;
      }
    }

    const std::size_t n = csp_.vars.size();
    std::vector<std::int64_t> next(n, 0);
    bool exhausted = false;
    bool stopped = false;  // First mode found its solution
    int d = 0;
    if (n > 0) next[0] = csp_.vars[0].lo;

    while (d >= 0 && !stopped) {
      if (d == static_cast<int>(n)) {
        on_solution(opts, res, stopped);
        --d;
        if (d >= 0) {
          assigned_[static_cast<std::size_t>(d)] = 0;
          ++next[static_cast<std::size_t>(d)];
        }
        continue;
      }
      const std::size_t v = static_cast<std::size_t>(d);
      if (next[v] > csp_.vars[v].hi) {
        --d;
        if (d >= 0) {
          assigned_[static_cast<std::size_t>(d)] = 0;
          ++next[static_cast<std::size_t>(d)];
        }
        continue;
      }
      if (opts.node_budget > 0 && res.nodes >= opts.node_budget) {
        exhausted = true;
        break;
      }
      ++res.nodes;
      value_[v] = next[v];
      assigned_[v] = 1;
      if (consistent_after(static_cast<int>(v), opts)) {
        ++d;
        if (d < static_cast<int>(n)) next[static_cast<std::size_t>(d)] = csp_.vars[static_cast<std::size_t>(d)].lo;
      } else {
        ++res.failures;
        assigned_[v] = 0;
        ++next[v];
      }
    }

    finish_status(opts, res, exhausted, stopped);
    return res;
  }

 private:
  void collect_vars(int id, std::set<int>& out) const {
    const CExpr& e = csp_.exprs[static_cast<std::size_t>(id)];
    if (e.op == CExpr::Op::IntVar || e.op == CExpr::Op::BoolVar) out.insert(e.var);
    for (int a : e.args) collect_vars(a, out);
  }

  bool consistent_after(int v, const SolveOptions& opts) {
    for (int c : var_constraints_[static_cast<std::size_t>(v)]) {
      if (!beval(csp_.constraints[static_cast<std::size_t>(c)]).can_true) return false;
    }
    if (opts.mode == SolveOptions::Mode::Optimize && best_.has_value()) {
      IntInterval obj = ieval(csp_.objective);
      if (obj.empty) return false;  // objective certainly undefined here
      if (csp_.objective_dir == ObjDir::Minimising && obj.lo >= *best_) return false;
      if (csp_.objective_dir == ObjDir::Maximising && obj.hi <= *best_) return false;
    }
    return true;
  }

  void on_solution(const SolveOptions& opts, SolveResult& res, bool& stopped) {
    switch (opts.mode) {
      case SolveOptions::Mode::First:
        res.solutions.push_back(extract());
        stopped = true;
        return;
      case SolveOptions::Mode::All:
        res.solutions.push_back(extract());
        return;
      case SolveOptions::Mode::Optimize: {
        IntInterval obj = ieval(csp_.objective);
        if (obj.empty || obj.err) {  // undefined objective: discard
          ++res.failures;
          return;
        }
        bool better = !best_.has_value() ||
                      (csp_.objective_dir == ObjDir::Minimising ? obj.lo < *best_
                                                                : obj.lo > *best_);
        if (better) {
          best_ = obj.lo;
          res.solutions.assign(1, extract());
          res.objective = obj.lo;
        }
        return;
      }
    }
  }

  void finish_status(const SolveOptions& opts, SolveResult& res, bool exhausted,
                     bool stopped) {
    if (exhausted) {
      res.status = SolveResult::Status::NodeBudgetExhausted;
      return;
    }
    switch (opts.mode) {
      case SolveOptions::Mode::First:
        res.status = stopped ? SolveResult::Status::Sat : SolveResult::Status::Unsat;
        return;
      case SolveOptions::Mode::All:
        res.status = res.solutions.empty() ? SolveResult::Status::Unsat
                                           : SolveResult::Status::Sat;
        return;
      case SolveOptions::Mode::Optimize:
        res.status = best_.has_value() ? SolveResult::Status::Optimal
                                       : SolveResult::Status::Unsat;
        return;
    }
  }

  Instance extract() const {
    Instance out;
    for (const FindInfo& f : csp_.finds) {
      if (!f.relational) {
        std::int64_t v = value_[static_cast<std::size_t>(f.var)];
        out[f.name] = f.boolean ? Value::of_bool(v != 0) : Value::of_int(v);
        continue;
      }
      RelValue rel;
      rel.arity = f.arity;
      for (std::size_t i = 0; i < f.tuples.size(); ++i) {
        if (value_[static_cast<std::size_t>(f.first_var) + i] != 0) {
          rel.rows.push_back(f.tuples[i]);
        }
      }
      rel.canonicalize();
      out[f.name] = Value::of_rel(std::move(rel));
    }
    return out;
  }

  // ---- Interval evaluation -----------------------------------

  IntInterval ieval(int id) const {
    const CExpr& e = csp_.exprs[static_cast<std::size_t>(id)];
    switch (e.op) {
      case CExpr::Op::IntConst:
        return IntInterval::point(e.value);
      case CExpr::Op::IntVar: {
        const std::size_t v = static_cast<std::size_t>(e.var);
        if (assigned_[v]) return IntInterval::point(value_[v]);
        return {csp_.vars[v].lo, csp_.vars[v].hi, false, false};
      }
      case CExpr::Op::Sum: {
        __int128 lo = 0, hi = 0;
        bool err = false;
        for (int a : e.args) {
          IntInterval t = ieval(a);
          if (t.empty) return IntInterval::none();
          lo += t.lo;
          hi += t.hi;
          err = err || t.err;
        }
        return clamp128(lo, hi, err);
      }
      case CExpr::Op::Mul: {
        IntInterval a = ieval(e.args[0]);
        IntInterval b = ieval(e.args[1]);
        if (a.empty || b.empty) return IntInterval::none();
        const __int128 p1 = static_cast<__int128>(a.lo) * b.lo;
        const __int128 p2 = static_cast<__int128>(a.lo) * b.hi;
        const __int128 p3 = static_cast<__int128>(a.hi) * b.lo;
        const __int128 p4 = static_cast<__int128>(a.hi) * b.hi;
        const __int128 mn = std::min(std::min(p1, p2), std::min(p3, p4));
        const __int128 mx = std::max(std::max(p1, p2), std::max(p3, p4));
        return clamp128(mn, mx, a.err || b.err);
      }
      case CExpr::Op::Neg: {
        IntInterval a = ieval(e.args[0]);
        if (a.empty) return IntInterval::none();
        return clamp128(-static_cast<__int128>(a.hi), -static_cast<__int128>(a.lo),
                        a.err);
      }
      case CExpr::Op::Div:
        return div_interval(ieval(e.args[0]), ieval(e.args[1]));
      case CExpr::Op::Mod:
        return mod_interval(ieval(e.args[0]), ieval(e.args[1]));
      case CExpr::Op::ToInt: {
        BoolInfo b = beval(e.args[0]);
        if (!b.can_true && !b.can_false) return IntInterval::none();
        return {b.can_false ? 0 : 1, b.can_true ? 1 : 0, false, false};
      }
      default:
        throw Error(ErrorKind::Solve, "boolean expression in an integer position");
    }
  }

  static bool is_point(const IntInterval& a) { return a.lo == a.hi; }

  static IntInterval div_interval(const IntInterval& a, const IntInterval& b) {
    if (a.empty || b.empty) return IntInterval::none();
    if (is_point(a) && is_point(b)) {
      if (b.lo == 0 || (a.lo == kMin && b.lo == -1)) return IntInterval::none();
      IntInterval r = IntInterval::point(floor_div(a.lo, b.lo));
      r.err = a.err || b.err;
      return r;
    }
    bool err = a.err || b.err || (b.lo <= 0 && b.hi >= 0) ||
               (a.lo == kMin && b.lo <= -1 && b.hi >= -1);
    std::int64_t cand_b[] = {b.lo, b.hi, -1, 1};
    bool any = false;
    std::int64_t mn = 0, mx = 0;
    for (std::int64_t bb : cand_b) {
      if (bb == 0 || bb < b.lo || bb > b.hi) continue;
      for (std::int64_t aa : {a.lo, a.hi}) {
        if (aa == kMin && bb == -1) continue;
        std::int64_t q = floor_div(aa, bb);
        if (!any) {
          mn = mx = q;
          any = true;
        } else {
          mn = std::min(mn, q);
          mx = std::max(mx, q);
        }
      }
    }
    if (!any) return IntInterval::none();
    return {mn, mx, err, false};
  }

  static IntInterval mod_interval(const IntInterval& a, const IntInterval& b) {
    if (a.empty || b.empty) return IntInterval::none();
    if (is_point(a) && is_point(b)) {
      if (b.lo == 0 || (a.lo == kMin && b.lo == -1)) return IntInterval::none();
      IntInterval r = IntInterval::point(floor_mod(a.lo, b.lo));
      r.err = a.err || b.err;
      return r;
    }
    if (b.lo == 0 && b.hi == 0) return IntInterval::none();
    bool err = a.err || b.err || (b.lo <= 0 && b.hi >= 0) ||
               (a.lo == kMin && b.lo <= -1 && b.hi >= -1);
    // The remainder takes the divisor's sign: [b.lo + 1, 0] for negative
    // divisors, [0, b.hi - 1] for positive ones.
    std::int64_t lo = 0, hi = 0;
    if (b.lo < 0) lo = b.lo + 1;
    if (b.hi > 0) hi = b.hi - 1;
    return {lo, hi, err, false};
  }

  BoolInfo beval(int id) const {
    const CExpr& e = csp_.exprs[static_cast<std::size_t>(id)];
    switch (e.op) {
      case CExpr::Op::BoolConst:
        return {e.value != 0, e.value == 0};
      case CExpr::Op::BoolVar: {
        const std::size_t v = static_cast<std::size_t>(e.var);
        if (assigned_[v]) return {value_[v] != 0, value_[v] == 0};
        return {true, true};
      }
      case CExpr::Op::Not: {
        BoolInfo a = beval(e.args[0]);
        return {a.can_false, a.can_true};
      }
      case CExpr::Op::And: {
        BoolInfo r{true, false};
        for (int a : e.args) {
          BoolInfo t = beval(a);
          r.can_true = r.can_true && t.can_true;
          r.can_false = r.can_false || t.can_false;
        }
        return r;
      }
      case CExpr::Op::Or: {
        BoolInfo r{false, true};
        for (int a : e.args) {
          BoolInfo t = beval(a);
          r.can_true = r.can_true || t.can_true;
          r.can_false = r.can_false && t.can_false;
        }
        return r;
      }
      case CExpr::Op::Implies: {
        BoolInfo a = beval(e.args[0]);
        BoolInfo b = beval(e.args[1]);
        return {a.can_false || b.can_true, a.can_true && b.can_false};
      }
      case CExpr::Op::Iff: {
        BoolInfo a = beval(e.args[0]);
        BoolInfo b = beval(e.args[1]);
        return {(a.can_true && b.can_true) || (a.can_false && b.can_false),
                (a.can_true && b.can_false) || (a.can_false && b.can_true)};
      }
      case CExpr::Op::Eq:
      case CExpr::Op::Ne:
      case CExpr::Op::Lt:
      case CExpr::Op::Le:
      case CExpr::Op::Gt:
      case CExpr::Op::Ge:
        return compare(e.op, ieval(e.args[0]), ieval(e.args[1]));
      default:
        throw Error(ErrorKind::Solve, "integer expression in a boolean position");
    }
  }

  static BoolInfo compare(CExpr::Op op, const IntInterval& a, const IntInterval& b) {
    if (a.empty || b.empty) return {false, true};
    const bool err = a.err || b.err;
    const bool overlap = a.lo <= b.hi && b.lo <= a.hi;
    const bool points_equal = is_point(a) && is_point(b) && a.lo == b.lo;
    switch (op) {
      case CExpr::Op::Eq:
        return {overlap, err || !points_equal};
      case CExpr::Op::Ne:
        return {!points_equal, err || overlap};
      case CExpr::Op::Lt:
        return {a.lo < b.hi, err || a.hi >= b.lo};
      case CExpr::Op::Le:
        return {a.lo <= b.hi, err || a.hi > b.lo};
      case CExpr::Op::Gt:
        return {a.hi > b.lo, err || a.lo <= b.hi};
      case CExpr::Op::Ge:
        return {a.hi >= b.lo, err || a.lo < b.hi};
      default:
        return {true, true};
    }
  }

  const GroundCsp& csp_;
  std::vector<std::int64_t> value_;
  std::vector<char> assigned_;
  std::vector<std::vector<int>> var_constraints_;
  std::optional<std::int64_t> best_;
};

// ---- Exhaustive reference evaluation -------------------------

constexpr std::uint64_t kBruteForceCap = std::uint64_t{1} << 20;

struct BruteVar {
  std::string name;
  enum class Kind { Int, Bool, Rel } kind = Kind::Int;
  std::int64_t lo = 0, hi = 0;                    // Int
  int arity = 0;                                  // Rel
  std::vector<std::vector<std::int64_t>> tuples;  // Rel candidates
  std::optional<std::int64_t> size, min_size, max_size;
};

[[noreturn]] void brute_fail(const std::string& msg) {
  throw Error(ErrorKind::Solve, msg);
}

std::int64_t literal_bound(const Node& n, const std::string& owner) {
  if (n.kind != Kind::IntLit) {
    brute_fail("domain of '" + owner + "' has symbolic bounds; ground the specification first");
  }
  return n.ival;
}

BruteVar brute_var(const Node& dv) {
  const Node& dom = *dv.children[0];
  BruteVar v;
  v.name = dv.name;
  switch (dom.kind) {
    case Kind::BoolDomain:
      v.kind = BruteVar::Kind::Bool;
      v.lo = 0;
      v.hi = 1;
      return v;
    case Kind::IntDomain:
      if (dom.children.size() != 2) {
        brute_fail("domain of '" + dv.name + "' is unbounded; it cannot be enumerated");
      }
      v.kind = BruteVar::Kind::Int;
      v.lo = literal_bound(*dom.children[0], dv.name);
      v.hi = literal_bound(*dom.children[1], dv.name);
      return v;
    case Kind::RelationDomain: {
      v.kind = BruteVar::Kind::Rel;
      v.arity = relation_domain_arity(dom);
      std::vector<std::pair<std::int64_t, std::int64_t>> comps;
      for (const NodePtr& c : dom.children) {
        if (is_attr(c->kind)) continue;
        if (c->children.size() != 2) {
          brute_fail("domain of '" + dv.name + "' is unbounded; it cannot be enumerated");
        }
        comps.emplace_back(literal_bound(*c->children[0], dv.name),
                           literal_bound(*c->children[1], dv.name));
      }
      std::vector<std::vector<std::int64_t>> acc{{}};
      for (const auto& [lo, hi] : comps) {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& prefix : acc) {
          for (__int128 x = lo; x <= hi; ++x) {
            if (next.size() > kBruteForceCap) {
              brute_fail("instance too large to enumerate exhaustively");
            }
            std::vector<std::int64_t> row = prefix;
            row.push_back(static_cast<std::int64_t>(x));
            next.push_back(std::move(row));
          }
        }
        acc = std::move(next);
      }
      v.tuples = std::move(acc);
      if (const Node* a = find_attr(dom, Kind::SizeAttr)) {
        v.size = literal_bound(*a->children[0], dv.name);
      }
      if (const Node* a = find_attr(dom, Kind::MinSizeAttr)) {
        v.min_size = literal_bound(*a->children[0], dv.name);
      }
      if (const Node* a = find_attr(dom, Kind::MaxSizeAttr)) {
        v.max_size = literal_bound(*a->children[0], dv.name);
      }
      return v;
    }
    default:
      brute_fail("domain of '" + dv.name + "' is symbolic; ground the specification first");
  }
}

}  // namespace

const char* to_string(SolveResult::Status s) {
  switch (s) {
    case SolveResult::Status::Sat:
      return "sat";
    case SolveResult::Status::Unsat:
      return "unsat";
    case SolveResult::Status::Optimal:
      return "optimal";
    case SolveResult::Status::NodeBudgetExhausted:
      return "node-budget-exhausted";
  }
  return "unknown";
}

SolveResult solve(const GroundCsp& csp, const SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  Engine engine(csp);
  SolveResult res = engine.run(opts);
  res.millis = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start)
          .count());
  return res;
}

std::vector<Instance> brute_force_solutions(const Ast& grounded) {
  std::vector<BruteVar> vars;
  std::vector<NodePtr> constraints;
  for (const NodePtr& stmt : grounded->children) {
    switch (stmt->kind) {
      case Kind::Find:
        vars.push_back(brute_var(*stmt->children[0]));
        break;
      case Kind::SuchThat:
        for (const NodePtr& c : stmt->children) constraints.push_back(c);
        break;
      case Kind::Objective:
        break;
      default:
        brute_fail("specification still has instance statements; ground it first");
    }
  }

  __int128 space = 1;
  for (const BruteVar& v : vars) {
    __int128 factor;
    switch (v.kind) {
      case BruteVar::Kind::Int:
        factor = static_cast<__int128>(v.hi) - v.lo + 1;
        break;
      case BruteVar::Kind::Bool:
        factor = 2;
        break;
      case BruteVar::Kind::Rel:
        if (v.tuples.size() > 20) {
          brute_fail("instance too large to enumerate exhaustively");
        }
        factor = static_cast<__int128>(1) << v.tuples.size();
        break;
    }
    space *= factor;
    if (space > static_cast<__int128>(kBruteForceCap)) {
      brute_fail("instance too large to enumerate exhaustively");
    }
  }

  std::vector<Instance> found;
  Instance assignment;

  // One counter per variable: the int offset, the bool, or the subset mask.
  std::vector<std::uint64_t> counter(vars.size(), 0);
  auto limit = [&](std::size_t i) -> std::uint64_t {
    switch (vars[i].kind) {
      case BruteVar::Kind::Int:
        return static_cast<std::uint64_t>(vars[i].hi - vars[i].lo + 1);
      case BruteVar::Kind::Bool:
        return 2;
      case BruteVar::Kind::Rel:
        return std::uint64_t{1} << vars[i].tuples.size();
    }
    return 1;
  };

  while (true) {
    bool admissible = true;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const BruteVar& v = vars[i];
      switch (v.kind) {
        case BruteVar::Kind::Int:
          assignment[v.name] = Value::of_int(v.lo + static_cast<std::int64_t>(counter[i]));
          break;
        case BruteVar::Kind::Bool:
          assignment[v.name] = Value::of_bool(counter[i] != 0);
          break;
        case BruteVar::Kind::Rel: {
          RelValue rel;
          rel.arity = v.arity;
          for (std::size_t t = 0; t < v.tuples.size(); ++t) {
            if (counter[i] & (std::uint64_t{1} << t)) rel.rows.push_back(v.tuples[t]);
          }
          const auto n = static_cast<std::int64_t>(rel.rows.size());
          if ((v.size && n != *v.size) || (v.min_size && n < *v.min_size) ||
              (v.max_size && n > *v.max_size)) {
            admissible = false;
          }
          rel.canonicalize();
          assignment[v.name] = Value::of_rel(std::move(rel));
          break;
        }
      }
    }
    if (admissible) {
      bool ok = true;
      for (const NodePtr& c : constraints) {
        try {
          EvalEnv env(&assignment);
          if (!eval_bool(c, env)) {
            ok = false;
            break;
          }
        } catch (const Error&) {
          ok = false;  // an erroring constraint is a violated constraint
          break;
        }
      }
      if (ok) found.push_back(assignment);
    }
    // Advance the odometer, last variable fastest.
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++counter[i] < limit(i)) break;
      counter[i] = 0;
      if (i == 0) return found;
    }
    if (vars.empty()) {
      return found;  // single empty assignment already examined
    }
  }
}

}  // namespace reformine
