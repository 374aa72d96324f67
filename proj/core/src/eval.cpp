#include "eval.hpp"

#include <limits>

namespace reformine {

namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

[[noreturn]] void evalfail(const std::string& msg) {
  throw Error(ErrorKind::Ground, msg);
}

}  // namespace

std::optional<std::int64_t> checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) return std::nullopt;
  return out;
}

std::optional<std::int64_t> checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out)) return std::nullopt;
  return out;
}

std::optional<std::int64_t> checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) return std::nullopt;
  return out;
}

std::optional<std::int64_t> checked_neg(std::int64_t a) {
  if (a == kMin) return std::nullopt;
  return -a;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

// ---- EvalValue -----------------------------------------------

EvalValue EvalValue::of_int(std::int64_t v) {
  EvalValue out;
  out.kind = Kind::Int;
  out.i = v;
  return out;
}

EvalValue EvalValue::of_bool(bool v) {
  EvalValue out;
  out.kind = Kind::Bool;
  out.b = v;
  return out;
}

EvalValue EvalValue::of_rel(RelValue v) {
  EvalValue out;
  out.kind = Kind::Rel;
  v.canonicalize();
  out.rel = std::move(v);
  return out;
}

EvalValue EvalValue::of_tuple(std::vector<std::int64_t> v) {
  EvalValue out;
  out.kind = Kind::Tuple;
  out.tup = std::move(v);
  return out;
}

EvalValue EvalValue::of_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return of_int(v.i);
    case Value::Kind::Bool: return of_bool(v.b);
    case Value::Kind::Rel: return of_rel(v.rel);
  }
  return {};
}

const EvalValue* EvalEnv::lookup(const std::string& name) {
  for (auto it = binders_.rbegin(); it != binders_.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  if (params_) {
    auto it = params_->find(name);
    if (it != params_->end()) {
      scratch_ = EvalValue::of_value(it->second);
      return &scratch_;
    }
  }
  return nullptr;
}

void EvalEnv::count_step() {
  if (++steps_ > step_limit_) {
    evalfail("evaluation budget exceeded");
  }
}

// ---- Evaluation ----------------------------------------------

namespace {

std::int64_t as_int(const EvalValue& v) {
  if (v.kind != EvalValue::Kind::Int) evalfail("expected an integer value");
  return v.i;
}

bool as_bool(const EvalValue& v) {
  if (v.kind != EvalValue::Kind::Bool) evalfail("expected a boolean value");
  return v.b;
}

std::vector<std::int64_t> as_row(const EvalValue& v) {
  switch (v.kind) {
    case EvalValue::Kind::Int: return {v.i};
    case EvalValue::Kind::Tuple: return v.tup;
    default: evalfail("expected an integer or tuple value");
  }
}

bool eval_equal(const EvalValue& l, const EvalValue& r) {
  if (l.kind == EvalValue::Kind::Bool || r.kind == EvalValue::Kind::Bool) {
    return as_bool(l) == as_bool(r);
  }
  if (l.kind == EvalValue::Kind::Rel || r.kind == EvalValue::Kind::Rel) {
    evalfail("relations cannot be compared with =");
  }
  return as_row(l) == as_row(r);
}

}  // namespace

EvalValue eval_expr(const NodePtr& e, EvalEnv& env) {
  env.count_step();
  switch (e->kind) {
    case Kind::IntLit:
      return EvalValue::of_int(e->ival);
    case Kind::BoolLit:
      return EvalValue::of_bool(e->bval);
    case Kind::RelationLit:
      return EvalValue::of_rel(rel_lit_value(*e));
    case Kind::TupleLit: {
      std::vector<std::int64_t> comps;
      comps.reserve(e->children.size());
      for (const auto& c : e->children) comps.push_back(eval_int(c, env));
      return EvalValue::of_tuple(std::move(comps));
    }
    case Kind::Reference: {
      const EvalValue* v = env.lookup(e->name);
      if (!v) evalfail("unbound reference '" + e->name + "'");
      return *v;
    }
    case Kind::Unary: {
      switch (e->uop) {
        case UnaryOp::Neg: {
          auto v = checked_neg(eval_int(e->children[0], env));
          if (!v) evalfail("integer overflow");
          return EvalValue::of_int(*v);
        }
        case UnaryOp::Not:
          return EvalValue::of_bool(!eval_bool(e->children[0], env));
        case UnaryOp::ToInt:
          return EvalValue::of_int(eval_bool(e->children[0], env) ? 1 : 0);
        case UnaryOp::Card: {
          RelValue r = eval_rel(e->children[0], env);
          return EvalValue::of_int(static_cast<std::int64_t>(r.rows.size()));
        }
      }
      evalfail("unknown unary operator");
    }
    case Kind::Binary: {
      switch (e->bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
        case BinaryOp::Mul: {
          std::int64_t l = eval_int(e->children[0], env);
          std::int64_t r = eval_int(e->children[1], env);
          std::optional<std::int64_t> v;
          if (e->bop == BinaryOp::Add) v = checked_add(l, r);
          else if (e->bop == BinaryOp::Sub) v = checked_sub(l, r);
          else v = checked_mul(l, r);
          if (!v) evalfail("integer overflow");
          return EvalValue::of_int(*v);
        }
        case BinaryOp::Div:
        case BinaryOp::Mod: {
          std::int64_t l = eval_int(e->children[0], env);
          std::int64_t r = eval_int(e->children[1], env);
          if (r == 0) evalfail("division by zero");
          if (l == kMin && r == -1) evalfail("integer overflow");
          return EvalValue::of_int(e->bop == BinaryOp::Div ? floor_div(l, r)
                                                           : floor_mod(l, r));
        }
        case BinaryOp::Eq:
          return EvalValue::of_bool(eval_equal(eval_expr(e->children[0], env),
                                               eval_expr(e->children[1], env)));
        case BinaryOp::Ne:
          return EvalValue::of_bool(!eval_equal(eval_expr(e->children[0], env),
                                                eval_expr(e->children[1], env)));
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: {
          std::int64_t l = eval_int(e->children[0], env);
          std::int64_t r = eval_int(e->children[1], env);
          bool v = e->bop == BinaryOp::Lt   ? l < r
                   : e->bop == BinaryOp::Le ? l <= r
                   : e->bop == BinaryOp::Gt ? l > r
                                            : l >= r;
          return EvalValue::of_bool(v);
        }
        case BinaryOp::And: {
          if (!eval_bool(e->children[0], env)) return EvalValue::of_bool(false);
          return EvalValue::of_bool(eval_bool(e->children[1], env));
        }
        case BinaryOp::Or: {
          if (eval_bool(e->children[0], env)) return EvalValue::of_bool(true);
          return EvalValue::of_bool(eval_bool(e->children[1], env));
        }
        case BinaryOp::Implies: {
          if (!eval_bool(e->children[0], env)) return EvalValue::of_bool(true);
          return EvalValue::of_bool(eval_bool(e->children[1], env));
        }
        case BinaryOp::Iff: {
          bool l = eval_bool(e->children[0], env);
          bool r = eval_bool(e->children[1], env);
          return EvalValue::of_bool(l == r);
        }
        case BinaryOp::In: {
          EvalValue l = eval_expr(e->children[0], env);
          RelValue r = eval_rel(e->children[1], env);
          return EvalValue::of_bool(r.contains(as_row(l)));
        }
        case BinaryOp::SubsetEq: {
          RelValue l = eval_rel(e->children[0], env);
          RelValue r = eval_rel(e->children[1], env);
          for (const auto& row : l.rows) {
            if (!r.contains(row)) return EvalValue::of_bool(false);
          }
          return EvalValue::of_bool(true);
        }
      }
      evalfail("unknown binary operator");
    }
    case Kind::Quantifier: {
      const NodePtr& binder = e->children[0];
      const NodePtr& body = e->children[1];
      std::vector<EvalValue> elems = enumerate_range(binder->children[0], env);
      switch (e->quant) {
        case QuantKind::ForAll: {
          for (auto& v : elems) {
            env.push_binder(binder->name, std::move(v));
            bool ok;
            try {
              ok = eval_bool(body, env);
            } catch (...) {
              env.pop_binder();
              throw;
            }
            env.pop_binder();
            if (!ok) return EvalValue::of_bool(false);
          }
          return EvalValue::of_bool(true);
        }
        case QuantKind::Exists: {
          for (auto& v : elems) {
            env.push_binder(binder->name, std::move(v));
            bool ok;
            try {
              ok = eval_bool(body, env);
            } catch (...) {
              env.pop_binder();
              throw;
            }
            env.pop_binder();
            if (ok) return EvalValue::of_bool(true);
          }
          return EvalValue::of_bool(false);
        }
        case QuantKind::Sum: {
          std::int64_t acc = 0;
          for (auto& v : elems) {
            env.push_binder(binder->name, std::move(v));
            std::int64_t term;
            try {
              term = eval_int(body, env);
            } catch (...) {
              env.pop_binder();
              throw;
            }
            env.pop_binder();
            auto next = checked_add(acc, term);
            if (!next) evalfail("integer overflow");
            acc = *next;
          }
          return EvalValue::of_int(acc);
        }
      }
      evalfail("unknown quantifier");
    }
    default:
      evalfail("cannot evaluate a " + std::string(kind_tag(*e)) + " node");
  }
}

std::int64_t eval_int(const NodePtr& e, EvalEnv& env) {
  return as_int(eval_expr(e, env));
}

bool eval_bool(const NodePtr& e, EvalEnv& env) {
  return as_bool(eval_expr(e, env));
}

RelValue eval_rel(const NodePtr& e, EvalEnv& env) {
  EvalValue v = eval_expr(e, env);
  if (v.kind != EvalValue::Kind::Rel) evalfail("expected a set or relation value");
  return std::move(v.rel);
}

std::vector<EvalValue> enumerate_range(const NodePtr& range, EvalEnv& env) {
  constexpr std::int64_t kMaxRange = 1'000'000;
  switch (range->kind) {
    case Kind::IntDomain: {
      if (range->children.size() != 2) {
        evalfail("cannot enumerate an unbounded int domain");
      }
      std::int64_t lo = eval_int(range->children[0], env);
      std::int64_t hi = eval_int(range->children[1], env);
      if (lo > hi) return {};
      auto width = checked_sub(hi, lo);
      if (!width || *width >= kMaxRange) {
        evalfail("quantifier range too large to enumerate");
      }
      std::vector<EvalValue> out;
      out.reserve(static_cast<std::size_t>(*width) + 1);
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(EvalValue::of_int(v));
      return out;
    }
    case Kind::BoolDomain:
      return {EvalValue::of_bool(false), EvalValue::of_bool(true)};
    default: {
      RelValue rel = eval_rel(range, env);
      std::vector<EvalValue> out;
      out.reserve(rel.rows.size());
      for (auto& row : rel.rows) {
        if (row.size() == 1) {
          out.push_back(EvalValue::of_int(row[0]));
        } else {
          out.push_back(EvalValue::of_tuple(std::move(row)));
        }
      }
      return out;
    }
  }
}

}  // namespace reformine
