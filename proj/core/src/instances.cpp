#include "reformine/instances.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <utility>

#include "eval.hpp"
#include "json.hpp"
#include "reformine/ground.hpp"
#include "reformine/pretty.hpp"

namespace reformine {

namespace {

constexpr std::int64_t kMaxPoolTuples = 1'000'000;

[[noreturn]] void genfail(const std::string& msg) {
  throw Error(ErrorKind::Generate, msg);
}

// A draw the specification cannot accept; the attempt is discarded.
struct RejectDraw {};

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (~n + 1) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class Sampler {
 public:
  Sampler(const Ast& spec, const SampleConfig& cfg, std::mt19937_64& rng)
      : spec_(spec), cfg_(cfg), rng_(rng) {}

  // One full draw of all parameters, in declaration order.
  Instance attempt() {
    Instance inst;
    params_.clear();
    aliases_.clear();
    for (const NodePtr& stmt : spec_->children) {
      switch (stmt->kind) {
        case Kind::Letting: {
          const std::string& name = stmt->children[0]->name;
          const NodePtr& value = stmt->children[1];
          if (is_domain(value->kind)) {
            aliases_[name] = value;
          } else {
            params_[name] = Value::of_int(eval_bound(value));
          }
          break;
        }
        case Kind::Given: {
          const NodePtr& dom = stmt->children.back();
          for (const NodePtr& p : stmt->children) {
            if (p->kind != Kind::Parameter) continue;
            Value v = sample_domain(dom, p->name);
            inst[p->name] = v;
            params_[p->name] = std::move(v);
          }
          break;
        }
        default:
          break;
      }
    }
    return inst;
  }

 private:
  std::int64_t eval_bound(const NodePtr& e) {
    EvalEnv env(&params_);
    return eval_int(e, env);
  }

  const NodePtr& resolve(const NodePtr& dom) const {
    const NodePtr* d = &dom;
    while ((*d)->kind == Kind::DomainRef) {
      auto it = aliases_.find((*d)->name);
      if (it == aliases_.end()) {
        genfail("unknown domain alias '" + (*d)->name + "'");
      }
      d = &it->second;
    }
    return *d;
  }

  struct IntRange {
    std::int64_t lo = 0;
    std::uint64_t width = 0;
  };

  // Declared range clamped to the configured width cap; anchored at the
  // lower bound when the domain is unbounded above.
  IntRange int_range(const NodePtr& domain) {
    const NodePtr& dom = resolve(domain);
    const std::int64_t lo = eval_bound(dom->children[0]);
    __int128 hi = static_cast<__int128>(lo) + cfg_.cap;
    if (dom->children.size() == 2) {
      hi = std::min(hi, static_cast<__int128>(eval_bound(dom->children[1])));
    }
    if (hi < lo) throw RejectDraw{};
    return {lo, static_cast<std::uint64_t>(hi - lo + 1)};
  }

  std::int64_t sample_int(const NodePtr& domain) {
    IntRange r = int_range(domain);
    return r.lo + static_cast<std::int64_t>(bounded_draw(rng_, r.width));
  }

  Value sample_domain(const NodePtr& domain, const std::string& owner) {
    const NodePtr& dom = resolve(domain);
    switch (dom->kind) {
      case Kind::IntDomain:
        return Value::of_int(sample_int(dom));
      case Kind::RelationDomain:
        return Value::of_rel(sample_relation(*dom, owner));
      default:
        genfail("domain of '" + owner + "' cannot be sampled");
    }
  }

  RelValue sample_relation(const Node& dom, const std::string& owner) {
    // The candidate pool: every tuple of the component box, in
    // lexicographic order. Component bounds are sampled-parameter
    // dependent, so the pool is rebuilt per draw (and not width-capped:
    // the declared box is the domain).
    std::vector<std::pair<std::int64_t, std::int64_t>> comps;
    __int128 pool = 1;
    for (const NodePtr& c : dom.children) {
      if (is_attr(c->kind)) continue;
      const NodePtr& cd = resolve(c);
      if (cd->kind != Kind::IntDomain) {
        genfail("relation component of '" + owner + "' cannot be sampled");
      }
      if (cd->children.size() != 2) {
        genfail("relation component of '" + owner + "' is unbounded");
      }
      const std::int64_t lo = eval_bound(cd->children[0]);
      const std::int64_t hi = eval_bound(cd->children[1]);
      if (hi < lo) throw RejectDraw{};
      pool *= static_cast<__int128>(hi) - lo + 1;
      if (pool > kMaxPoolTuples) throw RejectDraw{};
      comps.emplace_back(lo, hi);
    }
    const auto box = static_cast<std::size_t>(pool);
    std::vector<std::vector<std::int64_t>> tuples;
    tuples.reserve(box);
    std::vector<std::int64_t> cur;
    for (const auto& [lo, hi] : comps) {
      (void)hi;
      cur.push_back(lo);
    }
    for (std::size_t n = 0; n < box; ++n) {
      tuples.push_back(cur);
      for (std::size_t i = comps.size(); i-- > 0;) {
        if (cur[i] < comps[i].second) {
          ++cur[i];
          break;
        }
        cur[i] = comps[i].first;
      }
    }

    std::optional<std::int64_t> size, min_size, max_size;
    if (const Node* a = find_attr(dom, Kind::SizeAttr)) size = eval_bound(a->children[0]);
    if (const Node* a = find_attr(dom, Kind::MinSizeAttr)) min_size = eval_bound(a->children[0]);
    if (const Node* a = find_attr(dom, Kind::MaxSizeAttr)) max_size = eval_bound(a->children[0]);

    RelValue rel;
    rel.arity = static_cast<int>(comps.size());
    if (!size && !min_size && !max_size) {
      for (const auto& t : tuples) {
        if (unit_draw(rng_) < cfg_.density) rel.rows.push_back(t);
      }
      rel.canonicalize();
      return rel;
    }

    const auto pool_n = static_cast<std::int64_t>(box);
    std::int64_t lo_k = std::max<std::int64_t>(min_size.value_or(0), 0);
    std::int64_t hi_k = std::min(max_size.value_or(pool_n), pool_n);
    if (size) {
      if (*size < lo_k || *size > hi_k) throw RejectDraw{};
      lo_k = hi_k = *size;
    }
    if (lo_k > hi_k) throw RejectDraw{};
    const std::int64_t k =
        lo_k + static_cast<std::int64_t>(
                   bounded_draw(rng_, static_cast<std::uint64_t>(hi_k - lo_k + 1)));

    // k distinct tuples via a partial shuffle of the pool indices.
    std::vector<std::size_t> idx(box);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::int64_t j = 0; j < k; ++j) {
      const auto pick =
          static_cast<std::size_t>(j) +
          static_cast<std::size_t>(bounded_draw(rng_, box - static_cast<std::size_t>(j)));
      std::swap(idx[static_cast<std::size_t>(j)], idx[pick]);
    }
    for (std::int64_t j = 0; j < k; ++j) {
      rel.rows.push_back(tuples[idx[static_cast<std::size_t>(j)]]);
    }
    rel.canonicalize();
    return rel;
  }

  const Ast& spec_;
  const SampleConfig& cfg_;
  std::mt19937_64& rng_;
  std::map<std::string, Value> params_;
  std::map<std::string, NodePtr> aliases_;
};

}  // namespace

std::vector<Instance> sample_instances(const Ast& spec, const SampleConfig& cfg) {
  if (cfg.count < 1) genfail("count must be at least 1");
  if (!(cfg.density >= 0.0 && cfg.density <= 1.0)) {
    genfail("density must lie in [0, 1]");
  }
  if (cfg.cap < 0) genfail("cap must be non-negative");
  bool has_given = false;
  for (const NodePtr& stmt : spec->children) {
    has_given = has_given || stmt->kind == Kind::Given;
  }
  if (!has_given) genfail("specification has no given parameters to sample");

  std::mt19937_64 rng(cfg.seed);
  Sampler sampler(spec, cfg, rng);
  std::vector<Instance> out;
  out.reserve(cfg.count);
  for (std::uint64_t i = 0; i < cfg.count; ++i) {
    std::uint64_t rejections = 0;
    for (;;) {
      try {
        Instance inst = sampler.attempt();
        ground(spec, inst);  // the specification has the last word
        out.push_back(std::move(inst));
        break;
      } catch (const RejectDraw&) {
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Ground) throw;
      }
      if (++rejections >= cfg.max_rejections) {
        genfail("rejection limit exceeded");
      }
    }
  }
  return out;
}

// ============================================================
// Instance files
// ============================================================

namespace {

[[noreturn]] void instfail(const std::string& msg, int line = 0) {
  throw Error(ErrorKind::Instance, msg, line);
}

struct TextCursor {
  std::string_view s;
  std::size_t i = 0;
  int line;

  void skip_space() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() {
    skip_space();
    return i >= s.size();
  }
  bool eat(char c) {
    skip_space();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  std::int64_t integer() {
    skip_space();
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + start, s.data() + i, v);
    if (ec != std::errc() || p != s.data() + i || start == i) {
      instfail("expected an integer", line);
    }
    return v;
  }
};

Value parse_text_value(std::string_view text, const std::string& name, int line) {
  TextCursor c{text, 0, line};
  c.skip_space();
  if (text.substr(c.i, 4) == "true" && c.i + 4 >= text.size()) return Value::of_bool(true);
  if (text.substr(c.i, 5) == "false" && c.i + 5 >= text.size()) return Value::of_bool(false);
  if (text.substr(c.i, 8) == "relation") {
    c.i += 8;
    c.skip_space();
  }
  if (c.i < text.size() && text[c.i] == '{') {
    ++c.i;
    RelValue rel;
    if (!c.eat('}')) {
      for (;;) {
        std::vector<std::int64_t> row;
        if (c.eat('(')) {
          row.push_back(c.integer());
          while (c.eat(',')) row.push_back(c.integer());
          if (!c.eat(')')) instfail("expected ')' in a tuple", line);
        } else {
          row.push_back(c.integer());
        }
        if (rel.rows.empty()) {
          rel.arity = static_cast<int>(row.size());
        } else if (static_cast<int>(row.size()) != rel.arity) {
          instfail("rows of '" + name + "' must share one arity", line);
        }
        rel.rows.push_back(std::move(row));
        if (c.eat('}')) break;
        if (!c.eat(',')) instfail("expected ',' or '}' in a relation value", line);
      }
    }
    if (!c.done()) instfail("unexpected text after the value", line);
    rel.canonicalize();
    return Value::of_rel(std::move(rel));
  }
  std::int64_t v = c.integer();
  if (!c.done()) instfail("unexpected text after the value", line);
  return Value::of_int(v);
}

Instance parse_instance_text(std::string_view text) {
  Instance inst;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (const std::size_t dollar = line.find('$'); dollar != std::string_view::npos) {
      line = line.substr(0, dollar);
    }
    TextCursor c{line, 0, line_no};
    if (c.done()) continue;
    auto word = [&]() -> std::string {
      c.skip_space();
      std::size_t start = c.i;
      while (c.i < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[c.i])) || line[c.i] == '_')) {
        ++c.i;
      }
      return std::string(line.substr(start, c.i - start));
    };
    if (word() != "letting") instfail("expected 'letting'", line_no);
    const std::string name = word();
    if (name.empty()) instfail("expected a parameter name", line_no);
    if (word() != "be") instfail("expected 'be'", line_no);
    if (inst.count(name) != 0) {
      instfail("duplicate binding for '" + name + "'", line_no);
    }
    inst[name] = parse_text_value(line.substr(c.i), name, line_no);
  }
  return inst;
}

Instance parse_instance_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) instfail("invalid JSON");
  if (!j.is_object()) instfail("instance JSON must be one object");
  Instance inst;
  for (const auto& [name, v] : j.items()) {
    if (v.is_boolean()) {
      inst[name] = Value::of_bool(v.get<bool>());
    } else if (v.is_number_integer() && !(v.is_number_unsigned() &&
                                          v.get<std::uint64_t>() >
                                              9223372036854775807ULL)) {
      inst[name] = Value::of_int(v.get<std::int64_t>());
    } else if (v.is_array()) {
      RelValue rel;
      for (const auto& row : v) {
        std::vector<std::int64_t> r;
        if (row.is_number_integer()) {
          r.push_back(row.get<std::int64_t>());
        } else if (row.is_array()) {
          for (const auto& x : row) {
            if (!x.is_number_integer()) {
              instfail("rows of '" + name + "' must hold integers");
            }
            r.push_back(x.get<std::int64_t>());
          }
          if (r.empty()) instfail("rows of '" + name + "' must not be empty");
        } else {
          instfail("value of '" + name + "' must be integers or integer arrays");
        }
        if (rel.rows.empty()) {
          rel.arity = static_cast<int>(r.size());
        } else if (static_cast<int>(r.size()) != rel.arity) {
          instfail("rows of '" + name + "' must share one arity");
        }
        rel.rows.push_back(std::move(r));
      }
      rel.canonicalize();
      inst[name] = Value::of_rel(std::move(rel));
    } else {
      instfail("value of '" + name + "' must be an integer, boolean, or array");
    }
  }
  return inst;
}

}  // namespace

Instance parse_instance(std::string_view text) {
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
    if (ch == '{') return parse_instance_json(text);
    break;
  }
  return parse_instance_text(text);
}

std::string instance_to_text(const Instance& inst) {
  std::string out;
  for (const auto& [name, v] : inst) {
    out += "letting " + name + " be ";
    switch (v.kind) {
      case Value::Kind::Int:
        out += std::to_string(v.i);
        break;
      case Value::Kind::Bool:
        out += v.b ? "true" : "false";
        break;
      case Value::Kind::Rel:
        out += pretty_expr(mk_relation_lit(v.rel));
        break;
    }
    out += "\n";
  }
  return out;
}

std::string instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, v] : inst) {
    switch (v.kind) {
      case Value::Kind::Int:
        j[name] = v.i;
        break;
      case Value::Kind::Bool:
        j[name] = v.b;
        break;
      case Value::Kind::Rel: {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : v.rel.rows) {
          if (v.rel.arity == 1) {
            rows.push_back(row[0]);
          } else {
            rows.push_back(row);
          }
        }
        j[name] = std::move(rows);
        break;
      }
    }
  }
  return j.dump(2);
}

}  // namespace reformine
