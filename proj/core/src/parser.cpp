#include "reformine/parser.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace reformine {

namespace {

// ============================================================
// Lexer
// ============================================================

enum class TokKind { End, Int, Word, Sym };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t ival = 0;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(std::string_view text, ErrorKind error_kind) {
  static constexpr std::string_view kMultiSyms[] = {
      "/\\", "\\/", "<->", "->", "<=", ">=", "!=", "..",
  };
  static constexpr std::string_view kSingleSyms = "(){},:.*/%+-=<>!|";

  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '$') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t v = 0;
      std::size_t n = 0;
      while (i + n < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + n]))) {
        int d = text[i + n] - '0';
        if (v > (std::numeric_limits<std::int64_t>::max() - d) / 10) {
          throw Error(error_kind, "integer literal out of range", line, col);
        }
        v = v * 10 + d;
        ++n;
      }
      t.kind = TokKind::Int;
      t.ival = v;
      t.text = std::string(text.substr(i, n));
      advance(n);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t n = 0;
      while (i + n < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i + n])) ||
              text[i + n] == '_')) {
        ++n;
      }
      t.kind = TokKind::Word;
      t.text = std::string(text.substr(i, n));
      advance(n);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (std::string_view sym : kMultiSyms) {
      if (text.substr(i, sym.size()) == sym) {
        t.kind = TokKind::Sym;
        t.text = std::string(sym);
        advance(sym.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingleSyms.find(c) != std::string_view::npos) {
      t.kind = TokKind::Sym;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    throw Error(error_kind, std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = TokKind::End;
  end.text = "<end>";
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

// ============================================================
// Parser
// ============================================================

struct InfixOp {
  BinaryOp op;
  int lbp;
  int rbp;
  bool comparison;
};

std::optional<InfixOp> infix_for(const Token& t) {
  if (t.kind == TokKind::Sym) {
    const std::string& s = t.text;
    if (s == "*") return InfixOp{BinaryOp::Mul, 60, 61, false};
    if (s == "/") return InfixOp{BinaryOp::Div, 60, 61, false};
    if (s == "%") return InfixOp{BinaryOp::Mod, 60, 61, false};
    if (s == "+") return InfixOp{BinaryOp::Add, 50, 51, false};
    if (s == "-") return InfixOp{BinaryOp::Sub, 50, 51, false};
    if (s == "=") return InfixOp{BinaryOp::Eq, 40, 41, true};
    if (s == "!=") return InfixOp{BinaryOp::Ne, 40, 41, true};
    if (s == "<") return InfixOp{BinaryOp::Lt, 40, 41, true};
    if (s == "<=") return InfixOp{BinaryOp::Le, 40, 41, true};
    if (s == ">") return InfixOp{BinaryOp::Gt, 40, 41, true};
    if (s == ">=") return InfixOp{BinaryOp::Ge, 40, 41, true};
    if (s == "/\\") return InfixOp{BinaryOp::And, 35, 36, false};
    if (s == "\\/") return InfixOp{BinaryOp::Or, 30, 31, false};
    if (s == "->") return InfixOp{BinaryOp::Implies, 25, 25, false};
    if (s == "<->") return InfixOp{BinaryOp::Iff, 20, 21, false};
  } else if (t.kind == TokKind::Word) {
    if (t.text == "in") return InfixOp{BinaryOp::In, 40, 41, true};
    if (t.text == "subsetEq") return InfixOp{BinaryOp::SubsetEq, 40, 41, true};
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, ErrorKind error_kind)
      : error_kind_(error_kind), toks_(lex(text, error_kind)) {}

  Ast parse_statements();
  NodePtr parse_expr_to_end();
  NodePtr parse_domain_to_end();
  Instance parse_instance();

 private:
  ErrorKind error_kind_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = pos_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek()); }
  [[noreturn]] void fail_at(const std::string& msg, const Token& t) const {
    throw Error(error_kind_, msg, t.line, t.col);
  }

  bool at_sym(std::string_view s) const {
    return peek().kind == TokKind::Sym && peek().text == s;
  }
  bool at_word(std::string_view w) const {
    return peek().kind == TokKind::Word && peek().text == w;
  }
  void expect_sym(std::string_view s) {
    if (!at_sym(s)) fail("expected '" + std::string(s) + "'");
    take();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'");
    take();
  }
  std::string expect_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != TokKind::Word || !is_valid_identifier(t.text)) {
      fail(std::string("expected ") + what);
    }
    return take().text;
  }
  std::vector<std::string> ident_list(const char* what) {
    std::vector<std::string> names{expect_ident(what)};
    while (at_sym(",")) {
      take();
      names.push_back(expect_ident(what));
    }
    return names;
  }

  NodePtr parse_statement_into(std::vector<NodePtr>& out);
  NodePtr parse_domain();
  std::vector<NodePtr> parse_attrs();
  NodePtr parse_expr(int min_bp);
  NodePtr parse_unary();
  NodePtr parse_primary();
  NodePtr parse_quantifier();
  NodePtr parse_range_expr();
  RelValue parse_rel_rows();
  std::int64_t parse_signed_int();
};

std::int64_t Parser::parse_signed_int() {
  bool neg = false;
  if (at_sym("-")) {
    take();
    neg = true;
  }
  if (peek().kind != TokKind::Int) fail("expected an integer");
  std::int64_t v = take().ival;
  return neg ? -v : v;
}

RelValue Parser::parse_rel_rows() {
  expect_sym("{");
  RelValue out;
  if (!at_sym("}")) {
    for (;;) {
      std::vector<std::int64_t> row;
      if (at_sym("(")) {
        const Token& open = peek();
        take();
        row.push_back(parse_signed_int());
        while (at_sym(",")) {
          take();
          row.push_back(parse_signed_int());
        }
        expect_sym(")");
        if (row.size() < 2) {
          fail_at("tuple rows need at least two components", open);
        }
      } else {
        row.push_back(parse_signed_int());
      }
      if (out.rows.empty()) {
        out.arity = static_cast<int>(row.size());
      } else if (static_cast<int>(row.size()) != out.arity) {
        fail("relation literal rows have mixed arities");
      }
      out.rows.push_back(std::move(row));
      if (!at_sym(",")) break;
      take();
    }
  }
  expect_sym("}");
  out.canonicalize();
  return out;
}

NodePtr Parser::parse_range_expr() {
  if (at_sym("{")) return mk_relation_lit(parse_rel_rows());
  if (at_word("relation")) {
    take();
    return mk_relation_lit(parse_rel_rows());
  }
  if (peek().kind == TokKind::Word && is_valid_identifier(peek().text)) {
    return mk_ref(take().text);
  }
  fail("quantifier range must be a reference or a constant set");
}

NodePtr Parser::parse_quantifier() {
  QuantKind qk = at_word("forAll")  ? QuantKind::ForAll
                 : at_word("exists") ? QuantKind::Exists
                                     : QuantKind::Sum;
  take();
  const Token& names_at = peek();
  std::vector<std::string> names = ident_list("a binder name");
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      if (names[a] == names[b]) {
        fail_at("duplicate binder name '" + names[a] + "'", names_at);
      }
    }
  }
  NodePtr range;
  if (at_word("in")) {
    take();
    range = parse_range_expr();
  } else if (at_sym(":")) {
    take();
    range = parse_domain();
  } else {
    fail("expected ':' or 'in' after binder names");
  }
  expect_sym(".");
  NodePtr body = parse_expr(0);
  for (auto it = names.rbegin(); it != names.rend(); ++it) {
    body = mk_quant(qk, *it, range, std::move(body));
  }
  return body;
}

NodePtr Parser::parse_primary() {
  const Token& t = peek();
  if (t.kind == TokKind::Int) {
    return mk_int(take().ival);
  }
  if (t.kind == TokKind::Word) {
    if (t.text == "true" || t.text == "false") {
      return mk_bool(take().text == "true");
    }
    if (t.text == "toInt") {
      take();
      expect_sym("(");
      NodePtr e = parse_expr(0);
      expect_sym(")");
      return mk_unary(UnaryOp::ToInt, std::move(e));
    }
    if (t.text == "forAll" || t.text == "exists" || t.text == "sum") {
      return parse_quantifier();
    }
    if (t.text == "relation") {
      take();
      return mk_relation_lit(parse_rel_rows());
    }
    if (is_valid_identifier(t.text)) {
      return mk_ref(take().text);
    }
    fail("unexpected keyword '" + t.text + "' in an expression");
  }
  if (at_sym("(")) {
    take();
    NodePtr e = parse_expr(0);
    if (at_sym(",")) {
      std::vector<NodePtr> comps{std::move(e)};
      while (at_sym(",")) {
        take();
        comps.push_back(parse_expr(0));
      }
      expect_sym(")");
      return mk_tuple(std::move(comps));
    }
    expect_sym(")");
    return e;
  }
  if (at_sym("{")) {
    return mk_relation_lit(parse_rel_rows());
  }
  if (at_sym("|")) {
    take();
    NodePtr e = parse_expr(0);
    expect_sym("|");
    return mk_unary(UnaryOp::Card, std::move(e));
  }
  fail("expected an expression");
}

NodePtr Parser::parse_unary() {
  if (at_sym("-")) {
    take();
    NodePtr e = parse_expr(70);
    if (e->kind == Kind::IntLit) return mk_int(-e->ival);
    return mk_unary(UnaryOp::Neg, std::move(e));
  }
  if (at_sym("!")) {
    take();
    return mk_unary(UnaryOp::Not, parse_expr(70));
  }
  return parse_primary();
}

NodePtr Parser::parse_expr(int min_bp) {
  NodePtr lhs = parse_unary();
  bool last_was_comparison = false;
  for (;;) {
    const Token& t = peek();
    auto op = infix_for(t);
    if (!op || op->lbp < min_bp) break;
    if (op->comparison && last_was_comparison) {
      fail("comparison operators do not chain; add parentheses");
    }
    take();
    NodePtr rhs = parse_expr(op->rbp);
    lhs = mk_binary(op->op, std::move(lhs), std::move(rhs));
    last_was_comparison = op->comparison;
  }
  return lhs;
}

std::vector<NodePtr> Parser::parse_attrs() {
  auto attr_word = [&](std::size_t ahead) {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Word &&
           (t.text == "size" || t.text == "minSize" || t.text == "maxSize");
  };
  std::vector<NodePtr> attrs;
  if (!at_sym("(") || !attr_word(1)) return attrs;
  take();
  for (;;) {
    if (!attr_word(0)) fail("expected size, minSize, or maxSize");
    std::string word = take().text;
    Kind k = word == "size"      ? Kind::SizeAttr
             : word == "minSize" ? Kind::MinSizeAttr
                                 : Kind::MaxSizeAttr;
    attrs.push_back(mk_attr(k, parse_expr(0)));
    if (!at_sym(",")) break;
    take();
  }
  expect_sym(")");
  std::stable_sort(attrs.begin(), attrs.end(),
                   [](const NodePtr& a, const NodePtr& b) {
                     return static_cast<int>(a->kind) < static_cast<int>(b->kind);
                   });
  return attrs;
}

NodePtr Parser::parse_domain() {
  if (at_word("bool")) {
    take();
    return mk_bool_domain();
  }
  if (at_word("int")) {
    take();
    expect_sym("(");
    NodePtr lo = parse_expr(0);
    expect_sym("..");
    NodePtr hi;
    if (!at_sym(")")) hi = parse_expr(0);
    expect_sym(")");
    return mk_int_domain(std::move(lo), std::move(hi));
  }
  if (at_word("set")) {
    take();
    std::vector<NodePtr> attrs = parse_attrs();
    expect_word("of");
    NodePtr comp = parse_domain();
    return mk_relation_domain(std::move(attrs), {std::move(comp)});
  }
  if (at_word("relation")) {
    take();
    std::vector<NodePtr> attrs = parse_attrs();
    expect_word("of");
    expect_sym("(");
    std::vector<NodePtr> comps{parse_domain()};
    while (at_sym("*")) {
      take();
      comps.push_back(parse_domain());
    }
    expect_sym(")");
    return mk_relation_domain(std::move(attrs), std::move(comps));
  }
  if (peek().kind == TokKind::Word && is_valid_identifier(peek().text)) {
    return mk_domain_ref(take().text);
  }
  fail("expected a domain");
}

NodePtr Parser::parse_statement_into(std::vector<NodePtr>& out) {
  if (at_word("given")) {
    take();
    std::vector<std::string> names = ident_list("a parameter name");
    expect_sym(":");
    out.push_back(mk_given(std::move(names), parse_domain()));
    return out.back();
  }
  if (at_word("letting")) {
    take();
    std::string name = expect_ident("a name");
    expect_word("be");
    if (at_word("domain")) {
      take();
      out.push_back(mk_letting(std::move(name), parse_domain()));
    } else {
      out.push_back(mk_letting(std::move(name), parse_expr(0)));
    }
    return out.back();
  }
  if (at_word("where")) {
    take();
    out.push_back(mk_where(parse_expr(0)));
    while (at_sym(",")) {
      take();
      out.push_back(mk_where(parse_expr(0)));
    }
    return out.back();
  }
  if (at_word("find")) {
    take();
    std::vector<std::string> names = ident_list("a decision variable name");
    expect_sym(":");
    NodePtr dom = parse_domain();
    for (auto& name : names) {
      out.push_back(mk_find(std::move(name), dom));
    }
    return out.back();
  }
  if (at_word("such")) {
    take();
    expect_word("that");
    std::vector<NodePtr> constraints{parse_expr(0)};
    while (at_sym(",")) {
      take();
      constraints.push_back(parse_expr(0));
    }
    out.push_back(mk_such_that(std::move(constraints)));
    return out.back();
  }
  if (at_word("minimising") || at_word("maximising")) {
    ObjDir dir = at_word("minimising") ? ObjDir::Minimising : ObjDir::Maximising;
    take();
    out.push_back(mk_objective(dir, parse_expr(0)));
    return out.back();
  }
  fail("expected a statement");
}

Ast Parser::parse_statements() {
  std::vector<NodePtr> statements;
  while (peek().kind != TokKind::End) {
    parse_statement_into(statements);
  }
  return mk_root(std::move(statements));
}

NodePtr Parser::parse_expr_to_end() {
  NodePtr e = parse_expr(0);
  if (peek().kind != TokKind::End) fail("trailing input after expression");
  return e;
}

NodePtr Parser::parse_domain_to_end() {
  NodePtr d = parse_domain();
  if (peek().kind != TokKind::End) fail("trailing input after domain");
  return d;
}

Instance Parser::parse_instance() {
  Instance out;
  while (peek().kind != TokKind::End) {
    expect_word("letting");
    const Token& name_tok = peek();
    std::string name = expect_ident("a parameter name");
    expect_word("be");
    Value v;
    if (peek().kind == TokKind::Int || at_sym("-")) {
      v = Value::of_int(parse_signed_int());
    } else if (at_sym("{")) {
      v = Value::of_rel(parse_rel_rows());
    } else if (at_word("relation")) {
      take();
      v = Value::of_rel(parse_rel_rows());
    } else {
      fail("expected an integer, set, or relation value");
    }
    if (!out.emplace(std::move(name), std::move(v)).second) {
      fail_at("duplicate binding", name_tok);
    }
  }
  return out;
}

}  // namespace

// ============================================================
// Entry points
// ============================================================

Ast parse_spec(std::string_view text) {
  Parser p(text, ErrorKind::Syntax);
  return validate(p.parse_statements());
}

Ast parse_spec_only(std::string_view text) {
  Parser p(text, ErrorKind::Syntax);
  return p.parse_statements();
}

Ast parse_expr_fragment(std::string_view text) {
  try {
    Parser p(text, ErrorKind::Syntax);
    return p.parse_expr_to_end();
  } catch (const Error&) {
    Parser p(text, ErrorKind::Syntax);
    return p.parse_domain_to_end();
  }
}

Instance parse_instance_text(std::string_view text) {
  Parser p(text, ErrorKind::Instance);
  return p.parse_instance();
}

Instance parse_instance_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Instance, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::Instance, "instance JSON must be an object");
  }
  Instance out;
  for (const auto& [name, val] : j.items()) {
    if (!is_valid_identifier(name)) {
      throw Error(ErrorKind::Instance,
                  "'" + name + "' is not a valid parameter name");
    }
    if (val.is_number_integer()) {
      out.emplace(name, Value::of_int(val.get<std::int64_t>()));
      continue;
    }
    if (val.is_boolean()) {
      throw Error(ErrorKind::Instance,
                  "boolean parameters are not supported ('" + name + "')");
    }
    if (!val.is_array()) {
      throw Error(ErrorKind::Instance,
                  "'" + name + "' must be an integer or an array");
    }
    RelValue rel;
    for (const auto& elem : val) {
      std::vector<std::int64_t> row;
      if (elem.is_number_integer()) {
        row.push_back(elem.get<std::int64_t>());
      } else if (elem.is_array()) {
        for (const auto& x : elem) {
          if (!x.is_number_integer()) {
            throw Error(ErrorKind::Instance,
                        "'" + name + "' rows must contain integers");
          }
          row.push_back(x.get<std::int64_t>());
        }
        if (row.empty()) {
          throw Error(ErrorKind::Instance, "'" + name + "' has an empty row");
        }
      } else {
        throw Error(ErrorKind::Instance,
                    "'" + name + "' rows must be integers or integer arrays");
      }
      if (rel.rows.empty()) {
        rel.arity = static_cast<int>(row.size());
      } else if (static_cast<int>(row.size()) != rel.arity) {
        throw Error(ErrorKind::Instance, "'" + name + "' rows have mixed arities");
      }
      rel.rows.push_back(std::move(row));
    }
    out.emplace(name, Value::of_rel(std::move(rel)));
  }
  return out;
}

std::string format_instance_text(const Instance& instance) {
  std::ostringstream os;
  for (const auto& [name, value] : instance) {
    os << "letting " << name << " be ";
    switch (value.kind) {
      case Value::Kind::Int:
        os << value.i;
        break;
      case Value::Kind::Bool:
        os << (value.b ? "true" : "false");
        break;
      case Value::Kind::Rel: {
        const RelValue& rel = value.rel;
        bool set_form = rel.rows.empty() || rel.arity == 1;
        if (!set_form) os << "relation ";
        os << "{";
        for (std::size_t r = 0; r < rel.rows.size(); ++r) {
          if (r) os << ", ";
          const auto& row = rel.rows[r];
          if (set_form) {
            os << row[0];
          } else {
            os << "(";
            for (std::size_t k = 0; k < row.size(); ++k) {
              if (k) os << ", ";
              os << row[k];
            }
            os << ")";
          }
        }
        os << "}";
        break;
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string format_instance_json(const Instance& instance) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, value] : instance) {
    switch (value.kind) {
      case Value::Kind::Int:
        j[name] = value.i;
        break;
      case Value::Kind::Bool:
        j[name] = value.b;
        break;
      case Value::Kind::Rel: {
        const RelValue& rel = value.rel;
        if (rel.rows.empty() || rel.arity == 1) {
          auto arr = nlohmann::ordered_json::array();
          for (const auto& row : rel.rows) arr.push_back(row[0]);
          j[name] = std::move(arr);
        } else {
          auto arr = nlohmann::ordered_json::array();
          for (const auto& row : rel.rows) arr.push_back(row);
          j[name] = std::move(arr);
        }
        break;
      }
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace reformine
