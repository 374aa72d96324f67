#include "doctest.h"
#include "reformine/parser.hpp"
#include "test_support.hpp"

using namespace reformine;
using namespace reformine::testing;

// ============================================================
// Statements and structure
// ============================================================

TEST_CASE("worked example parses to a find and one constraint") {
  Ast spec = parse_spec(kExampleSpec);
  REQUIRE(spec->children.size() == 2);

  NodePtr find = stmt(spec, 0);
  CHECK(find->kind == Kind::Find);
  NodePtr dv = find->children[0];
  CHECK(dv->name == "x");
  NodePtr dom = dv->children[0];
  CHECK(dom->kind == Kind::IntDomain);
  CHECK(dom->children[0]->ival == 0);
  CHECK(dom->children[1]->ival == 100);

  NodePtr st = stmt(spec, 1);
  REQUIRE(st->kind == Kind::SuchThat);
  REQUIRE(st->children.size() == 1);

  NodePtr eq = st->children[0];
  REQUIRE(eq->kind == Kind::Binary);
  CHECK(eq->bop == BinaryOp::Eq);
  NodePtr outer = eq->children[0];  // (1*(2+3))*4
  REQUIRE(outer->bop == BinaryOp::Mul);
  CHECK(outer->children[1]->ival == 4);
  NodePtr inner = outer->children[0];  // 1*(2+3)
  REQUIRE(inner->bop == BinaryOp::Mul);
  CHECK(inner->children[0]->ival == 1);
  NodePtr plus = inner->children[1];
  CHECK(plus->bop == BinaryOp::Add);
  CHECK(plus->children[0]->ival == 2);
  CHECK(plus->children[1]->ival == 3);

  NodePtr ref = eq->children[1];
  CHECK(ref->kind == Kind::Reference);
  CHECK(ref->name == "x");
  CHECK(ref->target == RefTarget::DecisionVariable);
}

TEST_CASE("worked example accepts the single-line such that form") {
  Ast a = parse_spec("find x : int(0..100)\nsuch that 1*(2+3)*4 = x");
  Ast b = parse_spec(kExampleSpec);
  CHECK(ast_equal(a, b));
}

TEST_CASE("minimal boolean spec") {
  Ast spec = parse_spec("find b : bool such that b");
  REQUIRE(spec->children.size() == 2);
  CHECK(stmt(spec, 0)->children[0]->children[0]->kind == Kind::BoolDomain);
  CHECK(constraint(spec)->kind == Kind::Reference);
}

TEST_CASE("truncated input reports line and column") {
  Error e = expect_error([] { parse_spec("find x :"); });
  CHECK(e.kind() == ErrorKind::Syntax);
  CHECK(e.line() == 1);
  CHECK(e.column() > 8);
}

TEST_CASE("comments run to end of line") {
  Ast spec = parse_spec(
      "$ a whole-line comment\n"
      "find x : int(0..3)  $ trailing comment\n"
      "such that x = 1 $ another\n");
  CHECK(spec->children.size() == 2);
}

TEST_CASE("empty specification is allowed") {
  Ast spec = parse_spec("");
  CHECK(spec->kind == Kind::Root);
  CHECK(spec->children.empty());
}

TEST_CASE("multi-name find desugars to one statement per name") {
  Ast spec = parse_spec("find x, y : int(0..1)\nsuch that x <= y");
  REQUIRE(spec->children.size() == 3);
  CHECK(stmt(spec, 0)->children[0]->name == "x");
  CHECK(stmt(spec, 1)->children[0]->name == "y");
}

TEST_CASE("given keeps its name list in one statement") {
  Ast spec = parse_spec("given a, b : int(1..10)\nfind x : int(1..a)\nsuch that x <= b");
  REQUIRE(spec->children.size() == 3);
  NodePtr given = stmt(spec, 0);
  REQUIRE(given->children.size() == 3);  // two parameters + domain
  CHECK(given->children[0]->name == "a");
  CHECK(given->children[1]->name == "b");
  CHECK(given->children[2]->kind == Kind::IntDomain);
}

TEST_CASE("where statements accept a comma list") {
  Ast spec = parse_spec(
      "given n : int(1..10)\n"
      "where n >= 2, n <= 9\n"
      "find x : int(1..n)\n");
  REQUIRE(spec->children.size() == 4);
  CHECK(stmt(spec, 1)->kind == Kind::Where);
  CHECK(stmt(spec, 2)->kind == Kind::Where);
}

TEST_CASE("letting introduces values and domain aliases") {
  Ast spec = parse_spec(
      "letting n be 4 + 1\n"
      "letting Item be domain int(1..n)\n"
      "find x : Item\n"
      "such that forAll y : Item . x >= y \\/ x = 1\n");
  CHECK(stmt(spec, 0)->children[1]->kind == Kind::Binary);
  CHECK(stmt(spec, 1)->children[1]->kind == Kind::IntDomain);
  CHECK(stmt(spec, 2)->children[0]->children[0]->kind == Kind::DomainRef);
}

TEST_CASE("objective statements parse in both directions") {
  Ast spec = parse_spec("find x : int(0..5)\nsuch that x >= 2\nminimising x");
  CHECK(stmt(spec, 2)->kind == Kind::Objective);
  CHECK(stmt(spec, 2)->dir == ObjDir::Minimising);
  Ast spec2 = parse_spec("find x : int(0..5)\nmaximising x - 1");
  CHECK(stmt(spec2, 1)->dir == ObjDir::Maximising);
}

// ============================================================
// Expression grammar
// ============================================================

TEST_CASE("arithmetic precedence binds multiplication before addition") {
  Ast spec = parse_spec("find x : int(0..9)\nsuch that x = 1 + 2 * 3");
  NodePtr rhs = constraint(spec)->children[1];
  REQUIRE(rhs->bop == BinaryOp::Add);
  CHECK(rhs->children[1]->bop == BinaryOp::Mul);
}

TEST_CASE("implication is right-associative, iff left-associative") {
  Ast spec = parse_spec("find a, b, c : bool\nsuch that a -> b -> c, a <-> b <-> c");
  NodePtr imp = constraint(spec, 0);
  REQUIRE(imp->bop == BinaryOp::Implies);
  CHECK(imp->children[0]->kind == Kind::Reference);
  CHECK(imp->children[1]->bop == BinaryOp::Implies);
  NodePtr iff = constraint(spec, 1);
  REQUIRE(iff->bop == BinaryOp::Iff);
  CHECK(iff->children[0]->bop == BinaryOp::Iff);
  CHECK(iff->children[1]->kind == Kind::Reference);
}

TEST_CASE("conjunction binds tighter than disjunction") {
  Ast spec = parse_spec("find a, b, c : bool\nsuch that a \\/ b /\\ c");
  NodePtr e = constraint(spec);
  REQUIRE(e->bop == BinaryOp::Or);
  CHECK(e->children[1]->bop == BinaryOp::And);
}

TEST_CASE("comparisons do not chain") {
  Error e = expect_error([] { parse_spec("find x : int(0..9)\nsuch that 1 < x < 3"); });
  CHECK(e.kind() == ErrorKind::Syntax);
  CHECK(e.line() == 2);
}

TEST_CASE("unary minus folds into integer literals") {
  Ast spec = parse_spec("find x : int(-5..5)\nsuch that x = -3");
  NodePtr dom = stmt(spec, 0)->children[0]->children[0];
  CHECK(dom->children[0]->kind == Kind::IntLit);
  CHECK(dom->children[0]->ival == -5);
  CHECK(constraint(spec)->children[1]->ival == -3);
}

TEST_CASE("unary minus over a reference stays symbolic") {
  Ast spec = parse_spec("find x : int(-5..5)\nsuch that -x = 3");
  NodePtr neg = constraint(spec)->children[0];
  CHECK(neg->kind == Kind::Unary);
  CHECK(neg->uop == UnaryOp::Neg);
}

TEST_CASE("double negation parses") {
  Ast spec = parse_spec("find b : bool\nsuch that !!b");
  NodePtr e = constraint(spec);
  CHECK(e->uop == UnaryOp::Not);
  CHECK(e->children[0]->uop == UnaryOp::Not);
}

TEST_CASE("cardinality and toInt") {
  Ast spec = parse_spec(
      "find S : set of int(1..3)\n"
      "such that |S| + toInt(1 in S) <= 4\n");
  NodePtr e = constraint(spec);
  CHECK(e->children[0]->children[0]->uop == UnaryOp::Card);
  CHECK(e->children[0]->children[1]->uop == UnaryOp::ToInt);
}

TEST_CASE("tuple literals need two components and parse membership") {
  Ast spec = parse_spec(
      "find r : relation of (int(1..2) * int(1..2))\n"
      "such that (1, 2) in r\n");
  NodePtr e = constraint(spec);
  CHECK(e->bop == BinaryOp::In);
  CHECK(e->children[0]->kind == Kind::TupleLit);
  CHECK(e->children[0]->children.size() == 2);
}

TEST_CASE("relation literals canonicalize their rows") {
  Ast a = parse_spec("find S : set of int(1..5)\nsuch that S subsetEq {3, 1, 3}");
  Ast b = parse_spec("find S : set of int(1..5)\nsuch that S subsetEq {1, 3}");
  CHECK(ast_equal(a, b));
}

TEST_CASE("relation literal rows must share an arity") {
  Error e = expect_error([] {
    parse_spec("find r : relation of (int(1..2) * int(1..2))\n"
               "such that r subsetEq relation {(1, 2), 3}");
  });
  CHECK(e.kind() == ErrorKind::Syntax);
}

TEST_CASE("quantifiers bind loosest after the dot") {
  Ast spec = parse_spec(
      "find b : bool\n"
      "such that b \\/ forAll x : int(1..2) . x >= 1 /\\ b\n");
  NodePtr e = constraint(spec);
  REQUIRE(e->bop == BinaryOp::Or);
  NodePtr q = e->children[1];
  REQUIRE(q->kind == Kind::Quantifier);
  CHECK(q->children[1]->bop == BinaryOp::And);  // body swallowed the conjunction
}

TEST_CASE("multi-binder quantifiers desugar to nested quantifiers") {
  Ast spec = parse_spec(
      "find S : set of int(1..3)\n"
      "such that forAll a, b in S . a = b\n");
  NodePtr outer = constraint(spec);
  REQUIRE(outer->kind == Kind::Quantifier);
  CHECK(outer->children[0]->name == "a");
  NodePtr inner = outer->children[1];
  REQUIRE(inner->kind == Kind::Quantifier);
  CHECK(inner->children[0]->name == "b");
  CHECK(inner->children[0]->children[0]->kind == Kind::Reference);
}

TEST_CASE("duplicate binder names in one list are rejected") {
  Error e = expect_error([] {
    parse_spec("find S : set of int(1..3)\nsuch that forAll a, a in S . a = a");
  });
  CHECK(e.kind() == ErrorKind::Syntax);
}

TEST_CASE("binders shadow outer declarations") {
  Ast spec = parse_spec(
      "find x : int(1..3)\n"
      "such that forAll x : int(1..2) . x <= 2\n");
  NodePtr body = constraint(spec)->children[1];
  CHECK(body->children[0]->target == RefTarget::Binder);
}

// ============================================================
// Resolution and typing
// ============================================================

TEST_CASE("unresolved identifiers are reported") {
  Error e = expect_error([] { parse_spec("find x : int(0..1)\nsuch that y = 1"); });
  CHECK(e.kind() == ErrorKind::Resolve);
}

TEST_CASE("duplicate declarations are reported") {
  Error e = expect_error([] { parse_spec("find x : int(0..1)\nfind x : bool"); });
  CHECK(e.kind() == ErrorKind::Resolve);
}

TEST_CASE("declaration must precede use") {
  Error e = expect_error([] { parse_spec("find x : int(1..n)\ngiven n : int(1..9)"); });
  CHECK(e.kind() == ErrorKind::Resolve);
}

TEST_CASE("arithmetic over booleans is ill-typed") {
  Error e = expect_error([] { parse_spec("find b : bool\nsuch that b + 1 = 1"); });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("boolean givens are rejected") {
  Error e = expect_error([] { parse_spec("given b : bool\nfind x : int(0..1)"); });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("nested relation domains are rejected") {
  Error e = expect_error(
      [] { parse_spec("find S : set of set of int(1..2)\nsuch that |S| = 1"); });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("at most one objective") {
  Error e = expect_error(
      [] { parse_spec("find x : int(0..1)\nminimising x\nmaximising x"); });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("domain bounds may only reference parameters") {
  Error find_ref = expect_error(
      [] { parse_spec("find x : int(0..5)\nfind y : int(0..x)"); });
  CHECK(find_ref.kind() == ErrorKind::Type);
  Error binder_ref = expect_error([] {
    parse_spec("find b : bool\nsuch that forAll x : int(1..3) . "
               "forAll y : int(1..x) . b");
  });
  CHECK(binder_ref.kind() == ErrorKind::Type);
}

TEST_CASE("where clauses may not mention decision variables") {
  Error e = expect_error(
      [] { parse_spec("find x : int(0..5)\nwhere x >= 1\nsuch that x >= 0"); });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("membership arities must line up") {
  Error e = expect_error([] {
    parse_spec("find r : relation of (int(1..2) * int(1..2))\nsuch that 1 in r");
  });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("size excludes minSize and maxSize") {
  Error e = expect_error([] {
    parse_spec("find S : set (size 2, minSize 1) of int(1..3)\nsuch that |S| >= 0");
  });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("domain aliases cannot be used as values") {
  Error e = expect_error([] {
    parse_spec("letting Item be domain int(1..3)\nfind x : Item\nsuch that x = Item");
  });
  CHECK(e.kind() == ErrorKind::Type);
}

TEST_CASE("quantifying over a relation domain alias is rejected") {
  Error e = expect_error([] {
    parse_spec("letting R be domain set of int(1..2)\n"
               "find b : bool\n"
               "such that forAll t : R . b");
  });
  CHECK(e.kind() == ErrorKind::Type);
}

// ============================================================
// Instance files
// ============================================================

TEST_CASE("text instances parse ints, sets, and relations") {
  Instance inst = parse_instance_text(
      "$ fixture\n"
      "letting n be 5\n"
      "letting m be -2\n"
      "letting s be {3, 1}\n"
      "letting r be relation {(2, 2), (1, 2)}\n");
  CHECK(inst.at("n") == Value::of_int(5));
  CHECK(inst.at("m") == Value::of_int(-2));
  CHECK(inst.at("s").rel.rows == std::vector<std::vector<std::int64_t>>{{1}, {3}});
  CHECK(inst.at("r").rel.rows ==
        std::vector<std::vector<std::int64_t>>{{1, 2}, {2, 2}});
}

TEST_CASE("duplicate instance bindings are rejected") {
  Error e = expect_error(
      [] { parse_instance_text("letting n be 1\nletting n be 2\n"); });
  CHECK(e.kind() == ErrorKind::Instance);
}

TEST_CASE("json instances mirror the text format") {
  Instance inst = parse_instance_json(
      R"({"n": 5, "s": [3, 1], "r": [[2, 2], [1, 2]], "empty": []})");
  CHECK(inst.at("n") == Value::of_int(5));
  CHECK(inst.at("s").rel.arity == 1);
  CHECK(inst.at("r").rel.rows ==
        std::vector<std::vector<std::int64_t>>{{1, 2}, {2, 2}});
  CHECK(inst.at("empty").rel.rows.empty());
}

TEST_CASE("json instances reject booleans and floats") {
  CHECK(expect_error([] { parse_instance_json(R"({"b": true})"); }).kind() ==
        ErrorKind::Instance);
  CHECK(expect_error([] { parse_instance_json(R"({"x": 1.5})"); }).kind() ==
        ErrorKind::Instance);
  CHECK(expect_error([] { parse_instance_json("[1, 2]"); }).kind() ==
        ErrorKind::Instance);
}

TEST_CASE("instance formatting round-trips through both formats") {
  Instance inst = parse_instance_text(
      "letting n be 7\nletting s be {2, 4}\nletting r be relation {(1, 1), (1, 2)}\n");
  CHECK(parse_instance_text(format_instance_text(inst)) == inst);
  CHECK(parse_instance_json(format_instance_json(inst)) == inst);
}

// ============================================================
// Fragments
// ============================================================

TEST_CASE("expression fragments parse standalone") {
  NodePtr e = parse_expr_fragment("1 + 2 * 3");
  REQUIRE(e->bop == BinaryOp::Add);
  NodePtr d = parse_expr_fragment("set (minSize 1) of int(1..5)");
  CHECK(d->kind == Kind::RelationDomain);
}
