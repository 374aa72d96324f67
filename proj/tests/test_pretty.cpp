#include <string>

#include "doctest.h"
#include "reformine/parser.hpp"
#include "reformine/pretty.hpp"
#include "test_support.hpp"

using namespace reformine;
using namespace reformine::testing;

namespace {

std::string canon(const std::string& text) { return pretty(parse_spec(text)); }

}  // namespace

// ============================================================
// Canonical text
// ============================================================

TEST_CASE("worked example prints in its canonical form") {
  CHECK(canon(kExampleSpec) == kExampleSpec);
}

TEST_CASE("required parentheses are kept, superfluous ones dropped") {
  CHECK(canon("find x : int(0..100)\nsuch that ((1*(2+3)*4)) = ((x))") ==
        kExampleSpec);
}

TEST_CASE("redundant parentheses around references disappear") {
  std::string out = canon("find x : int(0..9)\nsuch that ((x)) = 1");
  CHECK(out.find("((") == std::string::npos);
  CHECK(out.find("x = 1") != std::string::npos);
}

TEST_CASE("precedence-driven parenthesization") {
  SUBCASE("addition under multiplication keeps parens") {
    CHECK(canon("find x : int(0..9)\nsuch that x = (1+2)*3")
              .find("(1+2)*3") != std::string::npos);
  }
  SUBCASE("multiplication under addition needs none") {
    CHECK(canon("find x : int(0..9)\nsuch that x = 1+2*3").find("1+2*3") !=
          std::string::npos);
  }
  SUBCASE("disjunction under conjunction keeps parens") {
    CHECK(canon("find a, b, c : bool\nsuch that (a \\/ b) /\\ c")
              .find("(a \\/ b) /\\ c") != std::string::npos);
  }
  SUBCASE("conjunction under disjunction needs none") {
    CHECK(canon("find a, b, c : bool\nsuch that a \\/ (b /\\ c)")
              .find("a \\/ b /\\ c") != std::string::npos);
  }
  SUBCASE("right-nested implication needs none") {
    CHECK(canon("find a, b, c : bool\nsuch that a -> (b -> c)")
              .find("a -> b -> c") != std::string::npos);
  }
  SUBCASE("left-nested implication keeps parens") {
    CHECK(canon("find a, b, c : bool\nsuch that (a -> b) -> c")
              .find("(a -> b) -> c") != std::string::npos);
  }
  SUBCASE("nested comparisons keep parens") {
    CHECK(canon("find a, b : bool\nsuch that (a = b) = b")
              .find("(a = b) = b") != std::string::npos);
  }
}

TEST_CASE("quantifiers print without parens only in rightmost position") {
  std::string rightmost = canon(
      "find b : bool\nsuch that b \\/ forAll x : int(1..2) . x >= 1");
  CHECK(rightmost.find("b \\/ forAll x : int(1..2) . x >= 1") !=
        std::string::npos);

  std::string leftmost = canon(
      "find b : bool\nsuch that (forAll x : int(1..2) . x >= 1) \\/ b");
  CHECK(leftmost.find("(forAll x : int(1..2) . x >= 1) \\/ b") !=
        std::string::npos);
}

TEST_CASE("domains print with sugar and attributes") {
  CHECK(canon("find S : set of int(1..5)\nsuch that |S| >= 0")
            .find("find S : set of int(1..5)") != std::string::npos);
  CHECK(canon("find S : set (minSize 1, maxSize 3) of int(1..5)\nsuch that |S| >= 0")
            .find("set (minSize 1, maxSize 3) of int(1..5)") != std::string::npos);
  CHECK(canon("find r : relation (size 2) of (int(1..3) * int(1..3))\n"
              "such that |r| = 2")
            .find("relation (size 2) of (int(1..3) * int(1..3))") !=
        std::string::npos);
  CHECK(canon("given n : int(1..)\nfind x : int(1..n)\n")
            .find("given n : int(1..)") != std::string::npos);
}

TEST_CASE("arity-1 relation domains collapse to set sugar") {
  CHECK(canon("find S : relation of (int(1..4))\nsuch that |S| >= 1")
            .find("find S : set of int(1..4)") != std::string::npos);
}

TEST_CASE("statements print one per line with an indented constraint block") {
  std::string out = canon(
      "given n : int(2..9)\n"
      "where n >= 2\n"
      "letting m be n + 1\n"
      "find x : int(1..m)\n"
      "such that x >= 2, x <= n\n"
      "minimising x\n");
  CHECK(out ==
        "given n : int(2..9)\n"
        "where n >= 2\n"
        "letting m be n+1\n"
        "find x : int(1..m)\n"
        "such that\n"
        "    x >= 2,\n"
        "    x <= n\n"
        "minimising x\n");
}

TEST_CASE("relation literals and tuples print canonically") {
  std::string out = canon(
      "find r : relation of (int(1..3) * int(1..3))\n"
      "such that relation {(3, 1), (1, 2)} subsetEq r, (1, 2) in r\n");
  CHECK(out.find("relation {(1, 2), (3, 1)} subsetEq r") != std::string::npos);
  CHECK(out.find("(1, 2) in r") != std::string::npos);
  std::string sets = canon("find S : set of int(1..5)\nsuch that {2, 1} subsetEq S");
  CHECK(sets.find("{1, 2} subsetEq S") != std::string::npos);
}

TEST_CASE("negative literals print directly") {
  CHECK(canon("find x : int(-5..5)\nsuch that x = -3").find("x = -3") !=
        std::string::npos);
}

// ============================================================
// Idempotence and round-trip
// ============================================================

TEST_CASE("pretty of parse is idempotent on assorted specimens") {
  const char* specimens[] = {
      kExampleSpec,
      "find b : bool such that b",
      "given n : int(1..9)\nletting Item be domain int(1..n)\n"
      "find S : set (maxSize 3) of Item\nsuch that forAll x in S . x >= 1\n"
      "maximising |S|",
      "find r : relation (minSize 1) of (int(1..2) * int(1..2))\n"
      "such that forAll p, q in r . p = q \\/ !(p = q)",
      "find x : int(0..9)\nsuch that (sum i : int(1..3) . i * x) >= x",
  };
  for (const char* s : specimens) {
    CAPTURE(std::string(s));
    std::string once = canon(s);
    CHECK(canon(once) == once);
    CHECK(ast_equal(parse_spec(once), parse_spec(s)));
  }
}

// ============================================================
// Annotated tree
// ============================================================

TEST_CASE("annotated dump of the worked example matches the reference tree") {
  CHECK(annotate(parse_spec(kExampleSpec)) == kExampleTree);
}

TEST_CASE("annotated dump tags references by their target") {
  std::string out = annotate(parse_spec(
      "given n : int(1..9)\nfind x : int(1..n)\n"
      "such that forAll i : int(1..2) . x != i + n"));
  CHECK(out.find("#ReferenceToParameter") != std::string::npos);
  CHECK(out.find("#ReferenceToBinder") != std::string::npos);
  CHECK(out.find("#ReferenceToDecisionVariable") != std::string::npos);
  CHECK(out.find("#Quantifier") != std::string::npos);
  CHECK(out.find("#BinderVariable") != std::string::npos);
}
