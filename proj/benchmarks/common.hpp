#ifndef REFORMINE_BENCHMARKS_COMMON_HPP
#define REFORMINE_BENCHMARKS_COMMON_HPP

// Model texts shared by the microbenchmarks: one tiny arithmetic spec and
// two parameterised classes exercising relations and quantifier nests.

namespace reformine::bench {

inline constexpr const char* kTinySpec =
    "find x : int(0..100)\n"
    "such that\n"
    "    1*(2+3)*4 = x\n";

inline constexpr const char* kSelectionClass =
    "given n, cap, need : int(1..)\n"
    "letting Item be domain int(1..n)\n"
    "find S : set of Item\n"
    "such that\n"
    "    |S| >= 1,\n"
    "    forAll x in S . x <= cap,\n"
    "    (sum x in S . x) >= need\n";

inline constexpr const char* kRotationClass =
    "given n : int(2..8)\n"
    "where n % 2 = 0\n"
    "letting Slot be domain int(1..n)\n"
    "given forbidden : relation of (Slot * Slot)\n"
    "find duty : relation of (Slot * Slot)\n"
    "such that\n"
    "    forAll a : Slot . forAll b : Slot . ((a, b) in duty) -> (a < b),\n"
    "    forAll a : Slot . forAll b : Slot . ((a, b) in duty) -> !((a, b) in forbidden),\n"
    "    |duty| = n / 2,\n"
    "    forAll a : Slot . (sum b : Slot . toInt((a, b) in duty) + toInt((b, a) in duty)) <= 1\n";

}  // namespace reformine::bench

#endif  // REFORMINE_BENCHMARKS_COMMON_HPP
