#ifndef REFORMINE_PARSER_HPP
#define REFORMINE_PARSER_HPP

#include <string>
#include <string_view>

#include "reformine/ast.hpp"

namespace reformine {

// Parse a specification, resolve references, and type-check it.
// Throws Error with 1-based line/column on syntax problems.
Ast parse_spec(std::string_view text);

// Parse without the validation pass (tree surgery tests).
Ast parse_spec_only(std::string_view text);

// Parse a single expression or domain fragment (round-trip tests). The
// result is unresolved; run it through a specification to resolve names.
Ast parse_expr_fragment(std::string_view text);

// ---- Instance files ------------------------------------------
//
// Text form, one binding per line:
//   letting n be 5
//   letting s be {1, 3}
//   letting r be relation {(1, 2), (2, 2)}
// JSON form: an object mapping names to an integer, a flat integer array
// (set), or an array of integer arrays (relation).

Instance parse_instance_text(std::string_view text);
Instance parse_instance_json(std::string_view text);

std::string format_instance_text(const Instance& instance);
std::string format_instance_json(const Instance& instance);

}  // namespace reformine

#endif  // REFORMINE_PARSER_HPP
