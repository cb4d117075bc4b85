#pragma once

#include <span>
#include <string_view>

#include "koord/lang/ast.hpp"
#include "koord/lang/lexer.hpp"

namespace koord::lang {

/// Builds a Program from a token stream produced by tokenize(). Throws
/// CompileError with the offending position and the set of tokens that
/// would have been accepted there.
Program parse(std::span<const Token> tokens);

/// tokenize + parse.
Program parse_source(std::string_view source);

} // namespace koord::lang
