#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "koord/lang/diagnostic.hpp"

namespace koord::lang {

enum class TokenKind {
    // keywords
    KW_ALLWRITE, KW_ALLREAD, KW_LOCAL, KW_EVENT, KW_ATOMIC, KW_PRE, KW_EFF,
    KW_IF, KW_ELSE, KW_AND, KW_OR, KW_NOT,
    KW_INT, KW_FLOAT, KW_BOOL, KW_POS, KW_LIST,
    LIT_TRUE, LIT_FALSE, LIT_INT, LIT_FLOAT,
    IDENT,
    // punctuation
    LBRACE, RBRACE, LBRACKET, RBRACKET, LPAREN, RPAREN,
    COLON, COMMA, DOT, ASSIGN,
    PLUS, MINUS, STAR, SLASH, PERCENT,
    EQ, NE, LT, LE, GT, GE,
    NEWLINE,
    END_OF_FILE,
};

std::string_view token_name(TokenKind k);

struct Token {
    TokenKind kind;
    std::string text;
    SourcePos pos;
};

/// Splits Koord source into tokens. `#` and `//` start comments that run to
/// end of line. Consecutive newlines are kept; the parser skips blanks.
/// Throws CompileError on an unrecognized character.
std::vector<Token> tokenize(std::string_view source);

} // namespace koord::lang
