#include "koord/lang/lexer.hpp"

#include <cctype>
#include <unordered_map>

#include <fmt/format.h>

namespace koord::lang {

std::string format_diagnostic(const std::string& file, const Diagnostic& d) {
    return fmt::format("{}:{}:{}: {}: {}", file, d.pos.line, d.pos.col,
                       d.severity == Severity::Error ? "error" : "warning", d.message);
}

std::string_view token_name(TokenKind k) {
    switch (k) {
        case TokenKind::KW_ALLWRITE: return "'allwrite'";
        case TokenKind::KW_ALLREAD: return "'allread'";
        case TokenKind::KW_LOCAL: return "'local'";
        case TokenKind::KW_EVENT: return "'event'";
        case TokenKind::KW_ATOMIC: return "'atomic'";
        case TokenKind::KW_PRE: return "'pre'";
        case TokenKind::KW_EFF: return "'eff'";
        case TokenKind::KW_IF: return "'if'";
        case TokenKind::KW_ELSE: return "'else'";
        case TokenKind::KW_AND: return "'and'";
        case TokenKind::KW_OR: return "'or'";
        case TokenKind::KW_NOT: return "'not'";
        case TokenKind::KW_INT: return "'int'";
        case TokenKind::KW_FLOAT: return "'float'";
        case TokenKind::KW_BOOL: return "'bool'";
        case TokenKind::KW_POS: return "'pos'";
        case TokenKind::KW_LIST: return "'list'";
        case TokenKind::LIT_TRUE: return "'true'";
        case TokenKind::LIT_FALSE: return "'false'";
        case TokenKind::LIT_INT: return "integer literal";
        case TokenKind::LIT_FLOAT: return "float literal";
        case TokenKind::IDENT: return "identifier";
        case TokenKind::LBRACE: return "'{'";
        case TokenKind::RBRACE: return "'}'";
        case TokenKind::LBRACKET: return "'['";
        case TokenKind::RBRACKET: return "']'";
        case TokenKind::LPAREN: return "'('";
        case TokenKind::RPAREN: return "')'";
        case TokenKind::COLON: return "':'";
        case TokenKind::COMMA: return "','";
        case TokenKind::DOT: return "'.'";
        case TokenKind::ASSIGN: return "'='";
        case TokenKind::PLUS: return "'+'";
        case TokenKind::MINUS: return "'-'";
        case TokenKind::STAR: return "'*'";
        case TokenKind::SLASH: return "'/'";
        case TokenKind::PERCENT: return "'%'";
        case TokenKind::EQ: return "'=='";
        case TokenKind::NE: return "'!='";
        case TokenKind::LT: return "'<'";
        case TokenKind::LE: return "'<='";
        case TokenKind::GT: return "'>'";
        case TokenKind::GE: return "'>='";
        case TokenKind::NEWLINE: return "newline";
        case TokenKind::END_OF_FILE: return "end of file";
    }
    return "?";
}

namespace {

const std::unordered_map<std::string_view, TokenKind>& keywords() {
    static const std::unordered_map<std::string_view, TokenKind> table = {
        {"allwrite", TokenKind::KW_ALLWRITE}, {"allread", TokenKind::KW_ALLREAD},
        {"local", TokenKind::KW_LOCAL},       {"event", TokenKind::KW_EVENT},
        {"atomic", TokenKind::KW_ATOMIC},     {"pre", TokenKind::KW_PRE},
        {"eff", TokenKind::KW_EFF},           {"if", TokenKind::KW_IF},
        {"else", TokenKind::KW_ELSE},         {"and", TokenKind::KW_AND},
        {"or", TokenKind::KW_OR},             {"not", TokenKind::KW_NOT},
        {"int", TokenKind::KW_INT},           {"float", TokenKind::KW_FLOAT},
        {"bool", TokenKind::KW_BOOL},         {"pos", TokenKind::KW_POS},
        {"list", TokenKind::KW_LIST},         {"true", TokenKind::LIT_TRUE},
        {"false", TokenKind::LIT_FALSE},
    };
    return table;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (!at_end()) {
            char c = peek();
            SourcePos start = pos_;
            if (c == '\n') {
                advance();
                out.push_back({TokenKind::NEWLINE, "\n", start});
            } else if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#' || (c == '/' && peek(1) == '/')) {
                while (!at_end() && peek() != '\n') advance();
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(number(start));
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string text;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    text += advance();
                }
                auto it = keywords().find(text);
                TokenKind kind = it == keywords().end() ? TokenKind::IDENT : it->second;
                // `list` is only a keyword in `list<...>`, so it stays usable as a name
                if (kind == TokenKind::KW_LIST && next_non_blank() != '<') kind = TokenKind::IDENT;
                out.push_back({kind, text, start});
            } else {
                out.push_back(punct(start));
            }
        }
        out.push_back({TokenKind::END_OF_FILE, "", pos_});
        return out;
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }
    char next_non_blank() const {
        std::size_t j = i_;
        while (j < src_.size() && (src_[j] == ' ' || src_[j] == '\t')) ++j;
        return j < src_.size() ? src_[j] : '\0';
    }
    char advance() {
        char c = src_[i_++];
        if (c == '\n') {
            ++pos_.line;
            pos_.col = 1;
        } else {
            ++pos_.col;
        }
        return c;
    }

    Token number(SourcePos start) {
        std::string text;
        bool is_float = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            is_float = true;
            text += advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t k = 1;
            if (peek(k) == '+' || peek(k) == '-') ++k;
            if (std::isdigit(static_cast<unsigned char>(peek(k)))) {
                is_float = true;
                for (std::size_t j = 0; j < k; ++j) text += advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
            }
        }
        return {is_float ? TokenKind::LIT_FLOAT : TokenKind::LIT_INT, text, start};
    }

    Token punct(SourcePos start) {
        char c = advance();
        auto two = [&](char next, TokenKind yes, TokenKind no) -> Token {
            if (peek() == next) {
                advance();
                return {yes, std::string{c, next}, start};
            }
            return {no, std::string(1, c), start};
        };
        switch (c) {
            case '{': return {TokenKind::LBRACE, "{", start};
            case '}': return {TokenKind::RBRACE, "}", start};
            case '[': return {TokenKind::LBRACKET, "[", start};
            case ']': return {TokenKind::RBRACKET, "]", start};
            case '(': return {TokenKind::LPAREN, "(", start};
            case ')': return {TokenKind::RPAREN, ")", start};
            case ':': return {TokenKind::COLON, ":", start};
            case ',': return {TokenKind::COMMA, ",", start};
            case '.': return {TokenKind::DOT, ".", start};
            case '+': return {TokenKind::PLUS, "+", start};
            case '-': return {TokenKind::MINUS, "-", start};
            case '*': return {TokenKind::STAR, "*", start};
            case '/': return {TokenKind::SLASH, "/", start};
            case '%': return {TokenKind::PERCENT, "%", start};
            case '=': return two('=', TokenKind::EQ, TokenKind::ASSIGN);
            case '<': return two('=', TokenKind::LE, TokenKind::LT);
            case '>': return two('=', TokenKind::GE, TokenKind::GT);
            case '!': return two('=', TokenKind::NE, TokenKind::KW_NOT);
            case '&':
                if (peek() == '&') {
                    advance();
                    return {TokenKind::KW_AND, "&&", start};
                }
                break;
            case '|':
                if (peek() == '|') {
                    advance();
                    return {TokenKind::KW_OR, "||", start};
                }
                break;
            default: break;
        }
        std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                ? fmt::format("\\x{:02x}", static_cast<unsigned char>(c))
                                : std::string(1, c);
        throw CompileError({start, Severity::Error, fmt::format("unexpected character '{}'", shown)});
    }

    std::string_view src_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

} // namespace

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

} // namespace koord::lang
