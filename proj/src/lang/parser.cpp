#include "koord/lang/parser.hpp"

#include <charconv>
#include <set>

#include <fmt/format.h>

namespace koord::lang {

namespace {

class Parser {
public:
    explicit Parser(std::span<const Token> tokens) : toks_(tokens) {
        if (toks_.empty() || toks_.back().kind != TokenKind::END_OF_FILE) {
            throw CompileError({{}, Severity::Error, "token stream must end with end of file"});
        }
    }

    Program program() {
        Program prog;
        skip_newlines();
        while (!check(TokenKind::END_OF_FILE)) {
            if (check(TokenKind::KW_ALLWRITE) || check(TokenKind::KW_ALLREAD) || check(TokenKind::KW_LOCAL)) {
                scope_block(prog);
            } else if (check(TokenKind::KW_ATOMIC) || check(TokenKind::KW_EVENT)) {
                prog.events.push_back(event_decl());
            } else {
                fail();
            }
            skip_newlines();
        }
        return prog;
    }

private:
    // Token access. `check` records what would have been accepted so syntax
    // errors can list the expected set.
    const Token& cur() const { return toks_[i_]; }
    const Token& peek_tok(std::size_t k) const {
        return toks_[std::min(i_ + k, toks_.size() - 1)];
    }

    bool check(TokenKind k) {
        if (cur().kind == k) return true;
        expected_.insert(k);
        return false;
    }

    bool accept(TokenKind k) {
        if (!check(k)) return false;
        advance();
        return true;
    }

    const Token& expect(TokenKind k) {
        if (!check(k)) fail();
        return advance();
    }

    const Token& advance() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        expected_.clear();
        return t;
    }

    [[noreturn]] void fail() {
        std::string list;
        for (TokenKind k : expected_) {
            if (!list.empty()) list += ", ";
            list += token_name(k);
        }
        std::string found = cur().kind == TokenKind::IDENT || cur().kind == TokenKind::LIT_INT ||
                                    cur().kind == TokenKind::LIT_FLOAT
                                ? fmt::format("{} '{}'", token_name(cur().kind), cur().text)
                                : std::string(token_name(cur().kind));
        throw CompileError({cur().pos, Severity::Error,
                            fmt::format("syntax error: expected {}; found {}", list.empty() ? "?" : list, found)});
    }

    void skip_newlines() {
        while (accept(TokenKind::NEWLINE)) {
        }
    }

    void scope_block(Program& prog) {
        const Token& kw = advance();
        Scope scope = kw.kind == TokenKind::KW_ALLWRITE ? Scope::AllWrite
                      : kw.kind == TokenKind::KW_ALLREAD ? Scope::AllRead
                                                         : Scope::Local;
        expect(TokenKind::LBRACE);
        skip_newlines();
        while (!check(TokenKind::RBRACE)) {
            prog.decls.push_back(var_decl(scope));
            if (!check(TokenKind::RBRACE)) {
                expect(TokenKind::NEWLINE);
                skip_newlines();
            }
        }
        advance();
    }

    ValueType type_name() {
        if (accept(TokenKind::KW_INT)) return ValueType::Int;
        if (accept(TokenKind::KW_FLOAT)) return ValueType::Float;
        if (accept(TokenKind::KW_BOOL)) return ValueType::Bool;
        if (accept(TokenKind::KW_POS)) return ValueType::Pos;
        if (accept(TokenKind::KW_LIST)) {
            expect(TokenKind::LT);
            expect(TokenKind::KW_POS);
            expect(TokenKind::GT);
            return ValueType::PosList;
        }
        fail();
    }

    VarDecl var_decl(Scope scope) {
        VarDecl d;
        d.scope = scope;
        d.pos = cur().pos;
        d.base_type = type_name();
        d.name = expect(TokenKind::IDENT).text;
        if (accept(TokenKind::LBRACKET)) {
            expect(TokenKind::RBRACKET);
            d.indexed_by_pid = true;
        }
        if (accept(TokenKind::ASSIGN)) d.init = expr();
        return d;
    }

    EventDecl event_decl() {
        EventDecl ev;
        ev.pos = cur().pos;
        ev.atomic = accept(TokenKind::KW_ATOMIC);
        expect(TokenKind::KW_EVENT);
        ev.name = expect(TokenKind::IDENT).text;
        expect(TokenKind::LBRACE);
        skip_newlines();
        expect(TokenKind::KW_PRE);
        expect(TokenKind::COLON);
        ev.pre = expr();
        expect(TokenKind::NEWLINE);
        skip_newlines();
        expect(TokenKind::KW_EFF);
        expect(TokenKind::COLON);
        ev.eff = block();
        skip_newlines();
        expect(TokenKind::RBRACE);
        return ev;
    }

    std::vector<Stmt> block() {
        expect(TokenKind::LBRACE);
        skip_newlines();
        std::vector<Stmt> body;
        body.push_back(stmt());  // blocks are never empty
        while (true) {
            if (accept(TokenKind::RBRACE)) break;
            expect(TokenKind::NEWLINE);
            skip_newlines();
            if (accept(TokenKind::RBRACE)) break;
            body.push_back(stmt());
        }
        return body;
    }

    Stmt stmt() {
        Stmt s;
        s.pos = cur().pos;
        if (accept(TokenKind::KW_IF)) {
            s.kind = StmtKind::If;
            s.value = expr();
            s.then_body = block();
            if (accept(TokenKind::KW_ELSE)) {
                if (check(TokenKind::KW_IF)) {
                    s.else_body.push_back(stmt());
                } else {
                    s.else_body = block();
                }
            }
            return s;
        }
        Expr lhs = postfix();
        if (accept(TokenKind::ASSIGN)) {
            if (lhs.kind != ExprKind::Name && lhs.kind != ExprKind::Index && lhs.kind != ExprKind::Member) {
                throw CompileError({lhs.pos, Severity::Error, "syntax error: invalid assignment target"});
            }
            s.kind = StmtKind::Assign;
            s.target = std::move(lhs);
            s.value = expr();
            return s;
        }
        if (lhs.kind != ExprKind::Call) {
            expected_.insert(TokenKind::ASSIGN);
            fail();
        }
        s.kind = StmtKind::Call;
        s.value = std::move(lhs);
        return s;
    }

    // ---- expressions ----

    static Expr make_binary(BinaryOp op, SourcePos pos, Expr lhs, Expr rhs) {
        Expr e;
        e.kind = ExprKind::Binary;
        e.binary_op = op;
        e.pos = pos;
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }

    static Expr make_unary(UnaryOp op, SourcePos pos, Expr operand) {
        Expr e;
        e.kind = ExprKind::Unary;
        e.unary_op = op;
        e.pos = pos;
        e.args.push_back(std::move(operand));
        return e;
    }

    Expr expr() { return or_expr(); }

    Expr or_expr() {
        Expr lhs = and_expr();
        while (check(TokenKind::KW_OR)) {
            SourcePos p = advance().pos;
            lhs = make_binary(BinaryOp::Or, p, std::move(lhs), and_expr());
        }
        return lhs;
    }

    Expr and_expr() {
        Expr lhs = not_expr();
        while (check(TokenKind::KW_AND)) {
            SourcePos p = advance().pos;
            lhs = make_binary(BinaryOp::And, p, std::move(lhs), not_expr());
        }
        return lhs;
    }

    Expr not_expr() {
        if (check(TokenKind::KW_NOT)) {
            SourcePos p = advance().pos;
            return make_unary(UnaryOp::Not, p, not_expr());
        }
        return cmp_expr();
    }

    Expr cmp_expr() {
        Expr lhs = add_expr();
        static constexpr std::pair<TokenKind, BinaryOp> ops[] = {
            {TokenKind::EQ, BinaryOp::Eq}, {TokenKind::NE, BinaryOp::Ne}, {TokenKind::LT, BinaryOp::Lt},
            {TokenKind::LE, BinaryOp::Le}, {TokenKind::GT, BinaryOp::Gt}, {TokenKind::GE, BinaryOp::Ge},
        };
        for (auto [tk, op] : ops) {
            if (check(tk)) {
                SourcePos p = advance().pos;
                return make_binary(op, p, std::move(lhs), add_expr());
            }
        }
        return lhs;
    }

    Expr add_expr() {
        Expr lhs = mul_expr();
        while (true) {
            BinaryOp op;
            if (check(TokenKind::PLUS)) {
                op = BinaryOp::Add;
            } else if (check(TokenKind::MINUS)) {
                op = BinaryOp::Sub;
            } else {
                return lhs;
            }
            SourcePos p = advance().pos;
            lhs = make_binary(op, p, std::move(lhs), mul_expr());
        }
    }

    Expr mul_expr() {
        Expr lhs = unary_expr();
        while (true) {
            BinaryOp op;
            if (check(TokenKind::STAR)) {
                op = BinaryOp::Mul;
            } else if (check(TokenKind::SLASH)) {
                op = BinaryOp::Div;
            } else if (check(TokenKind::PERCENT)) {
                op = BinaryOp::Mod;
            } else {
                return lhs;
            }
            SourcePos p = advance().pos;
            lhs = make_binary(op, p, std::move(lhs), unary_expr());
        }
    }

    Expr unary_expr() {
        if (check(TokenKind::MINUS)) {
            SourcePos p = advance().pos;
            return make_unary(UnaryOp::Neg, p, unary_expr());
        }
        return postfix();
    }

    Expr postfix() {
        Expr e = primary();
        while (true) {
            if (check(TokenKind::LBRACKET)) {
                SourcePos p = advance().pos;
                Expr idx;
                idx.kind = ExprKind::Index;
                idx.pos = p;
                idx.args.push_back(std::move(e));
                idx.args.push_back(expr());
                expect(TokenKind::RBRACKET);
                e = std::move(idx);
            } else if (check(TokenKind::DOT)) {
                SourcePos p = advance().pos;
                Expr m;
                m.kind = ExprKind::Member;
                m.pos = p;
                m.name = expect(TokenKind::IDENT).text;
                m.args.push_back(std::move(e));
                e = std::move(m);
            } else {
                return e;
            }
        }
    }

    std::vector<Expr> call_args() {
        expect(TokenKind::LPAREN);
        std::vector<Expr> args;
        if (accept(TokenKind::RPAREN)) return args;
        args.push_back(expr());
        while (accept(TokenKind::COMMA)) args.push_back(expr());
        expect(TokenKind::RPAREN);
        return args;
    }

    Expr primary() {
        Expr e;
        e.pos = cur().pos;
        if (check(TokenKind::LIT_INT)) {
            const Token& t = advance();
            e.kind = ExprKind::IntLit;
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), e.int_value);
            if (ec != std::errc{}) {
                throw CompileError({t.pos, Severity::Error, fmt::format("integer literal '{}' out of range", t.text)});
            }
            return e;
        }
        if (check(TokenKind::LIT_FLOAT)) {
            e.kind = ExprKind::FloatLit;
            e.float_value = std::stod(advance().text);
            return e;
        }
        if (check(TokenKind::LIT_TRUE) || check(TokenKind::LIT_FALSE)) {
            e.kind = ExprKind::BoolLit;
            e.bool_value = advance().kind == TokenKind::LIT_TRUE;
            return e;
        }
        // Type keywords double as constructor/conversion calls: pos(x, y, z), float(i), int(f).
        if ((check(TokenKind::KW_POS) || check(TokenKind::KW_FLOAT) || check(TokenKind::KW_INT)) &&
            peek_tok(1).kind == TokenKind::LPAREN) {
            e.kind = ExprKind::Call;
            e.name = advance().text;
            e.args = call_args();
            return e;
        }
        if (check(TokenKind::IDENT)) {
            e.name = advance().text;
            if (check(TokenKind::LPAREN)) {
                e.kind = ExprKind::Call;
                e.args = call_args();
            } else {
                e.kind = ExprKind::Name;
            }
            return e;
        }
        if (accept(TokenKind::LPAREN)) {
            Expr inner = expr();
            expect(TokenKind::RPAREN);
            return inner;
        }
        if (accept(TokenKind::LBRACKET)) {
            e.kind = ExprKind::ListLit;
            if (accept(TokenKind::RBRACKET)) return e;
            e.args.push_back(expr());
            while (accept(TokenKind::COMMA)) e.args.push_back(expr());
            expect(TokenKind::RBRACKET);
            return e;
        }
        fail();
    }

    std::span<const Token> toks_;
    std::size_t i_ = 0;
    std::set<TokenKind> expected_;
};

} // namespace

Program parse(std::span<const Token> tokens) {
    return Parser(tokens).program();
}

Program parse_source(std::string_view source) {
    auto tokens = tokenize(source);
    return parse(tokens);
}

} // namespace koord::lang
