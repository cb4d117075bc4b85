#include "koord/lang/ast.hpp"

#include <fmt/format.h>

namespace koord::lang {

std::string_view scope_name(Scope s) {
    switch (s) {
        case Scope::AllWrite: return "allwrite";
        case Scope::AllRead: return "allread";
        case Scope::Local: return "local";
    }
    return "?";
}

// ---- structural equality ----

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case ExprKind::IntLit:
            if (a.int_value != b.int_value) return false;
            break;
        case ExprKind::FloatLit:
            if (a.float_value != b.float_value) return false;
            break;
        case ExprKind::BoolLit:
            if (a.bool_value != b.bool_value) return false;
            break;
        case ExprKind::Name:
        case ExprKind::Member:
        case ExprKind::Call:
            if (a.name != b.name) return false;
            break;
        case ExprKind::Unary:
            if (a.unary_op != b.unary_op) return false;
            break;
        case ExprKind::Binary:
            if (a.binary_op != b.binary_op) return false;
            break;
        case ExprKind::Index:
        case ExprKind::ListLit:
            break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!structurally_equal(a.args[i], b.args[i])) return false;
    }
    return true;
}

namespace {

bool equal_body(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

bool equal_stmt(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StmtKind::Assign:
            return structurally_equal(a.target, b.target) && structurally_equal(a.value, b.value);
        case StmtKind::Call:
            return structurally_equal(a.value, b.value);
        case StmtKind::If:
            return structurally_equal(a.value, b.value) && equal_body(a.then_body, b.then_body) &&
                   equal_body(a.else_body, b.else_body);
    }
    return false;
}

bool equal_body(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!equal_stmt(a[i], b[i])) return false;
    }
    return true;
}

} // namespace

bool structurally_equal(const Program& a, const Program& b) {
    if (a.decls.size() != b.decls.size() || a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.decls.size(); ++i) {
        const auto& x = a.decls[i];
        const auto& y = b.decls[i];
        if (x.name != y.name || x.scope != y.scope || x.base_type != y.base_type ||
            x.indexed_by_pid != y.indexed_by_pid || x.init.has_value() != y.init.has_value()) {
            return false;
        }
        if (x.init && !structurally_equal(*x.init, *y.init)) return false;
    }
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto& x = a.events[i];
        const auto& y = b.events[i];
        if (x.name != y.name || x.atomic != y.atomic || !structurally_equal(x.pre, y.pre) ||
            !equal_body(x.eff, y.eff)) {
            return false;
        }
    }
    return true;
}

// ---- pretty printing ----

namespace {

constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecNot = 3;
constexpr int kPrecCmp = 4;
constexpr int kPrecAdd = 5;
constexpr int kPrecMul = 6;
constexpr int kPrecNeg = 7;
constexpr int kPrecPostfix = 8;
constexpr int kPrecAtom = 9;

int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return kPrecOr;
        case BinaryOp::And: return kPrecAnd;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return kPrecCmp;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kPrecAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return kPrecMul;
    }
    return kPrecAtom;
}

std::string_view binary_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
    }
    return "?";
}

int prec(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Binary: return binary_prec(e.binary_op);
        case ExprKind::Unary: return e.unary_op == UnaryOp::Not ? kPrecNot : kPrecNeg;
        case ExprKind::Index:
        case ExprKind::Member: return kPrecPostfix;
        default: return kPrecAtom;
    }
}

std::string print(const Expr& e);

std::string wrap(const Expr& e, bool parens) {
    return parens ? "(" + print(e) + ")" : print(e);
}

std::string float_text(double v) {
    std::string s = fmt::format("{}", v);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string join_args(const std::vector<Expr>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print(args[i]);
    }
    return out;
}

std::string print(const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit: return std::to_string(e.int_value);
        case ExprKind::FloatLit: return float_text(e.float_value);
        case ExprKind::BoolLit: return e.bool_value ? "true" : "false";
        case ExprKind::Name: return e.name;
        case ExprKind::Unary:
            if (e.unary_op == UnaryOp::Not) return "not " + wrap(e.args[0], prec(e.args[0]) < kPrecNot);
            return "-" + wrap(e.args[0], prec(e.args[0]) < kPrecNeg);
        case ExprKind::Binary: {
            int p = binary_prec(e.binary_op);
            bool left_parens = p == kPrecCmp ? prec(e.args[0]) <= p : prec(e.args[0]) < p;
            return fmt::format("{} {} {}", wrap(e.args[0], left_parens), binary_text(e.binary_op),
                               wrap(e.args[1], prec(e.args[1]) <= p));
        }
        case ExprKind::Index:
            return wrap(e.args[0], prec(e.args[0]) < kPrecPostfix) + "[" + print(e.args[1]) + "]";
        case ExprKind::Member:
            return wrap(e.args[0], prec(e.args[0]) < kPrecPostfix) + "." + e.name;
        case ExprKind::Call: return e.name + "(" + join_args(e.args) + ")";
        case ExprKind::ListLit: return "[" + join_args(e.args) + "]";
    }
    return "?";
}

void print_body(std::string& out, const std::vector<Stmt>& body, int indent);

void print_stmt(std::string& out, const Stmt& s, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    switch (s.kind) {
        case StmtKind::Assign:
            out += pad + print(s.target) + " = " + print(s.value) + "\n";
            break;
        case StmtKind::Call:
            out += pad + print(s.value) + "\n";
            break;
        case StmtKind::If: {
            out += pad + "if " + print(s.value) + " {\n";
            print_body(out, s.then_body, indent + 1);
            out += pad + "}";
            if (!s.else_body.empty()) {
                out += " else {\n";
                print_body(out, s.else_body, indent + 1);
                out += pad + "}";
            }
            out += "\n";
            break;
        }
    }
}

void print_body(std::string& out, const std::vector<Stmt>& body, int indent) {
    for (const auto& s : body) print_stmt(out, s, indent);
}

std::string type_text(ValueType t) {
    return to_string(t);
}

} // namespace

std::string pretty_print(const Expr& expr) {
    return print(expr);
}

std::string pretty_print(const Program& program) {
    std::string out;
    std::size_t i = 0;
    while (i < program.decls.size()) {
        Scope scope = program.decls[i].scope;
        out += fmt::format("{} {{\n", scope_name(scope));
        for (; i < program.decls.size() && program.decls[i].scope == scope; ++i) {
            const auto& d = program.decls[i];
            out += "    " + type_text(d.base_type) + " " + d.name + (d.indexed_by_pid ? "[]" : "");
            if (d.init) out += " = " + print(*d.init);
            out += "\n";
        }
        out += "}\n\n";
    }
    for (const auto& ev : program.events) {
        out += fmt::format("{}event {} {{\n", ev.atomic ? "atomic " : "", ev.name);
        out += "    pre: " + print(ev.pre) + "\n";
        out += "    eff: {\n";
        print_body(out, ev.eff, 2);
        out += "    }\n}\n\n";
    }
    return out;
}

} // namespace koord::lang
