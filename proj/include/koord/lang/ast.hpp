#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "koord/lang/diagnostic.hpp"
#include "koord/value.hpp"

namespace koord::lang {

enum class Scope { AllWrite, AllRead, Local };

std::string_view scope_name(Scope s);

enum class ExprKind { IntLit, FloatLit, BoolLit, Name, Unary, Binary, Index, Member, Call, ListLit };
enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

// What a Name (or Call callee) resolved to during checking.
enum class SymbolKind { Unresolved, Shared, Local, Pid, NumAgents, Motion, Builtin };

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    SourcePos pos;

    std::int64_t int_value = 0;
    double float_value = 0.0;
    bool bool_value = false;
    std::string name;  // identifier, member field, or callee
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    std::vector<Expr> args;  // operands, index base/index, call arguments, list elements

    // Filled in by the checker.
    ValueType type = ValueType::Int;
    bool is_array = false;  // bare reference to a pid-indexed variable
    bool is_void = false;   // builtin call with no result
    SymbolKind symbol = SymbolKind::Unresolved;
    int slot = -1;          // shared-variable id or local slot
};

enum class StmtKind { Assign, If, Call };

struct Stmt {
    StmtKind kind = StmtKind::Assign;
    SourcePos pos;
    Expr target;  // Assign
    Expr value;   // Assign rhs, If condition, Call expression
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
};

struct VarDecl {
    std::string name;
    Scope scope = Scope::Local;
    ValueType base_type = ValueType::Int;
    bool indexed_by_pid = false;
    std::optional<Expr> init;
    SourcePos pos;
};

struct EventDecl {
    std::string name;
    bool atomic = false;
    Expr pre;
    std::vector<Stmt> eff;
    SourcePos pos;
};

struct Program {
    std::vector<VarDecl> decls;
    std::vector<EventDecl> events;
    bool uses_motion = false;
};

/// Equality that ignores source positions and checker annotations.
bool structurally_equal(const Program& a, const Program& b);
bool structurally_equal(const Expr& a, const Expr& b);

/// Canonical source text; parsing it yields a structurally equal program.
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);

} // namespace koord::lang
