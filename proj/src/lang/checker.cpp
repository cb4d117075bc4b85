#include "koord/lang/checker.hpp"

#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace koord::lang {

const VarInfo* CheckedProgram::find_shared(std::string_view name) const {
    for (const auto& v : shared_vars) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

namespace {

// Argument classes accepted by builtins.
enum class Param { Num, Int, Pos, PosList, PosListArray, SharedListVar };

struct BuiltinSig {
    std::vector<Param> params;
    std::optional<ValueType> result;  // nullopt: result follows numeric promotion of args
    bool is_void = false;
    bool shared_write = false;
    bool uses_services = false;
};

const std::unordered_map<std::string, BuiltinSig>& builtins() {
    static const std::unordered_map<std::string, BuiltinSig> table = {
        {"pos", {{Param::Num, Param::Num, Param::Num}, ValueType::Pos}},
        {"float", {{Param::Num}, ValueType::Float}},
        {"int", {{Param::Num}, ValueType::Int}},
        {"abs", {{Param::Num}, std::nullopt}},
        {"min", {{Param::Num, Param::Num}, std::nullopt}},
        {"max", {{Param::Num, Param::Num}, std::nullopt}},
        {"dist", {{Param::Pos, Param::Pos}, ValueType::Float}},
        {"size", {{Param::PosList}, ValueType::Int}},
        {"allAssigned", {{Param::PosList}, ValueType::Bool}},
        {"nextUnassigned", {{Param::PosList, Param::Int}, ValueType::Int}},
        {"findPath", {{Param::Pos, Param::PosListArray}, ValueType::PosList, false, false, true}},
        {"pathIsClear", {{Param::PosList, Param::PosListArray}, ValueType::Bool, false, false, true}},
        {"assign", {{Param::SharedListVar, Param::Int, Param::Int}, std::nullopt, true, true, false}},
    };
    return table;
}

bool is_numeric(ValueType t) {
    return t == ValueType::Int || t == ValueType::Float;
}

enum class Context { Initializer, Pre, Effect };

class Checker {
public:
    Checker(Program program, int num_agents) {
        out_.program = std::move(program);
        out_.num_agents = num_agents;
    }

    CheckResult run() {
        if (out_.num_agents <= 0) error({}, "numAgents must be positive");
        declare_vars();
        for (auto& d : out_.program.decls) {
            if (d.init) check_initializer(d);
        }
        std::set<std::string> seen;
        for (auto& ev : out_.program.events) {
            if (!seen.insert(ev.name).second) error(ev.pos, fmt::format("duplicate event '{}'", ev.name));
            check_event(ev);
        }
        out_.program.uses_motion = uses_motion_;
        CheckResult result;
        result.diagnostics = std::move(diags_);
        if (result.diagnostics.empty()) result.program = std::move(out_);
        return result;
    }

private:
    void error(SourcePos pos, std::string msg) {
        diags_.push_back({pos, Severity::Error, std::move(msg)});
    }

    static bool reserved(std::string_view name) {
        return name == "pid" || name == "numAgents" || name == "Motion" || is_builtin(name);
    }

    void declare_vars() {
        int decl_index = 0;
        for (const auto& d : out_.program.decls) {
            if (reserved(d.name)) {
                error(d.pos, fmt::format("'{}' is reserved and cannot be declared", d.name));
            } else if (names_.count(d.name)) {
                error(d.pos, fmt::format("duplicate declaration of '{}'", d.name));
            } else if (d.scope == Scope::Local && d.indexed_by_pid) {
                error(d.pos, fmt::format("local variable '{}' cannot be indexed by pid", d.name));
            } else {
                VarInfo info{d.name, d.scope, d.base_type, d.indexed_by_pid, -1, decl_index};
                if (info.shared()) {
                    info.slot = static_cast<int>(out_.shared_vars.size());
                    out_.shared_vars.push_back(info);
                } else {
                    info.slot = static_cast<int>(out_.local_vars.size());
                    out_.local_vars.push_back(info);
                }
                names_[d.name] = info;
            }
            ++decl_index;
        }
    }

    static bool assignable(ValueType target, ValueType value) {
        return target == value || (target == ValueType::Float && value == ValueType::Int);
    }

    void check_initializer(VarDecl& d) {
        ctx_ = Context::Initializer;
        atomic_ = false;
        if (!check_value(*d.init)) return;
        if (!assignable(d.base_type, d.init->type)) {
            error(d.init->pos, fmt::format("cannot initialize {} '{}' with a {} value", to_string(d.base_type),
                                           d.name, to_string(d.init->type)));
        }
    }

    void check_event(EventDecl& ev) {
        atomic_ = ev.atomic;
        ctx_ = Context::Pre;
        if (check_value(ev.pre) && ev.pre.type != ValueType::Bool) {
            error(ev.pre.pos, fmt::format("precondition of '{}' must be bool, found {}", ev.name,
                                          to_string(ev.pre.type)));
        }
        ctx_ = Context::Effect;
        for (auto& s : ev.eff) check_stmt(s);
    }

    void check_stmt(Stmt& s) {
        switch (s.kind) {
            case StmtKind::If:
                if (check_value(s.value) && s.value.type != ValueType::Bool) {
                    error(s.value.pos, "if condition must be bool");
                }
                for (auto& t : s.then_body) check_stmt(t);
                for (auto& t : s.else_body) check_stmt(t);
                break;
            case StmtKind::Call:
                check_expr(s.value);
                break;
            case StmtKind::Assign:
                check_assign(s);
                break;
        }
    }

    static bool is_own_index(const Expr& idx) {
        return idx.kind == ExprKind::Name && idx.name == "pid";
    }

    void check_shared_write(const VarInfo& var, const Expr* index, SourcePos pos) {
        bool own_cell = index && is_own_index(*index);
        if (var.scope == Scope::AllRead) {
            if (!var.indexed_by_pid) {
                error(pos, fmt::format("allread variable '{}' is read-only", var.name));
            } else if (!own_cell) {
                error(pos, fmt::format("write to another agent's allread cell of '{}'", var.name));
            }
            return;
        }
        if (!own_cell && !atomic_) error(pos, "shared write requires atomic");
    }

    void check_assign(Stmt& s) {
        bool value_ok = check_value(s.value);
        Expr& t = s.target;
        t.symbol = SymbolKind::Unresolved;

        if (t.kind == ExprKind::Member) {
            Expr& base = t.args[0];
            if (base.kind == ExprKind::Name && base.name == "Motion" && t.name == "route") {
                uses_motion_ = true;
                base.symbol = SymbolKind::Motion;
                t.symbol = SymbolKind::Motion;
                t.type = ValueType::PosList;
                if (value_ok && s.value.type != ValueType::PosList && s.value.type != ValueType::Pos) {
                    error(s.value.pos, "Motion.route expects a list<pos> or pos");
                }
                return;
            }
            error(t.pos, fmt::format("cannot assign to member '{}'", t.name));
            return;
        }

        const Expr& name_expr = t.kind == ExprKind::Index ? t.args[0] : t;
        if (name_expr.kind != ExprKind::Name) {
            error(t.pos, "invalid assignment target");
            return;
        }
        auto it = names_.find(name_expr.name);
        if (it == names_.end()) {
            if (reserved(name_expr.name)) {
                error(name_expr.pos, fmt::format("cannot assign to '{}'", name_expr.name));
            } else {
                error(name_expr.pos, fmt::format("undeclared identifier '{}'", name_expr.name));
            }
            return;
        }
        const VarInfo& var = it->second;

        if (t.kind == ExprKind::Index) {
            if (!var.indexed_by_pid) {
                error(t.pos, fmt::format("cannot assign to an element of '{}'", var.name));
                return;
            }
            Expr& idx = t.args[1];
            if (check_value(idx) && idx.type != ValueType::Int) error(idx.pos, "index must be int");
            t.args[0].symbol = SymbolKind::Shared;
            t.args[0].slot = var.slot;
            t.args[0].is_array = true;
            t.args[0].type = var.type;
            check_shared_write(var, &idx, t.pos);
        } else {
            if (var.indexed_by_pid) {
                error(t.pos, fmt::format("cannot assign whole array '{}'; index it", var.name));
                return;
            }
            t.symbol = var.shared() ? SymbolKind::Shared : SymbolKind::Local;
            t.slot = var.slot;
            if (var.shared()) check_shared_write(var, nullptr, t.pos);
        }
        t.type = var.type;
        if (value_ok && !assignable(var.type, s.value.type)) {
            error(s.value.pos, fmt::format("cannot assign {} to {} '{}'", to_string(s.value.type),
                                           to_string(var.type), var.name));
        }
    }

    // Checks an expression used as a value (not void, not a bare array).
    bool check_value(Expr& e) {
        if (!check_expr(e)) return false;
        if (e.is_void) {
            error(e.pos, fmt::format("'{}' does not produce a value", e.name));
            return false;
        }
        if (e.is_array) {
            error(e.pos, fmt::format("array '{}' must be indexed", e.name));
            return false;
        }
        return true;
    }

    bool check_expr(Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: e.type = ValueType::Int; return true;
            case ExprKind::FloatLit: e.type = ValueType::Float; return true;
            case ExprKind::BoolLit: e.type = ValueType::Bool; return true;
            case ExprKind::Name: return check_name(e);
            case ExprKind::Unary: return check_unary(e);
            case ExprKind::Binary: return check_binary(e);
            case ExprKind::Index: return check_index(e);
            case ExprKind::Member: return check_member(e);
            case ExprKind::Call: return check_call(e);
            case ExprKind::ListLit:
                for (auto& el : e.args) {
                    if (!check_value(el)) return false;
                    if (el.type != ValueType::Pos) {
                        error(el.pos, "list elements must be pos");
                        return false;
                    }
                }
                e.type = ValueType::PosList;
                return true;
        }
        return false;
    }

    bool check_name(Expr& e) {
        if (e.name == "pid") {
            e.symbol = SymbolKind::Pid;
            e.type = ValueType::Int;
            return true;
        }
        if (e.name == "numAgents") {
            e.symbol = SymbolKind::NumAgents;
            e.type = ValueType::Int;
            return true;
        }
        if (e.name == "Motion") {
            error(e.pos, "Motion ports are accessed as Motion.psn, Motion.reached or Motion.route");
            return false;
        }
        if (is_builtin(e.name)) {
            error(e.pos, fmt::format("builtin '{}' must be called", e.name));
            return false;
        }
        auto it = names_.find(e.name);
        if (it == names_.end()) {
            error(e.pos, fmt::format("undeclared identifier '{}'", e.name));
            return false;
        }
        if (ctx_ == Context::Initializer) {
            error(e.pos, "initializers may only use literals, pid and numAgents");
            return false;
        }
        const VarInfo& var = it->second;
        e.symbol = var.shared() ? SymbolKind::Shared : SymbolKind::Local;
        e.slot = var.slot;
        e.type = var.type;
        e.is_array = var.indexed_by_pid;
        return true;
    }

    bool check_unary(Expr& e) {
        if (!check_value(e.args[0])) return false;
        ValueType t = e.args[0].type;
        if (e.unary_op == UnaryOp::Not) {
            if (t != ValueType::Bool) {
                error(e.pos, "'not' expects bool");
                return false;
            }
        } else if (!is_numeric(t) && t != ValueType::Pos) {
            error(e.pos, fmt::format("cannot negate {}", to_string(t)));
            return false;
        }
        e.type = t;
        return true;
    }

    bool check_binary(Expr& e) {
        bool ok_l = check_value(e.args[0]);
        bool ok_r = check_value(e.args[1]);
        if (!ok_l || !ok_r) return false;
        ValueType l = e.args[0].type;
        ValueType r = e.args[1].type;
        auto mismatch = [&] {
            error(e.pos, fmt::format("invalid operand types {} and {}", to_string(l), to_string(r)));
            return false;
        };
        switch (e.binary_op) {
            case BinaryOp::And:
            case BinaryOp::Or:
                if (l != ValueType::Bool || r != ValueType::Bool) return mismatch();
                e.type = ValueType::Bool;
                return true;
            case BinaryOp::Eq:
            case BinaryOp::Ne:
                if (!(is_numeric(l) && is_numeric(r)) && l != r) return mismatch();
                e.type = ValueType::Bool;
                return true;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                if (!is_numeric(l) || !is_numeric(r)) return mismatch();
                e.type = ValueType::Bool;
                return true;
            case BinaryOp::Mod:
                if (l != ValueType::Int || r != ValueType::Int) return mismatch();
                e.type = ValueType::Int;
                return true;
            case BinaryOp::Add:
            case BinaryOp::Sub:
                if (is_numeric(l) && is_numeric(r)) {
                    e.type = (l == ValueType::Int && r == ValueType::Int) ? ValueType::Int : ValueType::Float;
                    return true;
                }
                if (l == ValueType::Pos && r == ValueType::Pos) {
                    e.type = ValueType::Pos;
                    return true;
                }
                return mismatch();
            case BinaryOp::Mul:
                if (is_numeric(l) && is_numeric(r)) {
                    e.type = (l == ValueType::Int && r == ValueType::Int) ? ValueType::Int : ValueType::Float;
                    return true;
                }
                if ((l == ValueType::Pos && is_numeric(r)) || (is_numeric(l) && r == ValueType::Pos)) {
                    e.type = ValueType::Pos;
                    return true;
                }
                return mismatch();
            case BinaryOp::Div:
                if (is_numeric(l) && is_numeric(r)) {
                    e.type = (l == ValueType::Int && r == ValueType::Int) ? ValueType::Int : ValueType::Float;
                    return true;
                }
                if (l == ValueType::Pos && is_numeric(r)) {
                    e.type = ValueType::Pos;
                    return true;
                }
                return mismatch();
        }
        return false;
    }

    bool check_index(Expr& e) {
        Expr& base = e.args[0];
        Expr& idx = e.args[1];
        if (!check_expr(base)) return false;
        if (!check_value(idx)) return false;
        if (idx.type != ValueType::Int) {
            error(idx.pos, "index must be int");
            return false;
        }
        if (base.is_array) {
            e.type = base.type;
            return true;
        }
        if (base.is_void) {
            error(base.pos, fmt::format("'{}' does not produce a value", base.name));
            return false;
        }
        if (base.type == ValueType::PosList) {
            e.type = ValueType::Pos;
            return true;
        }
        error(e.pos, fmt::format("cannot index a {} value", to_string(base.type)));
        return false;
    }

    bool check_member(Expr& e) {
        Expr& base = e.args[0];
        if (base.kind == ExprKind::Name && base.name == "Motion") {
            uses_motion_ = true;
            base.symbol = SymbolKind::Motion;
            e.symbol = SymbolKind::Motion;
            if (ctx_ == Context::Initializer) {
                error(e.pos, "initializers may only use literals, pid and numAgents");
                return false;
            }
            if (e.name == "psn") {
                e.type = ValueType::Pos;
                return true;
            }
            if (e.name == "reached") {
                e.type = ValueType::Bool;
                return true;
            }
            if (e.name == "route") {
                error(e.pos, "Motion.route is an actuator port and cannot be read");
                return false;
            }
            error(e.pos, fmt::format("unknown Motion port '{}'", e.name));
            return false;
        }
        if (!check_value(base)) return false;
        if (base.type == ValueType::Pos && (e.name == "x" || e.name == "y" || e.name == "z")) {
            e.type = ValueType::Float;
            return true;
        }
        error(e.pos, fmt::format("{} has no member '{}'", to_string(base.type), e.name));
        return false;
    }

    bool check_call(Expr& e) {
        auto it = builtins().find(e.name);
        if (it == builtins().end()) {
            if (names_.count(e.name)) {
                error(e.pos, fmt::format("'{}' is not a function", e.name));
            } else {
                error(e.pos, fmt::format("undeclared identifier '{}'", e.name));
            }
            return false;
        }
        const BuiltinSig& sig = it->second;
        e.symbol = SymbolKind::Builtin;
        if (e.args.size() != sig.params.size()) {
            error(e.pos, fmt::format("'{}' expects {} argument(s), got {}", e.name, sig.params.size(), e.args.size()));
            return false;
        }
        if (ctx_ == Context::Initializer && (sig.uses_services || sig.shared_write)) {
            error(e.pos, fmt::format("'{}' cannot be used in an initializer", e.name));
            return false;
        }
        bool ok = true;
        for (std::size_t i = 0; i < e.args.size(); ++i) ok = check_arg(e, i, sig.params[i]) && ok;
        if (!ok) return false;

        if (sig.shared_write) {
            const Expr& target = e.args[0];
            const VarInfo& var = names_.at(target.name);
            if (var.scope != Scope::AllWrite) {
                error(target.pos, fmt::format("'{}' needs an allwrite list, '{}' is {}", e.name, var.name,
                                              scope_name(var.scope)));
                return false;
            }
            if (ctx_ != Context::Effect) {
                error(e.pos, fmt::format("'{}' can only be called in an effect", e.name));
                return false;
            }
            if (!atomic_) {
                error(e.pos, "shared write requires atomic");
                return false;
            }
        }
        e.is_void = sig.is_void;
        if (sig.result) {
            e.type = *sig.result;
        } else if (!sig.is_void) {
            bool any_float = false;
            for (const auto& a : e.args) any_float = any_float || a.type == ValueType::Float;
            e.type = any_float ? ValueType::Float : ValueType::Int;
        }
        return true;
    }

    bool check_arg(Expr& call, std::size_t i, Param p) {
        Expr& a = call.args[i];
        auto bad = [&](std::string_view want) {
            error(a.pos, fmt::format("argument {} of '{}' must be {}", i + 1, call.name, want));
            return false;
        };
        switch (p) {
            case Param::PosListArray:
                if (!check_expr(a)) return false;
                if (!a.is_array || a.type != ValueType::PosList) return bad("a pid-indexed list<pos> variable");
                return true;
            case Param::SharedListVar:
                if (a.kind != ExprKind::Name) return bad("a shared list<pos> variable");
                if (!check_value(a)) return false;
                if (a.symbol != SymbolKind::Shared || a.type != ValueType::PosList) {
                    return bad("a shared list<pos> variable");
                }
                return true;
            default: break;
        }
        if (!check_value(a)) return false;
        switch (p) {
            case Param::Num: return is_numeric(a.type) ? true : bad("int or float");
            case Param::Int: return a.type == ValueType::Int ? true : bad("int");
            case Param::Pos: return a.type == ValueType::Pos ? true : bad("pos");
            case Param::PosList: return a.type == ValueType::PosList ? true : bad("list<pos>");
            default: return true;
        }
    }

    CheckedProgram out_;
    std::unordered_map<std::string, VarInfo> names_;
    std::vector<Diagnostic> diags_;
    Context ctx_ = Context::Effect;
    bool atomic_ = false;
    bool uses_motion_ = false;
};

} // namespace

bool is_builtin(std::string_view name) {
    return builtins().count(std::string(name)) > 0;
}

CheckResult check(Program program, int num_agents) {
    return Checker(std::move(program), num_agents).run();
}

} // namespace koord::lang
