#include "koord/lang/lower.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace koord::lang {

namespace {

double as_float(const Value& v) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

std::int64_t wrapping(std::uint64_t v) {
    return static_cast<std::int64_t>(v);
}

Value coerce(Value v, ValueType target) {
    if (target == ValueType::Float) {
        if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    }
    if (target == ValueType::PosList) {
        if (auto* p = std::get_if<Vec3>(&v)) return PosList{{*p, -1}};
    }
    return v;
}

class Lowerer {
public:
    explicit Lowerer(const CheckedProgram& cp) : cp_(cp) {}

    EventTable run() {
        EventTable t;
        t.shared_vars = cp_.shared_vars;
        t.local_vars = cp_.local_vars;
        t.uses_motion = cp_.program.uses_motion;
        t.shared_init.resize(t.shared_vars.size());
        t.local_init.resize(t.local_vars.size());
        for (const auto& v : t.shared_vars) {
            const auto& d = cp_.program.decls[static_cast<std::size_t>(v.decl_index)];
            if (d.init) t.shared_init[static_cast<std::size_t>(v.slot)] = with_type(expr(*d.init), v.type);
        }
        for (const auto& v : t.local_vars) {
            const auto& d = cp_.program.decls[static_cast<std::size_t>(v.decl_index)];
            if (d.init) t.local_init[static_cast<std::size_t>(v.slot)] = with_type(expr(*d.init), v.type);
        }
        int index = 0;
        for (const auto& ev : cp_.program.events) {
            LoweredEvent le;
            le.name = ev.name;
            le.atomic = ev.atomic;
            le.index = index++;
            le.pre = expr(ev.pre);
            le.eff = body(ev.eff);
            t.events.push_back(std::move(le));
        }
        return t;
    }

private:
    static ExprFn with_type(ExprFn f, ValueType t) {
        return [f = std::move(f), t](Frame& fr) { return coerce(f(fr), t); };
    }

    StmtFn body(const std::vector<Stmt>& stmts) {
        std::vector<StmtFn> fns;
        for (const auto& s : stmts) fns.push_back(stmt(s));
        if (fns.size() == 1) return std::move(fns.front());
        return [fns = std::move(fns)](Frame& f) {
            for (const auto& fn : fns) fn(f);
        };
    }

    StmtFn stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::If: {
                ExprFn cond = expr(s.value);
                StmtFn then_fn = body(s.then_body);
                StmtFn else_fn = s.else_body.empty() ? StmtFn{} : body(s.else_body);
                return [cond, then_fn, else_fn](Frame& f) {
                    if (std::get<bool>(cond(f))) {
                        then_fn(f);
                    } else if (else_fn) {
                        else_fn(f);
                    }
                };
            }
            case StmtKind::Call: {
                ExprFn call = expr(s.value);
                return [call](Frame& f) { call(f); };
            }
            case StmtKind::Assign: return assign(s);
        }
        return [](Frame&) {};
    }

    StmtFn assign(const Stmt& s) {
        const Expr& t = s.target;
        ExprFn value = with_type(expr(s.value), t.type);
        if (t.kind == ExprKind::Member) {
            return [value](Frame& f) { f.store->actuate_route(std::get<PosList>(value(f))); };
        }
        if (t.kind == ExprKind::Index) {
            int var = t.args[0].slot;
            ExprFn idx = expr(t.args[1]);
            return [var, idx, value](Frame& f) {
                int cell = wrap_index(std::get<std::int64_t>(idx(f)), f.num_agents);
                f.store->write_shared(var, cell, value(f));
            };
        }
        int slot = t.slot;
        if (t.symbol == SymbolKind::Shared) {
            return [slot, value](Frame& f) { f.store->write_shared(slot, 0, value(f)); };
        }
        return [slot, value](Frame& f) { f.store->local(slot) = value(f); };
    }

    ExprFn expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: {
                Value v = e.int_value;
                return [v](Frame&) { return v; };
            }
            case ExprKind::FloatLit: {
                Value v = e.float_value;
                return [v](Frame&) { return v; };
            }
            case ExprKind::BoolLit: {
                Value v = e.bool_value;
                return [v](Frame&) { return v; };
            }
            case ExprKind::Name: return name(e);
            case ExprKind::Unary: return unary(e);
            case ExprKind::Binary: return binary(e);
            case ExprKind::Index: return index(e);
            case ExprKind::Member: return member(e);
            case ExprKind::Call: return call(e);
            case ExprKind::ListLit: {
                std::vector<ExprFn> elems;
                for (const auto& a : e.args) elems.push_back(expr(a));
                return [elems](Frame& f) {
                    PosList out;
                    out.reserve(elems.size());
                    for (const auto& el : elems) out.push_back({std::get<Vec3>(el(f)), -1});
                    return Value{std::move(out)};
                };
            }
        }
        throw std::logic_error("unhandled expression kind");
    }

    ExprFn name(const Expr& e) {
        int slot = e.slot;
        switch (e.symbol) {
            case SymbolKind::Pid: return [](Frame& f) { return Value{std::int64_t{f.pid}}; };
            case SymbolKind::NumAgents: return [](Frame& f) { return Value{std::int64_t{f.num_agents}}; };
            case SymbolKind::Local: return [slot](Frame& f) { return f.store->local(slot); };
            case SymbolKind::Shared:
                if (e.is_array) {
                    throw std::logic_error("bare array reference outside a builtin argument");
                }
                return [slot](Frame& f) { return f.store->read_shared(slot, 0); };
            default: break;
        }
        throw std::logic_error("unresolved name " + e.name);
    }

    // Gathers every cell of a pid-indexed list<pos> variable.
    static std::function<std::vector<PosList>(Frame&)> array_of(const Expr& e) {
        int slot = e.slot;
        return [slot](Frame& f) {
            std::vector<PosList> cells;
            cells.reserve(static_cast<std::size_t>(f.num_agents));
            for (int i = 0; i < f.num_agents; ++i) cells.push_back(std::get<PosList>(f.store->read_shared(slot, i)));
            return cells;
        };
    }

    ExprFn unary(const Expr& e) {
        ExprFn a = expr(e.args[0]);
        if (e.unary_op == UnaryOp::Not) return [a](Frame& f) { return Value{!std::get<bool>(a(f))}; };
        switch (e.type) {
            case ValueType::Int:
                return [a](Frame& f) { return Value{wrapping(0u - static_cast<std::uint64_t>(std::get<std::int64_t>(a(f))))}; };
            case ValueType::Float: return [a](Frame& f) { return Value{-std::get<double>(a(f))}; };
            default: return [a](Frame& f) { return Value{std::get<Vec3>(a(f)) * -1.0}; };
        }
    }

    ExprFn binary(const Expr& e) {
        ExprFn l = expr(e.args[0]);
        ExprFn r = expr(e.args[1]);
        ValueType lt = e.args[0].type;
        ValueType rt = e.args[1].type;
        BinaryOp op = e.binary_op;

        if (op == BinaryOp::And) {
            return [l, r](Frame& f) { return Value{std::get<bool>(l(f)) && std::get<bool>(r(f))}; };
        }
        if (op == BinaryOp::Or) {
            return [l, r](Frame& f) { return Value{std::get<bool>(l(f)) || std::get<bool>(r(f))}; };
        }
        bool numeric = (lt == ValueType::Int || lt == ValueType::Float) && (rt == ValueType::Int || rt == ValueType::Float);
        bool both_int = lt == ValueType::Int && rt == ValueType::Int;

        switch (op) {
            case BinaryOp::Eq:
            case BinaryOp::Ne: {
                bool negate = op == BinaryOp::Ne;
                if (numeric && !both_int) {
                    return [l, r, negate](Frame& f) { return Value{(as_float(l(f)) == as_float(r(f))) != negate}; };
                }
                return [l, r, negate](Frame& f) { return Value{(l(f) == r(f)) != negate}; };
            }
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                if (both_int) {
                    return [l, r, op](Frame& f) {
                        auto a = std::get<std::int64_t>(l(f));
                        auto b = std::get<std::int64_t>(r(f));
                        return Value{op == BinaryOp::Lt ? a < b : op == BinaryOp::Le ? a <= b : op == BinaryOp::Gt ? a > b : a >= b};
                    };
                }
                return [l, r, op](Frame& f) {
                    double a = as_float(l(f));
                    double b = as_float(r(f));
                    return Value{op == BinaryOp::Lt ? a < b : op == BinaryOp::Le ? a <= b : op == BinaryOp::Gt ? a > b : a >= b};
                };
            case BinaryOp::Mod:
                return [l, r](Frame& f) {
                    auto a = std::get<std::int64_t>(l(f));
                    auto b = std::get<std::int64_t>(r(f));
                    if (b == 0) throw AgentFault("modulo by zero");
                    if (b == -1) return Value{std::int64_t{0}};
                    return Value{a % b};
                };
            default: break;
        }

        if (both_int) {
            return [l, r, op](Frame& f) {
                auto a = static_cast<std::uint64_t>(std::get<std::int64_t>(l(f)));
                auto b = static_cast<std::uint64_t>(std::get<std::int64_t>(r(f)));
                switch (op) {
                    case BinaryOp::Add: return Value{wrapping(a + b)};
                    case BinaryOp::Sub: return Value{wrapping(a - b)};
                    case BinaryOp::Mul: return Value{wrapping(a * b)};
                    default: {
                        auto sa = static_cast<std::int64_t>(a);
                        auto sb = static_cast<std::int64_t>(b);
                        if (sb == 0) throw AgentFault("division by zero");
                        if (sb == -1) return Value{wrapping(0u - a)};
                        return Value{sa / sb};
                    }
                }
            };
        }
        if (numeric) {
            return [l, r, op](Frame& f) {
                double a = as_float(l(f));
                double b = as_float(r(f));
                switch (op) {
                    case BinaryOp::Add: return Value{a + b};
                    case BinaryOp::Sub: return Value{a - b};
                    case BinaryOp::Mul: return Value{a * b};
                    default:
                        if (b == 0.0) throw AgentFault("division by zero");
                        return Value{a / b};
                }
            };
        }
        // pos arithmetic
        if (lt == ValueType::Pos && rt == ValueType::Pos) {
            return [l, r, op](Frame& f) {
                Vec3 a = std::get<Vec3>(l(f));
                Vec3 b = std::get<Vec3>(r(f));
                return Value{op == BinaryOp::Add ? a + b : a - b};
            };
        }
        if (lt == ValueType::Pos) {
            return [l, r, op](Frame& f) {
                Vec3 a = std::get<Vec3>(l(f));
                double k = as_float(r(f));
                if (op == BinaryOp::Div) {
                    if (k == 0.0) throw AgentFault("division by zero");
                    return Value{a / k};
                }
                return Value{a * k};
            };
        }
        return [l, r](Frame& f) { return Value{as_float(l(f)) * std::get<Vec3>(r(f))}; };
    }

    ExprFn index(const Expr& e) {
        ExprFn idx = expr(e.args[1]);
        const Expr& base = e.args[0];
        if (base.is_array) {
            int slot = base.slot;
            return [slot, idx](Frame& f) {
                int cell = wrap_index(std::get<std::int64_t>(idx(f)), f.num_agents);
                return f.store->read_shared(slot, cell);
            };
        }
        ExprFn list = expr(base);
        return [list, idx](Frame& f) {
            auto i = std::get<std::int64_t>(idx(f));
            Value lv = list(f);
            const auto& l = std::get<PosList>(lv);
            if (i < 0 || i >= static_cast<std::int64_t>(l.size())) {
                throw AgentFault(fmt::format("list index {} out of range (size {})", i, l.size()));
            }
            return Value{l[static_cast<std::size_t>(i)].p};
        };
    }

    ExprFn member(const Expr& e) {
        if (e.symbol == SymbolKind::Motion) {
            if (e.name == "psn") return [](Frame& f) { return Value{f.store->motion_psn()}; };
            return [](Frame& f) { return Value{f.store->motion_reached()}; };
        }
        ExprFn base = expr(e.args[0]);
        char axis = e.name[0];
        return [base, axis](Frame& f) {
            Vec3 p = std::get<Vec3>(base(f));
            return Value{axis == 'x' ? p.x : axis == 'y' ? p.y : p.z};
        };
    }

    ExprFn call(const Expr& e) {
        const std::string& n = e.name;
        std::vector<ExprFn> a;
        auto value_args = [&](std::size_t count) {
            for (std::size_t i = 0; i < count; ++i) a.push_back(expr(e.args[i]));
        };
        if (n == "pos") {
            value_args(3);
            return [a](Frame& f) { return Value{Vec3{as_float(a[0](f)), as_float(a[1](f)), as_float(a[2](f))}}; };
        }
        if (n == "float") {
            value_args(1);
            return [a](Frame& f) { return Value{as_float(a[0](f))}; };
        }
        if (n == "int") {
            value_args(1);
            return [a](Frame& f) {
                double d = as_float(a[0](f));
                if (!std::isfinite(d) || std::fabs(d) >= 9.2e18) throw AgentFault("int() argument out of range");
                return Value{static_cast<std::int64_t>(d)};
            };
        }
        if (n == "abs" || n == "min" || n == "max") {
            value_args(e.args.size());
            bool is_int = e.type == ValueType::Int;
            if (n == "abs") {
                if (is_int) {
                    return [a](Frame& f) {
                        auto v = std::get<std::int64_t>(a[0](f));
                        return Value{v < 0 ? wrapping(0u - static_cast<std::uint64_t>(v)) : v};
                    };
                }
                return [a](Frame& f) { return Value{std::fabs(as_float(a[0](f)))}; };
            }
            bool is_min = n == "min";
            if (is_int) {
                return [a, is_min](Frame& f) {
                    auto x = std::get<std::int64_t>(a[0](f));
                    auto y = std::get<std::int64_t>(a[1](f));
                    return Value{is_min ? std::min(x, y) : std::max(x, y)};
                };
            }
            return [a, is_min](Frame& f) {
                double x = as_float(a[0](f));
                double y = as_float(a[1](f));
                return Value{is_min ? std::min(x, y) : std::max(x, y)};
            };
        }
        if (n == "dist") {
            value_args(2);
            return [a](Frame& f) { return Value{distance(std::get<Vec3>(a[0](f)), std::get<Vec3>(a[1](f)))}; };
        }
        if (n == "size") {
            value_args(1);
            return [a](Frame& f) {
                return Value{static_cast<std::int64_t>(std::get<PosList>(a[0](f)).size())};
            };
        }
        if (n == "allAssigned") {
            value_args(1);
            return [a](Frame& f) {
                Value v = a[0](f);
                for (const auto& entry : std::get<PosList>(v)) {
                    if (entry.claim < 0) return Value{false};
                }
                return Value{true};
            };
        }
        if (n == "nextUnassigned") {
            value_args(2);
            return [a](Frame& f) {
                Value v = a[0](f);
                const auto& list = std::get<PosList>(v);
                auto after = std::get<std::int64_t>(a[1](f));
                auto size = static_cast<std::int64_t>(list.size());
                for (std::int64_t k = 1; k <= size; ++k) {
                    std::int64_t j = ((after + k) % size + size) % size;
                    if (list[static_cast<std::size_t>(j)].claim < 0) return Value{j};
                }
                return Value{std::int64_t{-1}};
            };
        }
        if (n == "findPath") {
            ExprFn goal = expr(e.args[0]);
            auto routes = array_of(e.args[1]);
            return [goal, routes](Frame& f) {
                return Value{f.store->find_path(std::get<Vec3>(goal(f)), routes(f))};
            };
        }
        if (n == "pathIsClear") {
            ExprFn path = expr(e.args[0]);
            auto routes = array_of(e.args[1]);
            return [path, routes](Frame& f) {
                return Value{f.store->path_is_clear(std::get<PosList>(path(f)), routes(f))};
            };
        }
        if (n == "assign") {
            int var = e.args[0].slot;
            ExprFn idx = expr(e.args[1]);
            ExprFn who = expr(e.args[2]);
            return [var, idx, who](Frame& f) {
                auto i = std::get<std::int64_t>(idx(f));
                auto claimant = std::get<std::int64_t>(who(f));
                Value v = f.store->read_shared(var, 0);
                auto& list = std::get<PosList>(v);
                if (i < 0 || i >= static_cast<std::int64_t>(list.size())) {
                    throw AgentFault(fmt::format("assign: index {} out of range (size {})", i, list.size()));
                }
                auto& entry = list[static_cast<std::size_t>(i)];
                if (entry.claim >= 0 && entry.claim != claimant) {
                    throw AgentFault(fmt::format("assign: entry {} already claimed by {}", i, entry.claim));
                }
                entry.claim = static_cast<int>(claimant);
                f.store->write_shared(var, 0, std::move(v));
                f.store->on_claim(var, static_cast<int>(i), static_cast<int>(claimant));
                return Value{false};
            };
        }
        throw std::logic_error("unknown builtin " + n);
    }

    const CheckedProgram& cp_;
};

// Store used while evaluating initializers; they cannot touch state.
class InitStore final : public StoreAccess {
public:
    Value read_shared(int, int) override { throw AgentFault("initializer read shared state"); }
    void write_shared(int, int, Value) override { throw AgentFault("initializer wrote shared state"); }
    Value& local(int) override { throw AgentFault("initializer read local state"); }
    Vec3 motion_psn() override { throw AgentFault("initializer read Motion"); }
    bool motion_reached() override { throw AgentFault("initializer read Motion"); }
    void actuate_route(PosList) override { throw AgentFault("initializer actuated Motion"); }
    PosList find_path(const Vec3&, const std::vector<PosList>&) override {
        throw AgentFault("initializer called findPath");
    }
    bool path_is_clear(const PosList&, const std::vector<PosList>&) override {
        throw AgentFault("initializer called pathIsClear");
    }
};

} // namespace

std::vector<std::vector<Value>> EventTable::initial_shared(int num_agents) const {
    InitStore store;
    std::vector<std::vector<Value>> out;
    for (const auto& v : shared_vars) {
        int cells = v.indexed_by_pid ? num_agents : 1;
        const auto& init = shared_init[static_cast<std::size_t>(v.slot)];
        std::vector<Value> column;
        for (int c = 0; c < cells; ++c) {
            if (init) {
                Frame f{c, num_agents, &store};
                column.push_back(init(f));
            } else {
                column.push_back(default_value(v.type));
            }
        }
        out.push_back(std::move(column));
    }
    return out;
}

std::vector<Value> EventTable::initial_locals(int pid, int num_agents) const {
    InitStore store;
    std::vector<Value> out;
    for (const auto& v : local_vars) {
        const auto& init = local_init[static_cast<std::size_t>(v.slot)];
        if (init) {
            Frame f{pid, num_agents, &store};
            out.push_back(init(f));
        } else {
            out.push_back(default_value(v.type));
        }
    }
    return out;
}

const VarInfo* EventTable::find_shared(std::string_view name) const {
    for (const auto& v : shared_vars) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

const VarInfo* EventTable::find_local(std::string_view name) const {
    for (const auto& v : local_vars) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

EventTable lower(const CheckedProgram& checked) {
    return Lowerer(checked).run();
}

} // namespace koord::lang
