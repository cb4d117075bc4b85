#pragma once

#include <optional>
#include <string>
#include <vector>

#include "koord/lang/ast.hpp"

namespace koord::lang {

struct VarInfo {
    std::string name;
    Scope scope = Scope::Local;
    ValueType type = ValueType::Int;
    bool indexed_by_pid = false;
    int slot = -1;  // shared-variable id (wire var_id) or local slot
    int decl_index = -1;

    bool shared() const { return scope != Scope::Local; }
};

/// A program whose names are resolved and whose expressions carry types.
struct CheckedProgram {
    Program program;
    int num_agents = 1;
    std::vector<VarInfo> shared_vars;  // indexed by var_id
    std::vector<VarInfo> local_vars;   // indexed by local slot

    const VarInfo* find_shared(std::string_view name) const;
};

struct CheckResult {
    std::optional<CheckedProgram> program;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return program.has_value(); }
};

CheckResult check(Program program, int num_agents);

/// Names that user declarations may not shadow.
bool is_builtin(std::string_view name);

} // namespace koord::lang
