#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace koord::lang {

struct SourcePos {
    int line = 1;
    int col = 1;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    SourcePos pos;
    Severity severity = Severity::Error;
    std::string message;
};

/// Renders `file:line:col: severity: message`.
std::string format_diagnostic(const std::string& file, const Diagnostic& d);

/// Thrown by the lexer and parser; carries a single positioned diagnostic.
class CompileError : public std::runtime_error {
public:
    explicit CompileError(Diagnostic d) : std::runtime_error(d.message), diag_(std::move(d)) {}
    const Diagnostic& diagnostic() const { return diag_; }

private:
    Diagnostic diag_;
};

} // namespace koord::lang
