#pragma once

#include <string>
#include <vector>

namespace geosketch {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    /// JSON pointer into the sketch, or a node locator for model checks.
    std::string path;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

const char* to_string(Severity severity);

inline bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) {
            return true;
        }
    }
    return false;
}

}  // namespace geosketch
