#include "geosketch/json_format.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "geosketch/diagnostic.hpp"

namespace geosketch {

const char* to_string(Severity severity) {
    return severity == Severity::Error ? "ERROR" : "WARNING";
}

std::string format_number(double value) {
    if (value == 0.0) {
        return "0";  // also folds -0
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

namespace {

void write_indent(std::string& out, int depth) {
    out.push_back('\n');
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void write_value(std::string& out, const nlohmann::json& value, int depth) {
    using Type = nlohmann::json::value_t;
    switch (value.type()) {
        case Type::object: {
            if (value.empty()) {
                out += "{}";
                return;
            }
            // nlohmann::json objects are std::map backed, but sort explicitly
            // so ordered_json inputs stay deterministic as well.
            std::map<std::string, const nlohmann::json*> sorted;
            for (auto it = value.begin(); it != value.end(); ++it) {
                sorted.emplace(it.key(), &it.value());
            }
            out.push_back('{');
            bool first = true;
            for (const auto& [key, child] : sorted) {
                if (!first) {
                    out.push_back(',');
                }
                first = false;
                write_indent(out, depth + 1);
                out += nlohmann::json(key).dump();
                out += ": ";
                write_value(out, *child, depth + 1);
            }
            write_indent(out, depth);
            out.push_back('}');
            return;
        }
        case Type::array: {
            if (value.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line; coordinate pairs read better.
            bool scalars = true;
            for (const auto& child : value) {
                if (child.is_structured()) {
                    scalars = false;
                    break;
                }
            }
            out.push_back('[');
            bool first = true;
            for (const auto& child : value) {
                if (!first) {
                    out += scalars ? ", " : ",";
                }
                first = false;
                if (!scalars) {
                    write_indent(out, depth + 1);
                }
                write_value(out, child, depth + 1);
            }
            if (!scalars) {
                write_indent(out, depth);
            }
            out.push_back(']');
            return;
        }
        case Type::number_float:
            out += format_number(value.get<double>());
            return;
        default:
            out += value.dump();
            return;
    }
}

}  // namespace

std::string dump_deterministic(const nlohmann::json& value) {
    std::string out;
    write_value(out, value, 0);
    out.push_back('\n');
    return out;
}

}  // namespace geosketch
