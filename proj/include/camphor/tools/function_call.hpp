#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace camphor {

// Argument value. Timestamps stay strings until a tool executes them.
using Value = std::variant<std::string, double>;

inline bool is_number(const Value& v) { return std::holds_alternative<double>(v); }

inline std::string format_number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) return "0";
    return std::string(buf, end);
}

// Plain text form of a value, used for comparison and keyword search.
inline std::string value_text(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return format_number(std::get<double>(v));
}

inline std::string quote_string(std::string_view s, char quote = '\'') {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back(quote);
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c == quote) out.push_back('\\');
                out.push_back(c);
        }
    }
    out.push_back(quote);
    return out;
}

struct Argument {
    std::string name;
    Value value;
};

struct FunctionCall {
    std::string name;
    std::vector<Argument> args; // textual order; names are distinct

    const Value* find(std::string_view param) const {
        for (const auto& a : args) {
            if (a.name == param) return &a.value;
        }
        return nullptr;
    }

    bool has(std::string_view param) const { return find(param) != nullptr; }

    std::vector<std::string> param_names() const {
        std::vector<std::string> out;
        out.reserve(args.size());
        for (const auto& a : args) out.push_back(a.name);
        return out;
    }

    // Equality ignores argument order.
    friend bool operator==(const FunctionCall& a, const FunctionCall& b) {
        if (a.name != b.name || a.args.size() != b.args.size()) return false;
        for (const auto& arg : a.args) {
            const Value* other = b.find(arg.name);
            if (!other || *other != arg.value) return false;
        }
        return true;
    }
};

inline std::string serialize(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return quote_string(*s);
    return format_number(std::get<double>(v));
}

inline std::string serialize(const FunctionCall& call) {
    std::string out = call.name;
    out.push_back('(');
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i) out += ", ";
        out += call.args[i].name;
        out.push_back('=');
        out += serialize(call.args[i].value);
    }
    out.push_back(')');
    return out;
}

// Canonical bracket-semicolon list form: [f(a='x'); g()]
inline std::string serialize(const std::vector<FunctionCall>& calls) {
    std::string out = "[";
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (i) out += "; ";
        out += serialize(calls[i]);
    }
    out.push_back(']');
    return out;
}

inline std::vector<std::string> call_names(const std::vector<FunctionCall>& calls) {
    std::vector<std::string> out;
    out.reserve(calls.size());
    for (const auto& c : calls) out.push_back(c.name);
    return out;
}

} // namespace camphor
