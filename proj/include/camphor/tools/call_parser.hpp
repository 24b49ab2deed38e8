#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "camphor/error.hpp"
#include "camphor/tools/function_call.hpp"

namespace camphor {

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string expected)
        : Error("parse error at byte " + std::to_string(offset) + ": expected " + expected),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

namespace detail {

/*
 * Recursive-descent parser for the call-list grammar used by model completions:
 *
 *   input   := list | calls
 *   list    := '[' (item (sep item)* sep?)? ']'
 *   calls   := call (';' call)*
 *   item    := call | string        (a string item must hold exactly one call)
 *   sep     := ';' | ','
 *   call    := ident '(' (arg (',' arg)*)? ')'
 *   arg     := ident '=' value
 *   value   := string | number | ident
 *
 * Strings take single or double quotes with backslash escapes.
 */
class CallParser {
public:
    explicit CallParser(std::string_view text, std::size_t base = 0) : text_(text), base_(base) {}

    std::vector<FunctionCall> parse_input() {
        skip_ws();
        std::vector<FunctionCall> calls;
        if (peek() == '[') {
            calls = parse_list();
        } else if (at_ident_start()) {
            calls.push_back(parse_call());
            skip_ws();
            while (peek() == ';') {
                ++pos_;
                skip_ws();
                if (at_end()) break;
                calls.push_back(parse_call());
                skip_ws();
            }
        } else {
            fail("'[' or function name");
        }
        skip_ws();
        if (!at_end()) fail("end of input");
        return calls;
    }

    FunctionCall parse_single_call() {
        skip_ws();
        FunctionCall call = parse_call();
        skip_ws();
        if (!at_end()) fail("end of quoted call");
        return call;
    }

private:
    std::vector<FunctionCall> parse_list() {
        std::vector<FunctionCall> calls;
        ++pos_; // '['
        skip_ws();
        if (peek() == ']') {
            ++pos_;
            return calls;
        }
        while (true) {
            skip_ws();
            if (peek() == '\'' || peek() == '"') {
                std::size_t start = pos_;
                std::string inner = parse_string();
                CallParser nested(inner, base_ + start + 1);
                calls.push_back(nested.parse_single_call());
            } else if (at_ident_start()) {
                calls.push_back(parse_call());
            } else {
                fail("function call or quoted call");
            }
            skip_ws();
            char c = peek();
            if (c == ';' || c == ',') {
                ++pos_;
                skip_ws();
                if (peek() == ']') {
                    ++pos_;
                    return calls;
                }
                continue;
            }
            if (c == ']') {
                ++pos_;
                return calls;
            }
            fail("';', ',' or ']'");
        }
    }

    FunctionCall parse_call() {
        FunctionCall call;
        call.name = parse_ident("function name");
        skip_ws();
        expect('(');
        skip_ws();
        if (peek() == ')') {
            ++pos_;
            return call;
        }
        while (true) {
            skip_ws();
            std::size_t name_at = pos_;
            Argument arg;
            arg.name = parse_ident("parameter name");
            if (call.has(arg.name)) {
                pos_ = name_at;
                fail("distinct parameter name (duplicate '" + arg.name + "')");
            }
            skip_ws();
            expect('=');
            skip_ws();
            arg.value = parse_value();
            call.args.push_back(std::move(arg));
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect(')');
            return call;
        }
    }

    Value parse_value() {
        char c = peek();
        if (c == '\'' || c == '"') return parse_string();
        if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
            return parse_number();
        }
        if (at_ident_start()) return parse_ident("value");
        fail("string, number or identifier value");
    }

    double parse_number() {
        std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
            digits = true;
        }
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                ++pos_;
                digits = true;
            }
        }
        if (!digits) {
            pos_ = start;
            fail("number");
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t mark = pos_;
            ++pos_;
            if (peek() == '-' || peek() == '+') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = mark;
                fail("exponent digits");
            }
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        std::string_view token = text_.substr(start, pos_ - start);
        if (!token.empty() && token.front() == '+') token.remove_prefix(1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            pos_ = start;
            fail("finite number");
        }
        return value;
    }

    std::string parse_string() {
        char quote = text_[pos_++];
        std::string out;
        while (true) {
            if (at_end()) fail(std::string("closing ") + quote);
            char c = text_[pos_++];
            if (c == quote) return out;
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (at_end()) fail("escape character");
            char e = text_[pos_++];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                default: out.push_back(e); break;
            }
        }
    }

    std::string parse_ident(const char* what) {
        if (!at_ident_start()) fail(what);
        std::size_t start = pos_;
        while (!at_end()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                ++pos_;
            } else {
                break;
            }
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    bool at_ident_start() const {
        char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("'") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    bool at_end() const { return pos_ >= text_.size(); }

    [[noreturn]] void fail(const std::string& expected) const { throw ParseError(base_ + pos_, expected); }

    std::string_view text_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

} // namespace detail

// Throws ParseError. Function names are not resolved here.
inline std::vector<FunctionCall> parse_call_list(std::string_view text) {
    return detail::CallParser(text).parse_input();
}

struct CallListParse {
    std::vector<FunctionCall> calls;
    std::optional<ParseError> error;

    bool ok() const { return !error.has_value(); }
};

// Non-throwing variant: every input yields either calls or a ParseError.
inline CallListParse try_parse_call_list(std::string_view text) noexcept {
    CallListParse out;
    try {
        out.calls = parse_call_list(text);
    } catch (const ParseError& e) {
        out.error = e;
    } catch (...) {
        out.error = ParseError(0, "parsable call list");
    }
    return out;
}

inline FunctionCall parse_call(std::string_view text) {
    return detail::CallParser(text).parse_single_call();
}

} // namespace camphor
