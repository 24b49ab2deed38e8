#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "camphor/tools/catalog.hpp"
#include "camphor/tools/function_call.hpp"

namespace camphor {

enum class CallIssueKind { UnknownName, UnknownParam, MissingRequiredParam, EnumValueOutOfDomain };

inline std::string_view to_id(CallIssueKind kind) {
    switch (kind) {
        case CallIssueKind::UnknownName: return "unknown_name";
        case CallIssueKind::UnknownParam: return "unknown_param";
        case CallIssueKind::MissingRequiredParam: return "missing_required_param";
        case CallIssueKind::EnumValueOutOfDomain: return "enum_value_out_of_domain";
    }
    return "";
}

struct CallIssue {
    std::size_t call_index = 0;
    CallIssueKind kind = CallIssueKind::UnknownName;
    std::string detail; // offending function or parameter name
};

struct ValidationReport {
    std::vector<CallIssue> issues;

    bool clean() const { return issues.empty(); }

    bool has(CallIssueKind kind, std::string_view detail = {}) const {
        for (const auto& i : issues) {
            if (i.kind == kind && (detail.empty() || i.detail == detail)) return true;
        }
        return false;
    }
};

// Names the data set uses for catalog tools under a different name. Validation
// reports them as unknown; callers that want a softer treatment check here.
inline const std::map<std::string, std::string, std::less<>>& known_aliases() {
    static const std::map<std::string, std::string, std::less<>> aliases = {
        {"send_message", "send_imessage_message"},
    };
    return aliases;
}

inline ValidationReport validate_calls(const std::vector<FunctionCall>& calls, const ToolCatalog& catalog) {
    ValidationReport report;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        const auto& call = calls[i];
        const ToolDefinition* tool = catalog.find(call.name);
        if (!tool) {
            report.issues.push_back({i, CallIssueKind::UnknownName, call.name});
            continue;
        }
        for (const auto& arg : call.args) {
            const ParamSpec* spec = tool->find_param(arg.name);
            if (!spec) {
                report.issues.push_back({i, CallIssueKind::UnknownParam, arg.name});
                continue;
            }
            if (spec->domain.kind == DomainKind::Enum) {
                std::string text = value_text(arg.value);
                bool ok = false;
                for (const auto& v : spec->domain.values) ok = ok || v == text;
                if (!ok) report.issues.push_back({i, CallIssueKind::EnumValueOutOfDomain, arg.name});
            }
        }
        for (const auto& p : tool->params) {
            if (p.required && !call.has(p.name)) {
                report.issues.push_back({i, CallIssueKind::MissingRequiredParam, p.name});
            }
        }
    }
    return report;
}

} // namespace camphor
