#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "camphor/data/dataset.hpp"
#include "camphor/data/flatten.hpp"
#include "camphor/device/state.hpp"
#include "camphor/tools/validation.hpp"

namespace camphor {

enum class Severity { Warning, Error };

struct DatasetIssue {
    Severity severity = Severity::Error;
    std::size_t line = 0; // 0 when not tied to a line
    std::string query_id;
    std::string message;
};

// Sizes of the released data set.
struct ReleasedCounts {
    std::size_t queries = 3410;
    std::size_t train = 2728;
    std::size_t test = 682;
    std::size_t pairs = 35444;
    double mean_pairs = 10.39;
    double mean_tolerance = 0.01;
};

struct DatasetReport {
    std::vector<DatasetIssue> issues;
    std::size_t query_count = 0;
    std::map<std::string, std::size_t> split_counts;
    std::size_t step_count = 0;
    std::size_t pair_count = 0;

    double mean_pairs() const { return query_count ? static_cast<double>(pair_count) / static_cast<double>(query_count) : 0.0; }

    std::size_t errors() const {
        std::size_t n = 0;
        for (const auto& i : issues) n += i.severity == Severity::Error;
        return n;
    }
    std::size_t warnings() const { return issues.size() - errors(); }
    bool ok() const { return errors() == 0; }

    bool mentions(std::string_view needle) const {
        for (const auto& i : issues) {
            if (i.message.find(needle) != std::string::npos) return true;
        }
        return false;
    }
};

struct ValidateOptions {
    const ToolCatalog* catalog = nullptr;
    const std::map<std::string, DeviceState>* device_states = nullptr;
    bool check_recorded_history = true;
    std::optional<ReleasedCounts> expect_released;
};

// Ordering and termination rules a trajectory must satisfy.
inline std::vector<std::string> check_trajectory(const Trajectory& t) {
    std::vector<std::string> p;
    if (t.query_id.empty()) p.push_back("missing query_id");
    if (t.query.empty()) p.push_back("empty query");
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const Step& s = t.steps[i];
        std::string at = "step " + std::to_string(i + 1) + ": ";
        if (s.agent == AgentKind::HighOrderReasoning) p.push_back(at + "the orchestrator is not an expert");
        if (s.results.size() != s.calls.size()) {
            p.push_back(at + std::to_string(s.calls.size()) + " calls but " + std::to_string(s.results.size()) + " results");
        }
        if (s.agent == AgentKind::UserPerception && !(s.calls.size() == 1 && s.calls[0].name == "get_intent" && s.calls[0].args.empty())) {
            p.push_back(at + "UserPerception step must be exactly get_intent()");
        }
        if (s.agent == AgentKind::TaskCompletion && i + 1 != t.steps.size()) p.push_back(at + "TaskCompletion before the last step");
    }
    if (t.status == EpisodeStatus::Completed) {
        if (t.steps.empty() || t.steps.back().agent != AgentKind::TaskCompletion) {
            p.push_back("completed trajectory does not end with TaskCompletion");
        } else if (t.steps.back().calls != t.final_plan) {
            p.push_back("final_plan differs from the TaskCompletion calls");
        }
    }
    if (t.recorded_history) {
        for (const auto& h : check_history(*t.recorded_history)) p.push_back("history: " + h);
    }
    return p;
}

inline DatasetReport validate_dataset(const LoadedDataset& data, const ValidateOptions& options) {
    DatasetReport r;
    auto add = [&r](Severity sev, std::size_t line, const std::string& qid, std::string msg) {
        r.issues.push_back({sev, line, qid, std::move(msg)});
    };
    for (const auto& e : data.errors) add(Severity::Error, e.line, "", "schema: " + e.message);

    std::map<std::string, std::string> split_of;
    for (std::size_t n = 0; n < data.trajectories.size(); ++n) {
        const Trajectory& t = data.trajectories[n];
        std::size_t line = n < data.lines.size() ? data.lines[n] : 0;
        ++r.query_count;
        ++r.split_counts[t.split];
        r.step_count += t.steps.size();
        r.pair_count += pair_count(t);

        for (auto& msg : check_trajectory(t)) add(Severity::Error, line, t.query_id, std::move(msg));

        if (auto [it, fresh] = split_of.emplace(t.query_id, t.split); !fresh) {
            if (it->second != t.split) {
                add(Severity::Error, line, t.query_id, "query in both '" + it->second + "' and '" + t.split + "' splits");
            } else {
                add(Severity::Error, line, t.query_id, "duplicate query id");
            }
        }

        if (options.check_recorded_history && t.recorded_history && t.status == EpisodeStatus::Completed) {
            if (history_of(t).render() != t.recorded_history->render()) {
                add(Severity::Warning, line, t.query_id, "recorded history differs from the history rebuilt from steps");
            }
        }

        if (options.device_states && !options.device_states->count(t.device_state)) {
            add(Severity::Error, line, t.query_id, "unknown device state '" + t.device_state + "'");
        }

        if (options.catalog) {
            auto check_calls = [&](const std::vector<FunctionCall>& calls, const std::string& where) {
                auto report = validate_calls(calls, *options.catalog);
                for (const auto& issue : report.issues) {
                    const auto& call = calls[issue.call_index];
                    if (issue.kind == CallIssueKind::UnknownName) {
                        auto alias = known_aliases().find(call.name);
                        if (alias != known_aliases().end()) {
                            add(Severity::Warning, line, t.query_id, where + ": '" + call.name + "' is not in the catalog (known alias of " + alias->second + ")");
                            continue;
                        }
                    }
                    add(Severity::Error, line, t.query_id, where + ": " + std::string(to_id(issue.kind)) + " '" + issue.detail + "' in " + serialize(call));
                }
            };
            for (std::size_t i = 0; i < t.steps.size(); ++i) {
                if (t.steps[i].agent == AgentKind::TaskCompletion) continue; // checked as final_plan
                check_calls(t.steps[i].calls, "step " + std::to_string(i + 1));
            }
            check_calls(t.final_plan, "final_plan");
        }
    }

    if (options.expect_released) {
        const auto& want = *options.expect_released;
        auto expect = [&](std::size_t got, std::size_t expected, const std::string& what) {
            if (got != expected) add(Severity::Error, 0, "", what + ": expected " + std::to_string(expected) + ", found " + std::to_string(got));
        };
        expect(r.query_count, want.queries, "query count");
        expect(r.split_counts.count("train") ? r.split_counts.at("train") : 0, want.train, "train split");
        expect(r.split_counts.count("test") ? r.split_counts.at("test") : 0, want.test, "test split");
        expect(r.pair_count, want.pairs, "flattened pairs");
        if (std::fabs(r.mean_pairs() - want.mean_pairs) > want.mean_tolerance) {
            add(Severity::Error, 0, "", "mean pairs per query: expected " + std::to_string(want.mean_pairs) + ", found " + std::to_string(r.mean_pairs()));
        }
    }
    return r;
}

inline nlohmann::ordered_json dataset_report_to_json(const DatasetReport& r) {
    nlohmann::ordered_json issues = nlohmann::ordered_json::array();
    for (const auto& i : r.issues) {
        nlohmann::ordered_json j = {{"severity", i.severity == Severity::Error ? "error" : "warning"}};
        if (i.line) j["line"] = i.line;
        if (!i.query_id.empty()) j["query_id"] = i.query_id;
        j["message"] = i.message;
        issues.push_back(std::move(j));
    }
    return {{"queries", r.query_count},    {"splits", r.split_counts}, {"steps", r.step_count}, {"pairs", r.pair_count},
            {"errors", r.errors()},        {"warnings", r.warnings()}, {"issues", issues}};
}

} // namespace camphor
