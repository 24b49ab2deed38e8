#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "camphor/data/dataset.hpp"
#include "camphor/data/fixtures.hpp"
#include "camphor/data/flatten.hpp"
#include "camphor/data/validate.hpp"
#include "camphor/eval/report.hpp"
#include "camphor/harness/config.hpp"
#include "camphor/harness/manifest.hpp"
#include "camphor/prompt/compression.hpp"
#include "camphor/retrieval/recall.hpp"
#include "camphor/runtime/episode.hpp"
#include "camphor/sidecar.hpp"

namespace camphor {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitPartial = 2, kExitValidation = 3 };

// Bad input data, as opposed to a bad configuration.
class InvalidInput : public Error {
public:
    using Error::Error;
};

struct CommandIO {
    std::ostream& out;
    std::ostream& err;
};

// ---------------------------------------------------------------------------
// Shared loading
// ---------------------------------------------------------------------------

inline ToolCatalog load_run_catalog(const RunConfig& c) {
    if (c.catalog.empty()) return default_catalog();
    require_path(c.catalog, "catalog");
    return load_catalog_file(c.catalog.string());
}

inline std::vector<Trajectory> load_checked_dataset(const fs::path& path, const char* what) {
    require_path(path, what);
    auto loaded = read_dataset_file(path);
    if (!loaded.errors.empty()) {
        const auto& e = loaded.errors.front();
        throw InvalidInput(path.string() + ":" + std::to_string(e.line) + ": " + e.message);
    }
    return std::move(loaded.trajectories);
}

// Similarity provider and retriever named by the config, with the sidecar clients they use.
struct Providers {
    std::unique_ptr<SidecarClient> similarity_client;
    std::unique_ptr<SidecarClient> retriever_client;
    std::unique_ptr<SimilarityProvider> similarity;
    std::unique_ptr<Retriever> retriever;
};

inline Providers make_providers(const RunConfig& c) {
    Providers p;
    HttpOptions http;
    http.auth_token = auth_token_from_env();
    if (c.similarity.kind == "sidecar") {
        p.similarity_client = std::make_unique<SidecarClient>(c.similarity.endpoint, http);
        p.similarity = std::make_unique<SidecarSimilarity>(*p.similarity_client);
    } else {
        p.similarity = std::make_unique<TrigramSimilarity>();
    }
    if (c.retriever.kind == "dense") {
        p.retriever_client = std::make_unique<SidecarClient>(c.retriever.endpoint, http);
        p.retriever = std::make_unique<DenseRetriever>(*p.retriever_client);
    } else {
        p.retriever = std::make_unique<LexicalRetriever>();
    }
    return p;
}

inline void write_json_file(const fs::path& path, const nlohmann::ordered_json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

// Writes the manifest of a command next to its outputs.
inline void finish_manifest(RunManifest& m, const fs::path& dir, const std::vector<fs::path>& outputs) {
    for (const auto& o : outputs) m.outputs.push_back(file_entry(o, dir));
    write_json_file(dir / (m.command + "_manifest.json"), manifest_to_json(m));
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

// Runs every query, `jobs` at a time. Output order is by query id whatever the scheduling.
inline std::vector<Trajectory> run_dataset(AgentBackend& backend, const std::map<std::string, DeviceState>& states, const ToolCatalog& catalog,
                                           const std::vector<EpisodeInput>& inputs, const EpisodeConfig& config, std::size_t jobs = 1) {
    std::vector<Trajectory> out(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
            const EpisodeInput& in = inputs[i];
            try {
                out[i] = run_episode(backend, states.at(in.device_state), catalog, in, config);
            } catch (const std::exception& e) {
                Trajectory t;
                t.query_id = in.query_id;
                t.split = in.split;
                t.query = in.query;
                t.device_state = in.device_state;
                t.status = EpisodeStatus::Aborted;
                t.diagnostic = e.what();
                out[i] = std::move(t);
            }
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, inputs.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::stable_sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) { return a.query_id < b.query_id; });
    return out;
}

inline EpisodeConfig episode_config(const RunConfig& c, const Retriever* retriever) {
    EpisodeConfig e;
    e.max_steps = c.max_steps;
    e.baseline_mode = c.baseline_mode;
    e.prompt.mode = c.prompt_mode;
    e.prompt.retrieved_k = c.k;
    e.prompt.include_instruction = c.include_instruction;
    e.prompt.retriever = retriever;
    return e;
}

inline int cmd_run(const RunConfig& c, CommandIO io) {
    check_config(c);
    require_path(c.device_states, "device_states");
    RunManifest m{"run", config_hash(c), c.seed, {}, {}, {}};
    StageTimer timer(m);
    ToolCatalog catalog = load_run_catalog(c);
    auto states = load_device_states(c.device_states, catalog);
    auto gold = load_checked_dataset(c.dataset, "dataset");
    for (const auto& t : gold) {
        if (!states.count(t.device_state)) throw ConfigError("query " + t.query_id + " uses unknown device state '" + t.device_state + "'");
    }
    m.inputs.push_back(file_entry(c.dataset));
    timer.lap("load");

    Providers providers = make_providers(c);
    std::unique_ptr<AgentBackend> backend;
    if (c.backend.kind == "oracle") {
        backend = std::make_unique<ScriptedOracle>(gold);
    } else {
        HttpOptions http{c.backend.timeout_seconds, c.backend.retries, auth_token_from_env()};
        backend = std::make_unique<HttpBackend>(SidecarClient(c.backend.endpoint, http), c.backend.generate);
    }
    std::vector<EpisodeInput> inputs;
    for (const auto& t : gold) inputs.push_back({t.query_id, t.split, t.query, t.device_state});
    auto predicted = run_dataset(*backend, states, catalog, inputs, episode_config(c, providers.retriever.get()), c.jobs);
    timer.lap("episodes");

    fs::path out_file = c.output_dir / "predictions.jsonl";
    save_dataset(out_file, predicted);
    timer.lap("write");
    finish_manifest(m, c.output_dir, {out_file});

    std::size_t completed = 0, truncated = 0, aborted = 0;
    for (const auto& t : predicted) {
        if (t.status == EpisodeStatus::Completed) ++completed;
        if (t.status == EpisodeStatus::Truncated) ++truncated;
        if (t.status == EpisodeStatus::Aborted) {
            ++aborted;
            io.err << t.query_id << ": aborted: " << t.diagnostic << "\n";
        }
    }
    io.out << predicted.size() << " queries: " << completed << " completed, " << truncated << " truncated, " << aborted << " aborted\n";
    io.out << "wrote " << out_file.string() << "\n";
    return completed == predicted.size() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

inline fs::path predictions_path(const RunConfig& c) { return c.predictions.empty() ? c.output_dir / "predictions.jsonl" : c.predictions; }

inline EvalReport eval_files(const RunConfig& c, const SimilarityProvider& provider, const ToolCatalog& catalog) {
    auto gold = load_checked_dataset(c.dataset, "gold data set");
    auto pred = load_checked_dataset(predictions_path(c), "predictions");
    MatchContext ctx{&catalog, &provider, c.threshold};
    return evaluate(gold, pred, ctx, c.averaging);
}

inline int cmd_eval(const RunConfig& c, CommandIO io) {
    check_config(c);
    RunManifest m{"eval", config_hash(c), c.seed, {}, {}, {}};
    StageTimer timer(m);
    ToolCatalog catalog = load_run_catalog(c);
    Providers providers = make_providers(c);
    EvalReport report = eval_files(c, *providers.similarity, catalog);
    m.inputs.push_back(file_entry(c.dataset));
    m.inputs.push_back(file_entry(predictions_path(c)));
    timer.lap("evaluate");

    nlohmann::ordered_json doc = {{"config_hash", m.config_hash}};
    doc.update(eval_report_to_json(report));
    fs::path out_file = c.output_dir / "eval_report.json";
    write_json_file(out_file, doc);
    finish_manifest(m, c.output_dir, {out_file});
    io.out << eval_table(report);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

inline int cmd_flatten(const RunConfig& c, CommandIO io) {
    check_config(c);
    RunManifest m{"flatten", config_hash(c), c.seed, {}, {}, {}};
    ToolCatalog catalog = load_run_catalog(c);
    auto data = load_checked_dataset(c.dataset, "dataset");
    m.inputs.push_back(file_entry(c.dataset));
    std::map<std::string, DeviceState> states;
    ToolboxFn toolbox = catalog_toolbox(catalog);
    if (!c.device_states.empty()) {
        require_path(c.device_states, "device_states");
        states = load_device_states(c.device_states, catalog);
        toolbox = state_toolbox(states, catalog);
    }
    Providers providers = make_providers(c);
    auto options = episode_config(c, providers.retriever.get()).prompt;
    auto pairs = flatten(data, toolbox, options);
    fs::path out_file = c.output_dir / "pairs.jsonl";
    write_text_file(out_file, pairs_to_jsonl(pairs));
    finish_manifest(m, c.output_dir, {out_file});
    io.out << data.size() << " queries, " << pairs.size() << " prompt-completion pairs\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

inline int cmd_validate(const RunConfig& c, CommandIO io) {
    check_config(c);
    require_path(c.dataset, "dataset");
    ToolCatalog catalog = load_run_catalog(c);
    std::map<std::string, DeviceState> states;
    ValidateOptions options;
    options.catalog = &catalog;
    if (!c.device_states.empty()) {
        require_path(c.device_states, "device_states");
        states = load_device_states(c.device_states, catalog);
        options.device_states = &states;
    }
    if (c.expect_released) options.expect_released = ReleasedCounts{};
    auto report = validate_dataset(read_dataset_file(c.dataset), options);

    nlohmann::ordered_json doc = {{"config_hash", config_hash(c)}};
    doc.update(dataset_report_to_json(report));
    write_json_file(c.output_dir / "validation_report.json", doc);

    for (const auto& i : report.issues) {
        io.err << (i.severity == Severity::Error ? "error" : "warning") << ": ";
        if (i.line) io.err << c.dataset.filename().string() << ":" << i.line << ": ";
        if (!i.query_id.empty()) io.err << i.query_id << ": ";
        io.err << i.message << "\n";
    }
    char mean[32];
    std::snprintf(mean, sizeof mean, "%.2f", report.mean_pairs());
    io.out << report.query_count << " queries";
    for (const auto& [split, n] : report.split_counts) io.out << ", " << (split.empty() ? "(no split)" : split) << " " << n;
    io.out << "; " << report.pair_count << " pairs (" << mean << " per query); " << report.errors() << " errors, " << report.warnings()
           << " warnings\n";
    return report.ok() ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// recall
// ---------------------------------------------------------------------------

inline std::vector<RecallQuery> load_recall_queries(const fs::path& path) {
    require_path(path, "recall_queries");
    std::istringstream in(read_text_file(path));
    std::vector<RecallQuery> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(recall_query_from_json(nlohmann::ordered_json::parse(line)));
        } catch (const std::exception& e) {
            throw InvalidInput(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

inline int cmd_recall(const RunConfig& c, CommandIO io) {
    check_config(c);
    RunManifest m{"recall", config_hash(c), c.seed, {}, {}, {}};
    ToolCatalog catalog = load_run_catalog(c);
    std::vector<RecallQuery> queries;
    if (!c.recall_queries.empty()) {
        queries = load_recall_queries(c.recall_queries);
        m.inputs.push_back(file_entry(c.recall_queries));
    } else {
        queries = recall_queries(load_checked_dataset(c.dataset, "dataset"), c.recall_agent);
        m.inputs.push_back(file_entry(c.dataset));
    }
    for (const auto& q : queries) {
        if (q.agent != c.recall_agent) throw InvalidInput("recall query " + q.query_id + " is for " + std::string(to_id(q.agent)));
    }
    Providers providers = make_providers(c);
    auto candidates = catalog.owned_by(c.recall_agent);
    if (candidates.empty()) throw ConfigError("catalog has no tools for " + std::string(to_id(c.recall_agent)));
    RecallCurve curve = recall_curve(queries, candidates, *providers.retriever, c.recall_agent);

    nlohmann::ordered_json doc = {{"config_hash", m.config_hash}};
    doc.update(recall_curve_to_json(curve));
    fs::path json_file = c.output_dir / "recall_curve.json";
    fs::path table_file = c.output_dir / "recall_table.tsv";
    write_json_file(json_file, doc);
    write_text_file(table_file, recall_table(curve));
    finish_manifest(m, c.output_dir, {json_file, table_file});
    if (curve.skipped_empty) io.err << "warning: " << curve.skipped_empty << " queries without gold tools skipped\n";
    io.out << recall_table(curve);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compress-report
// ---------------------------------------------------------------------------

inline int cmd_compress_report(const RunConfig& c, CommandIO io) {
    check_config(c);
    RunManifest m{"compress_report", config_hash(c), c.seed, {}, {}, {}};
    ToolCatalog catalog = load_run_catalog(c);
    auto tokenizer = make_tokenizer(c.tokenizer);
    auto report = token_report(catalog, *tokenizer, c.include_instruction);
    nlohmann::ordered_json doc = {{"config_hash", m.config_hash}};
    doc.update(compression_report_to_json(report));
    fs::path json_file = c.output_dir / "compression_report.json";
    fs::path table_file = c.output_dir / "compression_table.txt";
    write_json_file(json_file, doc);
    write_text_file(table_file, compression_table(report));
    finish_manifest(m, c.output_dir, {json_file, table_file});
    io.out << compression_table(report);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-fixtures
// ---------------------------------------------------------------------------

inline int cmd_gen_fixtures(const RunConfig& c, CommandIO io) {
    RunManifest m{"gen_fixtures", config_hash(c), c.seed, {}, {}, {}};
    ToolCatalog catalog = load_run_catalog(c);
    auto f = fixtures::generate(c.seed, catalog);
    const fs::path& dir = c.output_dir;
    std::vector<fs::path> written;
    auto emit = [&](const fs::path& p, const std::string& text) {
        write_text_file(p, text);
        written.push_back(p);
    };
    emit(dir / "catalog.json", catalog_to_json(catalog).dump(2) + "\n");
    for (const auto& s : f.states) emit(dir / "device_states" / (s.state_id + ".json"), device_state_to_json(s).dump(2) + "\n");
    emit(dir / "gold.jsonl", dataset_to_jsonl(f.gold));
    emit(dir / "pred_with_errors.jsonl", dataset_to_jsonl(f.pred_with_errors));
    std::string recall;
    for (const auto& q : f.adversarial) recall += recall_query_to_json(q).dump() + "\n";
    emit(dir / "recall_adversarial.jsonl", recall);
    nlohmann::ordered_json config = {{"dataset", "gold.jsonl"},
                                     {"device_states", "device_states"},
                                     {"catalog", "catalog.json"},
                                     {"backend", {{"kind", "oracle"}}},
                                     {"prompt_mode", "full_text"},
                                     {"similarity", {{"kind", "trigram"}}},
                                     {"retriever", {{"kind", "lexical"}}},
                                     {"output_dir", "out"},
                                     {"seed", c.seed},
                                     {"jobs", 1}};
    emit(dir / "oracle_config.json", config.dump(2) + "\n");
    finish_manifest(m, dir, written);
    io.out << f.states.size() << " device states, " << f.gold.size() << " gold queries, " << f.adversarial.size()
           << " recall queries written to " << dir.string() << "\n";
    return kExitOk;
}

// Maps library exceptions onto exit codes.
inline int guarded(const std::function<int()>& command, CommandIO io) {
    try {
        return command();
    } catch (const ConfigError& e) {
        io.err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CatalogError& e) {
        io.err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const QueryIdMismatch& e) {
        io.err << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvalidInput& e) {
        io.err << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DeviceStateError& e) {
        io.err << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace camphor
