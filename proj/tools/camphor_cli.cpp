// camphor: run, score and inspect multi-agent query-understanding experiments.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "camphor/harness/commands.hpp"

namespace {

using namespace camphor;

struct Overrides {
    std::string config;
    std::optional<std::string> dataset, device_states, catalog, output_dir, predictions, recall_queries;
    std::optional<std::string> backend, endpoint, model, prompt_mode, similarity, similarity_endpoint, retriever, retriever_endpoint;
    std::optional<std::string> tokenizer, averaging, agent;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs, k, max_steps;
    std::optional<double> threshold, timeout;
    std::optional<int> retries;
    bool no_instruction = false;
    bool baseline_mode = false;
    bool expect_released = false;
};

RunConfig build_config(const Overrides& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.dataset) c.dataset = *o.dataset;
    if (o.device_states) c.device_states = *o.device_states;
    if (o.catalog) c.catalog = *o.catalog;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.predictions) c.predictions = *o.predictions;
    if (o.recall_queries) c.recall_queries = *o.recall_queries;
    if (o.backend) c.backend.kind = *o.backend;
    if (o.endpoint) c.backend.endpoint = *o.endpoint;
    if (o.model) c.backend.generate.model = *o.model;
    if (o.timeout) c.backend.timeout_seconds = *o.timeout;
    if (o.retries) c.backend.retries = *o.retries;
    if (o.prompt_mode) c.prompt_mode = prompt_mode_from_id(*o.prompt_mode);
    if (o.similarity) c.similarity.kind = *o.similarity;
    if (o.similarity_endpoint) c.similarity.endpoint = *o.similarity_endpoint;
    if (o.retriever) c.retriever.kind = *o.retriever;
    if (o.retriever_endpoint) c.retriever.endpoint = *o.retriever_endpoint;
    if (o.tokenizer) c.tokenizer = *o.tokenizer;
    if (o.averaging) c.averaging = averaging_from_id(*o.averaging);
    if (o.agent) {
        auto a = agent_from_id(*o.agent);
        if (!a) throw ConfigError("unknown agent '" + *o.agent + "'");
        c.recall_agent = *a;
    }
    if (o.seed) c.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.k) c.k = *o.k;
    if (o.max_steps) c.max_steps = *o.max_steps;
    if (o.threshold) c.threshold = *o.threshold;
    if (o.no_instruction) c.include_instruction = false;
    if (o.baseline_mode) c.baseline_mode = true;
    if (o.expect_released) c.expect_released = true;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"camphor: multi-agent query understanding harness"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("-c,--config", o.config, "JSON run configuration");
    app.add_option("--dataset,--gold", o.dataset, "gold trajectories (JSONL)");
    app.add_option("--device-states", o.device_states, "directory of device-state documents");
    app.add_option("--catalog", o.catalog, "tool catalog document (default: built-in)");
    app.add_option("-o,--output-dir", o.output_dir, "directory for outputs");
    app.add_option("--pred", o.predictions, "predicted trajectories for eval");
    app.add_option("--queries", o.recall_queries, "stand-alone recall query set (JSONL)");
    app.add_option("--agent", o.agent, "agent for recall (default TaskCompletion)");
    app.add_option("--backend", o.backend, "oracle | http");
    app.add_option("--endpoint", o.endpoint, "backend URL for --backend http");
    app.add_option("--model", o.model, "model id sent to the http backend");
    app.add_option("--timeout", o.timeout, "http timeout in seconds");
    app.add_option("--retries", o.retries, "extra http attempts");
    app.add_option("--prompt-mode", o.prompt_mode, "full_text | retrieved | compressed");
    app.add_option("-k,--k", o.k, "tools kept in retrieved mode");
    app.add_option("--max-steps", o.max_steps, "expert steps before truncation");
    app.add_option("--similarity", o.similarity, "trigram | sidecar");
    app.add_option("--similarity-endpoint", o.similarity_endpoint, "sidecar URL for similarity");
    app.add_option("--retriever", o.retriever, "lexical | dense");
    app.add_option("--retriever-endpoint", o.retriever_endpoint, "sidecar URL for dense retrieval");
    app.add_option("--tokenizer", o.tokenizer, "wordpunct | whitespace");
    app.add_option("--threshold", o.threshold, "similarity threshold for Plan F1");
    app.add_option("--averaging", o.averaging, "macro | micro");
    app.add_option("--seed", o.seed, "seed for every randomized component");
    app.add_option("-j,--jobs", o.jobs, "queries run in parallel");
    app.add_flag("--no-instruction", o.no_instruction, "drop agent instructions from prompts");
    app.add_flag("--baseline-mode", o.baseline_mode, "accept Answer/Reflection/Response Submit agents");
    app.add_flag("--expect-released", o.expect_released, "check the released data set sizes");

    using Command = int (*)(const RunConfig&, CommandIO);
    Command selected = nullptr;
    auto sub = [&](const char* name, const char* help, Command fn) {
        app.add_subcommand(name, help)->callback([&selected, fn] { selected = fn; });
    };
    sub("run", "run episodes over a data set and write predictions", &cmd_run);
    sub("eval", "score predictions against gold plans", &cmd_eval);
    sub("flatten", "write prompt-completion pairs", &cmd_flatten);
    sub("validate", "check a data set", &cmd_validate);
    sub("recall", "retrieval recall at every K", &cmd_recall);
    sub("compress-report", "token counts with and without prompt compression", &cmd_compress_report);
    sub("gen-fixtures", "generate synthetic device states and data sets", &cmd_gen_fixtures);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    CommandIO io{std::cout, std::cerr};
    return guarded([&] { return selected(build_config(o), io); }, io);
}
