#include <sstream>

#include <gtest/gtest.h>

#include "camphor/harness/commands.hpp"
#include "support.hpp"

namespace camphor {
namespace {

RunConfig oracle_config(const fs::path& out) {
    RunConfig c = load_config(test::fixture_dir() / "oracle_config.json");
    c.output_dir = out;
    return c;
}

// Runs a command through `guarded`, capturing its streams.
struct Captured {
    int code = 0;
    std::string out;
    std::string err;
};

Captured run_cmd(int (*cmd)(const RunConfig&, CommandIO), const RunConfig& c) {
    std::ostringstream out, err;
    CommandIO io{out, err};
    Captured r;
    r.code = guarded([&] { return cmd(c, io); }, io);
    r.out = out.str();
    r.err = err.str();
    return r;
}

TEST(Config, ParsesAndResolvesPaths) {
    auto doc = nlohmann::json::parse(R"({"dataset": "d.jsonl", "device_states": "/abs/states", "k": 3,
        "backend": {"kind": "http", "endpoint": "http://127.0.0.1:9", "model": "m", "retries": 2},
        "similarity": "trigram", "averaging": "micro", "prompt_mode": "rag"})");
    auto c = parse_config(doc, "/base");
    EXPECT_EQ(c.dataset, fs::path("/base/d.jsonl"));
    EXPECT_EQ(c.device_states, fs::path("/abs/states"));
    EXPECT_EQ(c.k, 3u);
    EXPECT_EQ(c.backend.kind, "http");
    EXPECT_EQ(c.backend.retries, 2);
    EXPECT_EQ(c.backend.generate.model, "m");
    EXPECT_EQ(c.averaging, Averaging::Micro);
    EXPECT_EQ(c.prompt_mode, PromptMode::Retrieved);
    EXPECT_EQ(c.max_steps, 20u);
    EXPECT_NO_THROW(check_config(c));
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"datset": "x"})")), ConfigError);
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"k": "five"})")), ConfigError);
    EXPECT_THROW(parse_config(nlohmann::json::parse("[]")), ConfigError);
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"prompt_mode": "zip"})")), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);

    RunConfig c;
    c.threshold = 1.5;
    EXPECT_THROW(check_config(c), ConfigError);
    c = {};
    c.backend.kind = "http";
    EXPECT_THROW(check_config(c), ConfigError);
    c = {};
    c.retriever.kind = "dense";
    EXPECT_THROW(check_config(c), ConfigError);
    c = {};
    c.tokenizer = "bpe";
    EXPECT_THROW(check_config(c), ConfigError);
    c = {};
    c.jobs = 0;
    EXPECT_THROW(check_config(c), ConfigError);
}

TEST(Config, HashCoversResultsOnly) {
    auto a = load_config(test::fixture_dir() / "oracle_config.json");
    auto b = a;
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.jobs = 8;
    b.output_dir = "/elsewhere";
    b.dataset = "/other/dir/gold.jsonl";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.threshold = 0.8;
    EXPECT_NE(config_hash(a), config_hash(b));
    b = a;
    b.prompt_mode = PromptMode::Compressed;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Commands, OracleRunThenEval) {
    test::TempDir dir("oracle");
    auto c = oracle_config(dir.path());
    auto run = run_cmd(cmd_run, c);
    ASSERT_EQ(run.code, kExitOk) << run.err;
    EXPECT_NE(run.out.find("50 queries: 50 completed, 0 truncated, 0 aborted"), std::string::npos);
    EXPECT_EQ(read_text_file(dir / "predictions.jsonl"), read_text_file(test::fixture_dir() / "gold.jsonl"));

    auto manifest = nlohmann::json::parse(read_text_file(dir / "run_manifest.json"));
    EXPECT_EQ(manifest["command"], "run");
    EXPECT_EQ(manifest["config_hash"], config_hash(c));
    EXPECT_EQ(manifest["inputs"][0]["path"], "gold.jsonl");
    EXPECT_EQ(manifest["outputs"][0]["path"], "predictions.jsonl");
    EXPECT_EQ(manifest["outputs"][0]["fnv1a64"], hex64(fnv1a64(read_text_file(dir / "predictions.jsonl"))));
    EXPECT_TRUE(manifest["timings_ms"].contains("episodes"));

    auto eval = run_cmd(cmd_eval, c);
    ASSERT_EQ(eval.code, kExitOk) << eval.err;
    EXPECT_NE(eval.out.find("Plan F1 / %                   100.00"), std::string::npos);
    auto report = nlohmann::json::parse(read_text_file(dir / "eval_report.json"));
    EXPECT_EQ(report["config_hash"], config_hash(c));
    EXPECT_EQ(report["corpus"]["tool_f1_pct"], "100.00");
}

TEST(Commands, ParallelRunIsByteIdentical) {
    test::TempDir one("serial"), many("parallel");
    auto c = oracle_config(one.path());
    ASSERT_EQ(run_cmd(cmd_run, c).code, kExitOk);
    c.output_dir = many.path();
    c.jobs = 4;
    ASSERT_EQ(run_cmd(cmd_run, c).code, kExitOk);
    EXPECT_EQ(read_text_file(one / "predictions.jsonl"), read_text_file(many / "predictions.jsonl"));
}

TEST(Commands, TruncatedEpisodesArePartial) {
    test::TempDir dir("partial");
    auto c = oracle_config(dir.path());
    c.max_steps = 1;
    auto r = run_cmd(cmd_run, c);
    EXPECT_EQ(r.code, kExitPartial);
    EXPECT_NE(r.out.find("truncated"), std::string::npos);
}

TEST(Commands, EvalOfNoisyPredictions) {
    test::TempDir dir("noisy");
    auto c = oracle_config(dir.path());
    c.predictions = test::fixture_dir() / "pred_with_errors.jsonl";
    auto r = run_cmd(cmd_eval, c);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto report = nlohmann::json::parse(read_text_file(dir / "eval_report.json"));
    EXPECT_LT(report["corpus"]["plan_f1"].get<double>(), 1.0);
}

TEST(Commands, EvalFailureExitCodes) {
    test::TempDir dir("evalfail");
    auto c = oracle_config(dir.path());
    auto subset = test::fixture_set().gold;
    subset.pop_back();
    save_dataset(dir / "subset.jsonl", subset);
    c.predictions = dir / "subset.jsonl";
    auto mismatch = run_cmd(cmd_eval, c);
    EXPECT_EQ(mismatch.code, kExitValidation);
    EXPECT_NE(mismatch.err.find("q050"), std::string::npos) << mismatch.err;

    write_text_file(dir / "broken.jsonl", "{oops\n");
    c.predictions = dir / "broken.jsonl";
    EXPECT_EQ(run_cmd(cmd_eval, c).code, kExitValidation);

    c.predictions = dir / "missing.jsonl";
    EXPECT_EQ(run_cmd(cmd_eval, c).code, kExitConfig);

    c = oracle_config(dir.path());
    c.catalog = dir / "no_catalog.json";
    EXPECT_EQ(run_cmd(cmd_eval, c).code, kExitConfig);
}

TEST(Commands, ValidateExitCodes) {
    test::TempDir dir("validate");
    auto c = oracle_config(dir.path());
    auto ok = run_cmd(cmd_validate, c);
    EXPECT_EQ(ok.code, kExitOk) << ok.err;
    EXPECT_NE(ok.out.find("50 queries"), std::string::npos);

    auto data = test::fixture_set().gold;
    data[3].steps[0].results.clear();
    save_dataset(dir / "bad.jsonl", data);
    c.dataset = dir / "bad.jsonl";
    auto bad = run_cmd(cmd_validate, c);
    EXPECT_EQ(bad.code, kExitValidation);
    EXPECT_NE(bad.err.find("bad.jsonl:4: q004"), std::string::npos) << bad.err;

    c = oracle_config(dir.path());
    c.expect_released = true;
    EXPECT_EQ(run_cmd(cmd_validate, c).code, kExitValidation);
}

TEST(Commands, FlattenWritesPairs) {
    test::TempDir dir("flatten");
    auto c = oracle_config(dir.path());
    auto r = run_cmd(cmd_flatten, c);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::size_t expected = 0;
    for (const auto& t : test::fixture_set().gold) expected += pair_count(t);
    std::istringstream in(read_text_file(dir / "pairs.jsonl"));
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    EXPECT_EQ(lines, expected);
}

TEST(Commands, RecallOnAdversarialSet) {
    test::TempDir dir("recall");
    auto c = oracle_config(dir.path());
    c.recall_queries = test::fixture_dir() / "recall_adversarial.jsonl";
    auto r = run_cmd(cmd_recall, c);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("13\t1.000000"), std::string::npos);
    c.recall_agent = AgentKind::PersonalContext;
    EXPECT_EQ(run_cmd(cmd_recall, c).code, kExitValidation);
}

TEST(Commands, CompressReportIsReproducible) {
    test::TempDir a("compress-a"), b("compress-b");
    RunConfig c;
    c.output_dir = a.path();
    ASSERT_EQ(run_cmd(cmd_compress_report, c).code, kExitOk);
    c.output_dir = b.path();
    auto r = run_cmd(cmd_compress_report, c);
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(read_text_file(a / "compression_report.json"), read_text_file(b / "compression_report.json"));
    auto doc = nlohmann::json::parse(read_text_file(a / "compression_report.json"));
    EXPECT_EQ(doc["agents"][0]["compressed_tool_tokens"], 23);
    EXPECT_EQ(doc["agents"][1]["compressed_tool_tokens"], 13);
}

TEST(Commands, GenFixturesReproducesBundledFiles) {
    test::TempDir dir("gen");
    RunConfig c;
    c.seed = 7;
    c.output_dir = dir.path();
    ASSERT_EQ(run_cmd(cmd_gen_fixtures, c).code, kExitOk);
    for (const char* f : {"catalog.json", "gold.jsonl", "pred_with_errors.jsonl", "recall_adversarial.jsonl", "oracle_config.json",
                          "device_states/user-barcelona.json"}) {
        EXPECT_EQ(read_text_file(dir / f), read_text_file(test::fixture_dir() / f)) << f;
    }
}

TEST(Commands, GuardedMapsUnexpectedErrors) {
    std::ostringstream out, err;
    CommandIO io{out, err};
    EXPECT_EQ(guarded([]() -> int { throw std::runtime_error("boom"); }, io), kExitConfig);
    EXPECT_NE(err.str().find("boom"), std::string::npos);
    EXPECT_EQ(guarded([]() -> int { throw InvalidInput("bad"); }, io), kExitValidation);
}

} // namespace
} // namespace camphor
