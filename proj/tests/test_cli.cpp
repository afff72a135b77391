#include <doctest.h>

#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include "leanctx/commands.hpp"
#include "test_support.hpp"

namespace {

std::string cli_path() {
    const char* path = std::getenv("LEANCTX_CLI");
    REQUIRE_MESSAGE(path != nullptr, "LEANCTX_CLI must point at the built binary");
    return path;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    testsupport::TempDir tmp;
    const auto out_path = tmp.file("out.txt");
    const std::string command =
        cli_path() + " " + args + " > " + out_path.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = testsupport::read_file(out_path);
    return result;
}

std::string fixtures() { return testsupport::fixtures_dir().string(); }

} // namespace

TEST_CASE("cli end-to-end: ingest, train, ask, eval") {
    testsupport::TempDir tmp;
    const std::string config = " --config " + fixtures() + "/config_offline.json";
    const std::string store = tmp.file("store.json").string();
    const std::string agent = tmp.file("agent.json").string();
    const std::string report = tmp.file("report.json").string();

    const RunResult ingest =
        run_cli("ingest " + fixtures() + "/corpus.jsonl --store " + store + config);
    CAPTURE(ingest.output);
    REQUIRE(ingest.exit_code == 0);
    CHECK(ingest.output.find("10 documents") != std::string::npos);

    // Re-ingesting produces identical snapshot bytes.
    const std::string store2 = tmp.file("store2.json").string();
    run_cli("ingest " + fixtures() + "/corpus.jsonl --store " + store2 + config);
    CHECK(testsupport::read_file(store) == testsupport::read_file(store2));

    const RunResult train = run_cli("train " + fixtures() + "/qa.jsonl --store " + store +
                                    " --agent " + agent + config);
    CAPTURE(train.output);
    REQUIRE(train.exit_code == 0);
    // 20 samples x 9 actions + 20 full-context calls.
    CHECK(train.output.find("llm_calls: 200") != std::string::npos);

    // Same seed -> identical agent bytes.
    const std::string agent2 = tmp.file("agent2.json").string();
    run_cli("train " + fixtures() + "/qa.jsonl --store " + store + " --agent " + agent2 +
            config);
    CHECK(testsupport::read_file(agent) == testsupport::read_file(agent2));

    const std::string ask_args = "ask \"What does the harbor beacon keeper light at "
                                 "dusk?\" --store " +
                                 store + " --agent " + agent + config;
    const RunResult ask = run_cli(ask_args);
    CAPTURE(ask.output);
    REQUIRE(ask.exit_code == 0);
    CHECK(ask.output.find("answer: ") != std::string::npos);
    CHECK(ask.output.find("brass lamp") != std::string::npos);
    CHECK(ask.output.find("theta: ") != std::string::npos);
    CHECK(ask.output.find("tau: ") != std::string::npos);
    CHECK(run_cli(ask_args).output == ask.output);

    const RunResult eval =
        run_cli("eval " + fixtures() + "/qa.jsonl --store " + store + " --agent " + agent +
                " --methods original,fixed_k:0.1,adaptive_k --report " + report + config);
    CAPTURE(eval.output);
    REQUIRE(eval.exit_code == 0);
    CHECK(testsupport::read_file(report).find("\"adaptive_k\"") != std::string::npos);
    CHECK(std::filesystem::exists(tmp.file("report.txt")));
}

TEST_CASE("cli maps error classes to exit codes") {
    testsupport::TempDir tmp;
    const std::string config = " --config " + fixtures() + "/config_offline.json";
    const std::string store = tmp.file("store.json").string();

    // Missing corpus file: runtime failure naming the path.
    const RunResult missing =
        run_cli("ingest /no/such/corpus.jsonl --store " + store + config);
    CHECK(missing.exit_code == 1);
    CHECK(missing.output.find("/no/such/corpus.jsonl") != std::string::npos);

    // Unknown method: usage error listing valid names.
    run_cli("ingest " + fixtures() + "/corpus.jsonl --store " + store + config);
    const RunResult bad_method =
        run_cli("eval " + fixtures() + "/qa.jsonl --store " + store +
                " --methods original,bogus_method --report " + tmp.file("r.json").string() +
                config);
    CHECK(bad_method.exit_code == 2);
    CHECK(bad_method.output.find("valid methods") != std::string::npos);

    // Unknown flag / subcommand are usage errors.
    CHECK(run_cli("frobnicate").exit_code == 2);

    // Empty training file: nonzero exit.
    const auto empty_qa = tmp.file("empty.jsonl");
    testsupport::write_file(empty_qa, "");
    const RunResult train = run_cli("train " + empty_qa.string() + " --store " + store +
                                    " --agent " + tmp.file("a.json").string() + config);
    CHECK(train.exit_code == 1);

    // Malformed corpus line: error names the line number.
    const auto bad_corpus = tmp.file("bad.jsonl");
    testsupport::write_file(bad_corpus, "{\"doc_id\": \"d1\", \"text\": \"ok text\"}\n"
                                        "{\"doc_id\": \"d2\"}\n");
    const RunResult bad_line =
        run_cli("ingest " + bad_corpus.string() + " --store " + store + config);
    CHECK(bad_line.exit_code == 1);
    CHECK(bad_line.output.find("line 2") != std::string::npos);

    // Duplicate doc_id is a data failure, not a usage error.
    const auto dup_corpus = tmp.file("dup.jsonl");
    testsupport::write_file(dup_corpus, "{\"doc_id\": \"d1\", \"text\": \"one\"}\n"
                                        "{\"doc_id\": \"d1\", \"text\": \"two\"}\n");
    const RunResult dup =
        run_cli("ingest " + dup_corpus.string() + " --store " + store + config);
    CHECK(dup.exit_code == 1);
    CHECK(dup.output.find("duplicate doc_id") != std::string::npos);

    // Invalid config file: usage/config error.
    const auto bad_config = tmp.file("bad_config.json");
    testsupport::write_file(bad_config, "{\"store\": {\"chunk_sizes\": 5}}");
    const RunResult bad_cfg = run_cli("ingest " + fixtures() + "/corpus.jsonl --store " +
                                      store + " --config " + bad_config.string());
    CHECK(bad_cfg.exit_code == 2);
}
