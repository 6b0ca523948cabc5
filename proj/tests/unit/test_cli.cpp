#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "support.hpp"

namespace fs = std::filesystem;
using test_support::read_file;
using test_support::source_root;
using test_support::temp_dir;
using test_support::write_file;

namespace {

struct Result {
    int code = 0;
    std::string err;
};

/// Runs the command line tool with `args`, capturing stderr.
Result cli(const std::string& args, const fs::path& scratch) {
    const fs::path err = scratch / "stderr.txt";
    const std::string cmd = std::string("\"") + ROUNDTABLE_CLI + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = fs::exists(err) ? read_file(err) : "";
    return r;
}

std::string config(const std::string& name) { return "\"" + (source_root() / "configs" / name).string() + "\""; }

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("two identical runs write identical files") {
    const auto scratch = temp_dir("cli_det");
    for (const char* d : {"a", "b"}) {
        const auto r = cli("run --config " + config("economy_scripted.json") + " --out " + quoted(scratch / d) +
                               " --sims 10 --seed 5",
                           scratch);
        REQUIRE(r.code == 0);
    }
    for (const char* f : {"transcripts.jsonl", "metrics.csv", "summary.csv", "summary.json"}) {
        CHECK_MESSAGE(read_file(scratch / "a" / f) == read_file(scratch / "b" / f), f);
    }
    CHECK(lines(read_file(scratch / "a" / "transcripts.jsonl")) == 10);
}

TEST_CASE("an interrupted run resumes to the same result") {
    const auto scratch = temp_dir("cli_resume");
    const std::string base = "run --config " + config("economy_scripted.json") + " --seed 3 --out ";
    REQUIRE(cli(base + quoted(scratch / "full") + " --sims 6", scratch).code == 0);
    REQUIRE(cli(base + quoted(scratch / "part") + " --sims 2", scratch).code == 0);
    // A torn final line from a crash is skipped and rerun.
    {
        std::string text = read_file(scratch / "part" / "transcripts.jsonl");
        write_file(scratch / "part" / "transcripts.jsonl", text + "{\"v\":1,\"trunc");
    }
    const auto r = cli(base + quoted(scratch / "part") + " --sims 6", scratch);
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(r.err.find("resuming: 2 of 6") != std::string::npos);
    CHECK(read_file(scratch / "part" / "transcripts.jsonl") == read_file(scratch / "full" / "transcripts.jsonl"));
    CHECK(read_file(scratch / "part" / "summary.csv") == read_file(scratch / "full" / "summary.csv"));
}

TEST_CASE("invalid input exits with a validation code and an actionable message") {
    const auto scratch = temp_dir("cli_errors");
    auto r = cli("run --config " + config("economy_scripted.json") + " --out " + quoted(scratch / "o") +
                     " --mechanism borda",
                 scratch);
    CHECK(r.code == 1);
    for (const char* m : {"Unanimous", "Majority", "Plurality", "Rated", "Ranked", "Cumulative"}) {
        CHECK(r.err.find(m) != std::string::npos);
    }
    r = cli("run --config " + quoted(scratch / "nope.json") + " --out " + quoted(scratch / "o"), scratch);
    CHECK(r.code == 1);
    write_file(scratch / "bad.json", R"({"rounds": 0, "flavour": 1})");
    r = cli("run --config " + quoted(scratch / "bad.json") + " --out " + quoted(scratch / "o"), scratch);
    CHECK(r.code == 1);
    CHECK(r.err.find("flavour") != std::string::npos);
    CHECK(r.err.find("rounds") != std::string::npos);
    r = cli("frobnicate", scratch);
    CHECK(r.code == 1);
    fs::create_directories(scratch / "empty");
    r = cli("analyze --in " + quoted(scratch / "empty"), scratch);
    CHECK(r.code == 1);
    CHECK(r.err.find("no transcripts found") != std::string::npos);
}

TEST_CASE("LLM configs without a reachable provider can fall back to scripted agents") {
    const auto scratch = temp_dir("cli_nollm");
    const auto r = cli("run --config " + config("economy_llm.json") + " --out " + quoted(scratch / "o") +
                           " --sims 2 --no-llm",
                       scratch);
    CHECK(r.code == 0);
    CHECK(read_file(scratch / "o" / "transcripts.jsonl").find("concessive") != std::string::npos);
}

TEST_CASE("analysis is idempotent and feeds the stopping harness") {
    const auto scratch = temp_dir("cli_analyze");
    const auto out = scratch / "o";
    REQUIRE(cli("run --config " + config("economy_scripted.json") + " --out " + quoted(out) + " --sims 10", scratch)
                .code == 0);
    REQUIRE(cli("analyze --in " + quoted(out), scratch).code == 0);
    std::map<std::string, std::string> first;
    for (const char* f : {"features.csv", "act_ratios.csv", "transitions.dot", "transitions.csv", "labels.jsonl"}) {
        REQUIRE_MESSAGE(fs::exists(out / f), f);
        first[f] = read_file(out / f);
    }
    REQUIRE(cli("analyze --in " + quoted(out), scratch).code == 0);
    for (const auto& [f, text] : first) CHECK_MESSAGE(read_file(out / f) == text, f);
    CHECK(read_file(out / "transitions.dot").rfind("digraph", 0) == 0);

    const auto r = cli("stopping --in " + quoted(out) + " --k 5", scratch);
    REQUIRE(r.code == 0);
    const std::string csv = read_file(out / "stopping.csv");
    CHECK(csv.find("economy:Majority,oracle,") != std::string::npos);
    CHECK(csv.find(",dialogue_act,") != std::string::npos);
    CHECK(fs::exists(out / "stopping.json"));
}

TEST_CASE("the stopping harness rejects too few simulations and missing labels") {
    const auto scratch = temp_dir("cli_stopping");
    const auto out = scratch / "o";
    REQUIRE(cli("run --config " + config("economy_scripted.json") + " --out " + quoted(out) + " --sims 3", scratch)
                .code == 0);
    auto r = cli("stopping --in " + quoted(out) + " --k 5 --rules oracle at_R", scratch);
    CHECK(r.code == 1);
    CHECK(r.err.find("5") != std::string::npos);
    r = cli("stopping --in " + quoted(out) + " --k 2 --rules dialogue_act", scratch);
    CHECK(r.code == 1);
    CHECK(r.err.find("roundtable analyze") != std::string::npos);
    r = cli("stopping --in " + quoted(out) + " --k 2 --rules oracle at_R first_agreement", scratch);
    CHECK(r.code == 0);
}

TEST_CASE("rating runs use the sample task") {
    const auto scratch = temp_dir("cli_rating");
    const auto r = cli("run --config " + config("rating_scripted.json") + " --out " + quoted(scratch / "o") + " --sims 2",
                       scratch);
    REQUIRE(r.code == 0);
    CHECK(read_file(scratch / "o" / "metrics.csv").find("user7_movie231") != std::string::npos);
}

TEST_CASE("u_max can be certified from the command line") {
    const auto scratch = temp_dir("cli_umax");
    CHECK(cli("umax --preset Uniform --agents 3", scratch).code == 0);
    CHECK(cli("umax --preset Uniform --agents 5 --certify", scratch).code != 0);
}

}  // TEST_SUITE
