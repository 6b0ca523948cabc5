#include "doctest.h"

#include <atomic>

#include "roundtable/engine.hpp"
#include "roundtable/transcript_io.hpp"
#include "support.hpp"

using namespace roundtable;
using test_support::run_economy;

namespace {

/// Always skips and abstains.
class Idle final : public AgentPolicy {
public:
    std::string kind() const override { return "idle"; }
    std::optional<MessageAction> decide_message(const ContextView&) const override { return std::nullopt; }
    ProposalAction decide_proposal(const ContextView&) const override { return {}; }
    BallotAction decide_ballot(const ContextView&) const override { return {}; }
};

/// Fails every call whose running count is not a multiple of `period`, then
/// defers to an even-split policy.
class Flaky final : public AgentPolicy {
public:
    explicit Flaky(int period) : period_(period), inner_({ScriptedKind::EvenSplit, 0.5}, 1) {}
    std::string kind() const override { return "flaky"; }
    std::optional<MessageAction> decide_message(const ContextView& v) const override {
        tick();
        return inner_.decide_message(v);
    }
    ProposalAction decide_proposal(const ContextView& v) const override {
        tick();
        return inner_.decide_proposal(v);
    }
    BallotAction decide_ballot(const ContextView& v) const override {
        tick();
        return inner_.decide_ballot(v);
    }
    int calls() const { return calls_.load(); }

private:
    void tick() const {
        if (++calls_ % period_ != 0) throw PolicyFailure("flake");
    }
    int period_;
    ScriptedPolicy inner_;
    mutable std::atomic<int> calls_{0};
};

/// Proposes a table that uses more than the available goods.
class Greedy final : public AgentPolicy {
public:
    std::string kind() const override { return "greedy"; }
    std::optional<MessageAction> decide_message(const ContextView&) const override { return std::nullopt; }
    ProposalAction decide_proposal(const ContextView&) const override {
        return {Json{{"allocation", {{100, 100}, {100, 100}}}}, "all of it"};
    }
    BallotAction decide_ballot(const ContextView&) const override { return {}; }
};

EngineConfig economy_config(int rounds, int agents, Mechanism m, std::uint64_t seed = 0) {
    EngineConfig c;
    c.rounds = rounds;
    c.agents = agents;
    c.mechanism = m;
    c.seed = seed;
    return c;
}

int single_votes(const RoundRecord& rec, ProposalId id) {
    int n = 0;
    for (const auto& [a, e] : rec.ballots) {
        if (const auto* s = std::get_if<ballot::SingleChoice>(&e.ballot); s && s->candidate == id) ++n;
    }
    return n;
}

void check_structure(const Transcript& t) {
    REQUIRE(static_cast<int>(t.rounds.size()) == t.config.rounds);
    REQUIRE(t.final_decision.has_value() == !t.accepted_history.empty());
    if (!t.accepted_history.empty()) REQUIRE(*t.final_decision == t.accepted_history.back().proposal);
    for (const auto& rec : t.rounds) {
        REQUIRE(static_cast<int>(rec.messages.size()) == t.config.agents);
        REQUIRE(static_cast<int>(rec.proposals.size()) == t.config.agents);
        for (const auto& [a, e] : rec.ballots) {
            REQUIRE(a >= 0);
            REQUIRE(a < t.config.agents);
        }
        if (rec.outcome.selected) {
            REQUIRE(std::any_of(rec.slate.begin(), rec.slate.end(),
                                [&](const Candidate& c) { return c.id == *rec.outcome.selected; }));
        }
    }
    for (const auto& acc : t.accepted_history) {
        const auto& slate = t.rounds[static_cast<std::size_t>(acc.round - 1)].slate;
        REQUIRE(std::any_of(slate.begin(), slate.end(), [&](const Candidate& c) { return c.id == acc.proposal; }));
    }
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("three even-split agents merge into one candidate and select it in round one") {
    const auto t = run_economy(Mechanism::Majority, {{ScriptedKind::EvenSplit}, {ScriptedKind::EvenSplit},
                                                     {ScriptedKind::EvenSplit}}, 5);
    const auto& r1 = t.rounds.front();
    REQUIRE(r1.slate.size() == 1);
    CHECK(r1.slate[0].supporters == std::vector<AgentIndex>{0, 1, 2});
    CHECK(r1.outcome == Outcome::select(r1.slate[0].id));
    CHECK(single_votes(r1, r1.slate[0].id) == 3);
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 3);
    CHECK(t.proposal(r1.slate[0].id).body == env.neutral_proposal());
    check_structure(t);
}

TEST_CASE("two idle agents in one round decide nothing") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 2);
    Idle a, b;
    const auto t = run_collaboration(economy_config(1, 2, Mechanism::Majority), {&a, &b}, env);
    CHECK_FALSE(t.final_decision);
    CHECK(t.accepted_history.empty());
    CHECK(t.rounds[0].slate.empty());
    CHECK(t.rounds[0].outcome.deferred());
    check_structure(t);
}

TEST_CASE("unanimous selfish rounds agree with a recount of the recorded ballots") {
    int never = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = run_economy(Mechanism::Unanimous, {{ScriptedKind::Selfish}, {ScriptedKind::Selfish},
                                                          {ScriptedKind::Selfish}}, seed);
        check_structure(t);
        bool any = false;
        for (const auto& rec : t.rounds) {
            std::optional<ProposalId> want;
            for (const auto& c : rec.slate) {
                if (single_votes(rec, c.id) == 3) want = c.id;
            }
            REQUIRE(rec.outcome.selected == want);
            any = any || want.has_value();
        }
        if (!any) {
            CHECK(t.accepted_history.empty());
            ++never;
        }
    }
    CHECK(never > 0);
}

TEST_CASE("identical inputs produce byte-identical transcripts") {
    for (Mechanism m : kAllMechanisms) {
        const auto a = run_economy(m, {{ScriptedKind::Selfish}, {ScriptedKind::Concessive, 0.4},
                                       {ScriptedKind::RandomSeeded}}, 77);
        const auto b = run_economy(m, {{ScriptedKind::Selfish}, {ScriptedKind::Concessive, 0.4},
                                       {ScriptedKind::RandomSeeded}}, 77);
        CHECK(serialize_transcript(a) == serialize_transcript(b));
        check_structure(a);
    }
}

TEST_CASE("query order and concurrent queries never change the transcript") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 4);
    const auto roster = test_support::roster({{ScriptedKind::Selfish}, {ScriptedKind::Concessive, 0.7},
                                              {ScriptedKind::RandomSeeded}, {ScriptedKind::Concessive, 0.2}}, 9);
    const auto config = economy_config(10, 4, Mechanism::Plurality, 9);
    const std::string base = serialize_transcript(run_collaboration(config, roster.view(), env));
    for (const auto& order : std::vector<std::vector<AgentIndex>>{{3, 2, 1, 0}, {1, 3, 0, 2}}) {
        RunOptions o;
        o.query_order = order;
        CHECK(serialize_transcript(run_collaboration(config, roster.view(), env, o)) == base);
        o.queries = Execution::Parallel;
        CHECK(serialize_transcript(run_collaboration(config, roster.view(), env, o)) == base);
    }
}

TEST_CASE("an agent that skips keeps its previous candidate") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = run_economy(Mechanism::Majority, {{ScriptedKind::RandomSeeded}, {ScriptedKind::Concessive, 0.5},
                                                         {ScriptedKind::Selfish}}, seed);
        for (int r = 2; r <= t.config.rounds; ++r) {
            const auto now = t.latest_proposals(r), before = t.latest_proposals(r - 1);
            for (const auto& e : t.rounds[static_cast<std::size_t>(r - 1)].proposals) {
                if (e.status == ActionStatus::Ok) {
                    REQUIRE(now.at(e.agent) == *e.proposal);
                } else if (before.count(e.agent)) {
                    REQUIRE(now.at(e.agent) == before.at(e.agent));
                } else {
                    REQUIRE_FALSE(now.count(e.agent));
                }
            }
        }
    }
}

TEST_CASE("transient failures are retried and persistent ones degrade") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 3);
    Flaky flaky(3);
    Flaky broken(1000);
    const ScriptedPolicy even({ScriptedKind::EvenSplit}, 0);
    const auto t = run_collaboration(economy_config(2, 3, Mechanism::Majority), {&flaky, &broken, &even}, env);
    CHECK(flaky.calls() == 2 * 3 * 3);
    CHECK(broken.calls() == 2 * 3 * 3);
    for (const auto& rec : t.rounds) {
        CHECK(rec.messages[0].status == ActionStatus::Ok);
        CHECK(rec.proposals[0].status != ActionStatus::Failed);
        CHECK(rec.messages[1].status == ActionStatus::Failed);
        CHECK(rec.proposals[1].status == ActionStatus::Failed);
        CHECK(rec.ballots.at(1).action == ActionStatus::Failed);
        CHECK(rec.ballots.at(1).status == BallotStatus::Abstained);
    }
    CHECK(t.final_decision);
    CHECK(t.log.size() >= 6);
    check_structure(t);
}

TEST_CASE("infeasible proposal bodies are rejected and logged") {
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 2);
    Greedy g;
    const ScriptedPolicy even({ScriptedKind::EvenSplit}, 0);
    const auto t = run_collaboration(economy_config(1, 2, Mechanism::Majority), {&g, &even}, env);
    CHECK(t.rounds[0].proposals[0].status == ActionStatus::Rejected);
    CHECK_FALSE(t.rounds[0].proposals[0].proposal);
    CHECK(std::any_of(t.log.begin(), t.log.end(), [](const std::string& l) { return l.find("A1") != std::string::npos; }));
}

TEST_CASE("configuration errors are reported together") {
    EngineConfig c;
    c.rounds = 0;
    c.agents = 1;
    c.max_attempts = 0;
    c.environment = "bazaar";
    CHECK(c.validate().size() == 4);
    EconomyEnvironment env(UtilitySetPreset::AsymmetricLiteral, 3);
    Idle a;
    try {
        (void)run_collaboration(economy_config(10, 3, Mechanism::Majority), {&a, &a}, env);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("roster has 2 policies") != std::string::npos);
    }
    RunOptions bad;
    bad.query_order = {0, 0, 1};
    CHECK_THROWS_AS((void)run_collaboration(economy_config(1, 3, Mechanism::Majority), {&a, &a, &a}, env, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)run_collaboration(economy_config(1, 2, Mechanism::Majority), {&a, &a}, env),
                    std::invalid_argument);
}

TEST_CASE("committing outcomes appends to the accepted history") {
    Transcript t;
    commit_outcome(t, 2, Outcome::select(1));
    commit_outcome(t, 3, Outcome::defer());
    CHECK(t.accepted_history == std::vector<AcceptedEntry>{{2, 1}});
    commit_outcome(t, 5, Outcome::select(2));
    commit_outcome(t, 7, Outcome::select(1));
    CHECK(t.accepted_history == std::vector<AcceptedEntry>{{2, 1}, {5, 2}, {7, 1}});
    CHECK(t.final_decision == 1);
}

TEST_CASE("the standing decision joins the slate once") {
    auto s = assemble_candidates({}, 7);
    REQUIRE(s.size() == 1);
    CHECK(s[0].standing);
    CHECK(s[0].supporters.empty());
    s = assemble_candidates({{0, 7}}, 7);
    REQUIRE(s.size() == 1);
    CHECK(s[0].supporters == std::vector<AgentIndex>{0});
}

}  // TEST_SUITE

TEST_SUITE("transcript") {

TEST_CASE("records roundtrip through the line format for every mechanism") {
    for (Mechanism m : kAllMechanisms) {
        auto t = run_economy(m, {{ScriptedKind::Selfish}, {ScriptedKind::Concessive, 0.6}, {ScriptedKind::RandomSeeded}},
                             3);
        t.environment_info = {{"note", "x"}};
        const std::string line = serialize_transcript(t);
        CHECK(line.rfind(R"({"v":1)", 0) == 0);
        CHECK(line.find('\n') == std::string::npos);
        CHECK(serialize_transcript(parse_transcript(line)) == line);
    }
}

TEST_CASE("ballots roundtrip through json") {
    const std::vector<Ballot> all{ballot::Abstain{}, ballot::SingleChoice{std::nullopt}, ballot::SingleChoice{4},
                                  ballot::Rated{{{1, 5}, {2, 1}}}, ballot::Ranked{{2, 1}},
                                  ballot::Cumulative{{{1, 0.25}, {2, 1.75}}}};
    for (const auto& b : all) CHECK(ballot_from_json(ballot_to_json(b)) == b);
}

TEST_CASE("malformed records are rejected") {
    CHECK_THROWS_AS(parse_transcript("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transcript(R"({"v":2})"), std::invalid_argument);
    const auto dir = test_support::temp_dir("transcript_io");
    test_support::write_file(dir / "t.jsonl", "\n{oops}\n");
    try {
        (void)read_transcripts(dir / "t.jsonl");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("files hold one record per line") {
    const auto dir = test_support::temp_dir("transcript_file");
    std::vector<Transcript> ts;
    for (std::uint64_t s = 0; s < 3; ++s) ts.push_back(run_economy(Mechanism::Plurality, {{ScriptedKind::Selfish},
                                                                   {ScriptedKind::Selfish}}, s, 3));
    write_transcripts(dir / "t.jsonl", ts);
    const auto back = read_transcripts(dir / "t.jsonl");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(serialize_transcript(back[i]) == serialize_transcript(ts[i]));
}

}  // TEST_SUITE
