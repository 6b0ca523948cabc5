#include "doctest.h"

#include <atomic>
#include <cmath>

#include "roundtable/linguistics.hpp"
#include "support.hpp"

using namespace roundtable;
using test_support::golden;
using test_support::read_file;

namespace {

std::vector<LabeledSimulation> load_fixture() {
    const Json j = Json::parse(read_file(golden("transition_fixture.json")));
    std::vector<LabeledSimulation> sims;
    for (const auto& s : j) {
        LabeledSimulation sim;
        sim.id = s.at("id").get<std::string>();
        sim.agents = s.at("agents").get<int>();
        sim.rounds = s.at("rounds").get<int>();
        for (const auto& round : s.at("acts")) {
            sim.acts.emplace_back();
            sim.spoke.emplace_back();
            for (const auto& agent : round) {
                ActSet acts;
                for (const auto& a : agent) acts.insert(*parse_dialogue_act(a.get<std::string>()));
                sim.spoke.back().push_back(!acts.empty());
                sim.acts.back().push_back(std::move(acts));
            }
        }
        sims.push_back(std::move(sim));
    }
    return sims;
}

/// Labels every message Propose and counts calls.
class CountingLabeler final : public DialogueActLabeler {
public:
    std::string id() const override { return "counting"; }
    ActSet label(const LabelRequest&) const override {
        ++calls;
        return {DialogueAct::Propose};
    }
    mutable std::atomic<int> calls{0};
};

class FailingLabeler final : public DialogueActLabeler {
public:
    std::string id() const override { return "failing"; }
    ActSet label(const LabelRequest&) const override { throw std::runtime_error("provider down"); }
};

}  // namespace

TEST_SUITE("linguistics") {

TEST_CASE("grade level follows the published formula") {
    CHECK(fk_grade("The cat sat.") == doctest::Approx(-2.62).epsilon(1e-12));
    CHECK(fk_grade("propose") == doctest::Approx(8.4).epsilon(1e-12));
    CHECK(syllable_count("the") == 1);
    CHECK(syllable_count("propose") == 2);
    CHECK(syllable_count("rhythm") == 1);
    CHECK(syllable_count("allocation") == 4);
    CHECK(sentence_count("Hi. Really?! Yes") == 2);
    CHECK(sentence_count("no punctuation") == 1);
    CHECK(word_count("  a\tb\nc  ") == 3);
    CHECK_THROWS_AS((void)fk_grade("   "), std::invalid_argument);
}

TEST_CASE("stub embeddings are unit vectors and deterministic") {
    const StubEmbedder e(64);
    const auto v = e.embed({"Alpha beta beta", "alpha BETA beta!", "", "gamma"});
    for (const auto& x : v) {
        double n = 0.0;
        for (double c : x) n += c * c;
        CHECK(n == doctest::Approx(1.0));
    }
    CHECK(cosine(v[0], v[1]) == doctest::Approx(1.0));
    CHECK(v[2][0] == 1.0);
    CHECK(cosine(v[0], v[3]) < 1.0);
}

TEST_CASE("information difference is zero for repeated content and bounded") {
    const StubEmbedder e(64);
    const auto a = e.embed({"we split the apples evenly"});
    CHECK(*info_difference(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    const auto b = e.embed({"unrelated zebra quartz"});
    const double d = *info_difference(b, a);
    CHECK(d > 0.0);
    CHECK(d <= 2.0);
    CHECK_FALSE(info_difference({}, a));
    CHECK_FALSE(info_difference(a, {}));
}

TEST_CASE("act lists parse known names and fall back to Others") {
    CHECK(parse_act_list("Propose, defend;Accept\nnonsense") ==
          ActSet{DialogueAct::Propose, DialogueAct::Defend, DialogueAct::Accept});
    CHECK(parse_act_list("I cannot tell") == ActSet{DialogueAct::Others});
    CHECK(parse_dialogue_act("SUMMARIZE") == DialogueAct::Summarize);
    CHECK_FALSE(parse_dialogue_act("Start"));
}

TEST_CASE("stub labels recognise obvious intents") {
    const StubLabeler l;
    CHECK(l.label({"A1", "I propose we split it evenly.", "None"}).count(DialogueAct::Propose));
    CHECK(l.label({"A1", "I agree, let's accept that.", "None"}).count(DialogueAct::Accept));
    CHECK(l.label({"A1", "zzz", "None"}) == ActSet{DialogueAct::Others});
}

TEST_CASE("labeler failures degrade to Others with a warning") {
    std::vector<std::string> warnings;
    CHECK(label_dialogue_acts({"A1", "x", "None"}, FailingLabeler{}, &warnings) == ActSet{DialogueAct::Others});
    CHECK(warnings.size() == 1);
}

TEST_CASE("transition probabilities match the hand count under both conventions") {
    const auto sims = load_fixture();
    CHECK(transition_csv(transition_graph(sims, PairCounting::Existence)) == read_file(golden("transition_existence.csv")));
    CHECK(transition_csv(transition_graph(sims, PairCounting::Tuples)) == read_file(golden("transition_tuples.csv")));
}

TEST_CASE("the drawn edges are the most probable non-self transitions") {
    const auto graph = transition_graph(load_fixture());
    const Json want = Json::parse(read_file(golden("transition_edges.json")));
    const auto edges = most_probable_edges(graph);
    REQUIRE(edges.size() == want.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        CHECK(to_string(edges[i].from) == want[i]["from"].get<std::string>());
        CHECK(to_string(edges[i].to) == want[i]["to"].get<std::string>());
        CHECK(edges[i].probability ==
              doctest::Approx(want[i]["numerator"].get<double>() / want[i]["denominator"].get<double>()).epsilon(1e-15));
        CHECK(edges[i].from != edges[i].to);
    }
    const std::string dot = transition_dot(graph);
    CHECK(dot.rfind("digraph", 0) == 0);
    for (DialogueAct a : kContentActs) {
        const std::string self = "\"" + std::string(to_string(a)) + "\" -> \"" + std::string(to_string(a)) + "\"";
        CHECK(dot.find(self) == std::string::npos);
    }
}

TEST_CASE("virtual rounds bracket every agent") {
    const auto sims = load_fixture();
    const auto g = transition_graph(sims);
    long long agents = 0;
    for (const auto& s : sims) agents += s.agents;
    CHECK(g.occurrences.at(DialogueAct::Start) == agents);
    CHECK_FALSE(g.occurrences.count(DialogueAct::End));
    double from_start = 0.0;
    for (const auto& [pair, p] : g.probability) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        if (pair.first == DialogueAct::Start) from_start += p;
    }
    CHECK(from_start >= 1.0 - 1e-12);
}

TEST_CASE("an unlabeled speaker is an error") {
    auto sims = load_fixture();
    sims[0].acts[0][0].clear();
    sims[0].spoke[0][0] = true;
    CHECK_THROWS_AS((void)transition_graph(sims), std::invalid_argument);
}

TEST_CASE("labels are cached per message and persisted") {
    const auto dir = test_support::temp_dir("label_cache");
    const auto t = test_support::run_economy(Mechanism::Majority, {{ScriptedKind::Selfish}, {ScriptedKind::Concessive},
                                                                   {ScriptedKind::RandomSeeded}}, 2, 4);
    CountingLabeler l;
    {
        LabelCache cache(dir / "labels.jsonl");
        const auto a = label_transcript(t, "s", l, &cache);
        const int first = l.calls.load();
        CHECK(first > 0);
        const auto b = label_transcript(t, "s", l, &cache);
        CHECK(l.calls.load() == first);
        CHECK(a.acts == b.acts);
        CHECK(cache.size() == static_cast<std::size_t>(first));
    }
    LabelCache reloaded(dir / "labels.jsonl");
    const int before = l.calls.load();
    const auto c = label_transcript(t, "s", l, &reloaded);
    CHECK(l.calls.load() == before);
    for (std::size_t r = 0; r < c.acts.size(); ++r) {
        for (std::size_t a = 0; a < c.acts[r].size(); ++a) {
            CHECK(c.spoke[r][a] == !c.acts[r][a].empty());
        }
    }
    test_support::write_file(dir / "bad.jsonl", "{\"sim\":1}\n");
    CHECK_THROWS((void)LabelCache(dir / "bad.jsonl"));
}

TEST_CASE("round features and act ratios cover every round") {
    const auto t = test_support::run_economy(Mechanism::Majority, {{ScriptedKind::Selfish}, {ScriptedKind::Concessive},
                                                                   {ScriptedKind::RandomSeeded}}, 2, 5);
    const auto f = round_features(t, StubEmbedder{});
    REQUIRE(f.size() == 5);
    CHECK_FALSE(f[0].info_difference);
    for (const auto& r : f) {
        if (r.messages > 0) CHECK(r.mean_words);
        if (r.round >= 2 && r.messages > 0 && f[static_cast<std::size_t>(r.round - 2)].messages > 0) {
            CHECK(r.info_difference);
        }
    }
    const auto ratios = act_ratios(load_fixture());
    REQUIRE(ratios.size() == 10);
    for (const auto& round : ratios) {
        for (const auto& [act, share] : round) {
            CHECK(share >= 0.0);
            CHECK(share <= 1.0);
        }
    }
}

}  // TEST_SUITE
