#include "roundtable/transcript_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace roundtable {

using OJson = nlohmann::ordered_json;

namespace {

OJson ordered(const Json& j) { return OJson::parse(j.dump()); }

OJson id_map(const auto& m) {
    OJson out = OJson::object();
    for (const auto& [id, v] : m) out[std::to_string(id)] = v;
    return out;
}

ProposalId id_key(const std::string& key) {
    std::size_t used = 0;
    const long long id = std::stoll(key, &used);
    if (used != key.size()) throw std::invalid_argument("bad proposal id key '" + key + "'");
    return id;
}

std::string_view status_name(BallotStatus s) {
    switch (s) {
        case BallotStatus::Valid: return "valid";
        case BallotStatus::Abstained: return "abstained";
        case BallotStatus::Disqualified: return "disqualified";
    }
    return "?";
}

BallotStatus parse_status(const std::string& s) {
    if (s == "valid") return BallotStatus::Valid;
    if (s == "abstained") return BallotStatus::Abstained;
    if (s == "disqualified") return BallotStatus::Disqualified;
    throw std::invalid_argument("unknown ballot status '" + s + "'");
}

OJson optional_id(const std::optional<ProposalId>& id) { return id ? OJson(*id) : OJson(nullptr); }

std::optional<ProposalId> read_optional_id(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<ProposalId>();
}

}  // namespace

Json ballot_to_json(const Ballot& b) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ballot::Abstain>) {
                return {{"type", "abstain"}};
            } else if constexpr (std::is_same_v<T, ballot::SingleChoice>) {
                return {{"type", "single"}, {"candidate", x.candidate ? Json(*x.candidate) : Json(nullptr)}};
            } else if constexpr (std::is_same_v<T, ballot::Rated>) {
                Json scores = Json::object();
                for (const auto& [id, s] : x.scores) scores[std::to_string(id)] = s;
                return {{"type", "rated"}, {"scores", scores}};
            } else if constexpr (std::is_same_v<T, ballot::Ranked>) {
                return {{"type", "ranked"}, {"order", x.order}};
            } else {
                Json points = Json::object();
                for (const auto& [id, p] : x.points) points[std::to_string(id)] = p;
                return {{"type", "cumulative"}, {"points", points}};
            }
        },
        b);
}

Ballot ballot_from_json(const Json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "abstain") return ballot::Abstain{};
    if (type == "single") return ballot::SingleChoice{read_optional_id(j.at("candidate"))};
    if (type == "rated") {
        ballot::Rated b;
        for (const auto& [k, v] : j.at("scores").items()) b.scores[id_key(k)] = v.get<int>();
        return b;
    }
    if (type == "ranked") return ballot::Ranked{j.at("order").get<std::vector<ProposalId>>()};
    if (type == "cumulative") {
        ballot::Cumulative b;
        for (const auto& [k, v] : j.at("points").items()) b.points[id_key(k)] = v.get<double>();
        return b;
    }
    throw std::invalid_argument("unknown ballot type '" + type + "'");
}

std::string serialize_transcript(const Transcript& t) {
    OJson out;
    out["v"] = Transcript::kVersion;
    out["seed"] = t.seed;
    out["config"] = {{"rounds", t.config.rounds},
                     {"agents", t.config.agents},
                     {"mechanism", to_string(t.config.mechanism)},
                     {"environment", t.config.environment},
                     {"utility_set", t.config.utility_set},
                     {"seed", t.config.seed},
                     {"max_attempts", t.config.max_attempts},
                     {"reasoning_visible", t.config.reasoning_visible},
                     {"integer_cumulative", t.config.tally.integer_cumulative}};
    OJson agents = OJson::array();
    for (const auto& a : t.agents) agents.push_back({{"index", a.index}, {"name", a.name}, {"policy", a.policy}});
    out["agents"] = std::move(agents);
    out["environment"] = t.environment_info.is_null() ? OJson::object() : ordered(t.environment_info);

    OJson proposals = OJson::array();
    for (const auto& p : t.proposals) {
        proposals.push_back({{"id", p.id}, {"round", p.round}, {"authors", p.authors}, {"body", ordered(p.body.payload)}});
    }
    out["proposals"] = std::move(proposals);

    OJson rounds = OJson::array();
    for (const auto& rec : t.rounds) {
        OJson r;
        r["round"] = rec.round;
        OJson messages = OJson::array();
        for (const auto& m : rec.messages) {
            OJson e{{"agent", m.agent}, {"status", to_string(m.status)}};
            if (m.message) {
                e["targets"] = m.message->targets;
                e["text"] = m.message->text;
            }
            messages.push_back(std::move(e));
        }
        r["messages"] = std::move(messages);
        OJson props = OJson::array();
        for (const auto& p : rec.proposals) {
            props.push_back({{"agent", p.agent},
                             {"status", to_string(p.status)},
                             {"proposal", optional_id(p.proposal)},
                             {"reasoning", p.reasoning}});
        }
        r["proposals"] = std::move(props);
        OJson slate = OJson::array();
        for (const auto& c : rec.slate) {
            slate.push_back({{"id", c.id}, {"supporters", c.supporters}, {"standing", c.standing}});
        }
        r["slate"] = std::move(slate);
        OJson ballots = OJson::array();
        for (const auto& [agent, b] : rec.ballots) {
            ballots.push_back({{"agent", agent},
                               {"action", to_string(b.action)},
                               {"ballot", ordered(ballot_to_json(b.ballot))},
                               {"status", status_name(b.status)},
                               {"reason", b.disqualify_reason},
                               {"reasoning", b.reasoning}});
        }
        r["ballots"] = std::move(ballots);
        r["outcome"] = optional_id(rec.outcome.selected);
        OJson exact = OJson::array();
        for (const auto& q : rec.tally.exact_totals) exact.push_back(q.str());
        r["tally"] = {{"exact_totals", std::move(exact)},
                      {"real_totals", rec.tally.real_totals},
                      {"valid", rec.tally.valid_ballots},
                      {"abstain", rec.tally.abstentions},
                      {"disqualified", rec.tally.disqualified}};
        rounds.push_back(std::move(r));
    }
    out["rounds"] = std::move(rounds);
    OJson accepted = OJson::array();
    for (const auto& a : t.accepted_history) accepted.push_back({{"round", a.round}, {"proposal", a.proposal}});
    out["accepted"] = std::move(accepted);
    out["final_decision"] = optional_id(t.final_decision);
    out["log"] = t.log;
    return out.dump();
}

Transcript parse_transcript(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("transcript is not JSON: ") + e.what());
    }
    try {
        if (j.at("v").get<int>() != Transcript::kVersion) {
            throw std::invalid_argument("unsupported transcript version " + j.at("v").dump());
        }
        Transcript t;
        t.seed = j.at("seed").get<std::uint64_t>();
        const Json& c = j.at("config");
        t.config.rounds = c.at("rounds").get<int>();
        t.config.agents = c.at("agents").get<int>();
        t.config.mechanism = parse_mechanism(c.at("mechanism").get<std::string>());
        t.config.environment = c.at("environment").get<std::string>();
        t.config.utility_set = c.at("utility_set").get<std::string>();
        t.config.seed = c.at("seed").get<std::uint64_t>();
        t.config.max_attempts = c.at("max_attempts").get<int>();
        t.config.reasoning_visible = c.at("reasoning_visible").get<bool>();
        t.config.tally.integer_cumulative = c.at("integer_cumulative").get<bool>();
        for (const auto& a : j.at("agents")) {
            t.agents.push_back({a.at("index").get<int>(), a.at("name").get<std::string>(), a.at("policy").get<std::string>()});
        }
        t.environment_info = j.at("environment");
        for (const auto& p : j.at("proposals")) {
            t.proposals.push_back({p.at("id").get<ProposalId>(), p.at("round").get<int>(),
                                   p.at("authors").get<std::vector<AgentIndex>>(),
                                   ProposalBody::from_payload(p.at("body"))});
        }
        for (const auto& r : j.at("rounds")) {
            RoundRecord rec;
            rec.round = r.at("round").get<int>();
            for (const auto& m : r.at("messages")) {
                MessageEntry e{m.at("agent").get<int>(), parse_action_status(m.at("status").get<std::string>()), {}};
                if (m.contains("text")) {
                    e.message = Message{e.agent, m.at("targets").get<std::vector<AgentIndex>>(), m.at("text").get<std::string>()};
                }
                rec.messages.push_back(std::move(e));
            }
            for (const auto& p : r.at("proposals")) {
                rec.proposals.push_back({p.at("agent").get<int>(), parse_action_status(p.at("status").get<std::string>()),
                                         read_optional_id(p.at("proposal")), p.at("reasoning").get<std::string>()});
            }
            for (const auto& s : r.at("slate")) {
                rec.slate.push_back({s.at("id").get<ProposalId>(), s.at("supporters").get<std::vector<AgentIndex>>(),
                                     s.at("standing").get<bool>()});
            }
            for (const auto& b : r.at("ballots")) {
                BallotEntry e;
                e.action = parse_action_status(b.at("action").get<std::string>());
                e.ballot = ballot_from_json(b.at("ballot"));
                e.status = parse_status(b.at("status").get<std::string>());
                e.disqualify_reason = b.at("reason").get<std::string>();
                e.reasoning = b.at("reasoning").get<std::string>();
                rec.ballots.emplace(b.at("agent").get<int>(), std::move(e));
            }
            rec.outcome.selected = read_optional_id(r.at("outcome"));
            const Json& tal = r.at("tally");
            for (const auto& q : tal.at("exact_totals")) rec.tally.exact_totals.push_back(Rational::parse(q.get<std::string>()));
            rec.tally.real_totals = tal.at("real_totals").get<std::vector<double>>();
            rec.tally.valid_ballots = tal.at("valid").get<int>();
            rec.tally.abstentions = tal.at("abstain").get<int>();
            rec.tally.disqualified = tal.at("disqualified").get<int>();
            t.rounds.push_back(std::move(rec));
        }
        for (const auto& a : j.at("accepted")) {
            t.accepted_history.push_back({a.at("round").get<int>(), a.at("proposal").get<ProposalId>()});
        }
        t.final_decision = read_optional_id(j.at("final_decision"));
        t.log = j.at("log").get<std::vector<std::string>>();
        return t;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed transcript: ") + e.what());
    }
}

std::vector<Transcript> read_transcripts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<Transcript> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_transcript(line));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

void write_transcripts(const std::filesystem::path& path, const std::vector<Transcript>& transcripts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& t : transcripts) out << serialize_transcript(t) << '\n';
}

}  // namespace roundtable
