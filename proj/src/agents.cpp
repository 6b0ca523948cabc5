#include "roundtable/agents.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "roundtable/prompts.hpp"

namespace roundtable {

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Message: return "message";
        case Phase::Proposal: return "proposal";
        case Phase::Voting: return "voting";
    }
    return "?";
}

std::optional<ProposalId> ContextView::standing() const { return transcript.standing_after(round - 1); }

std::optional<ProposalId> ContextView::own_latest() const {
    const auto latest = transcript.latest_proposals(round);
    auto it = latest.find(self);
    if (it == latest.end()) return std::nullopt;
    return it->second;
}

std::map<AgentIndex, ProposalId> ContextView::latest_proposals() const { return transcript.latest_proposals(round); }

double ContextView::budget() const { return slate ? cumulative_budget(static_cast<int>(slate->size())) : 0.0; }

// ------------------------------------------------------------------ scripted

std::string_view to_string(ScriptedKind k) {
    switch (k) {
        case ScriptedKind::Selfish: return "selfish";
        case ScriptedKind::EvenSplit: return "even_split";
        case ScriptedKind::Concessive: return "concessive";
        case ScriptedKind::RandomSeeded: return "random";
    }
    return "?";
}

ScriptedKind parse_scripted_kind(std::string_view name) {
    if (name == "selfish") return ScriptedKind::Selfish;
    if (name == "even_split") return ScriptedKind::EvenSplit;
    if (name == "concessive") return ScriptedKind::Concessive;
    if (name == "random") return ScriptedKind::RandomSeeded;
    throw std::invalid_argument("unknown scripted policy '" + std::string(name) +
                                "' (expected selfish, even_split, concessive or random)");
}

ScriptedPolicy::ScriptedPolicy(ScriptedSpec spec, std::uint64_t seed) : spec_(spec), seed_(seed) {
    if (spec_.kind == ScriptedKind::Concessive && !(spec_.lambda > 0.0 && spec_.lambda <= 1.0)) {
        throw std::invalid_argument("concessive lambda must lie in (0, 1]");
    }
}

std::string ScriptedPolicy::kind() const {
    std::string k(to_string(spec_.kind));
    if (spec_.kind == ScriptedKind::Concessive) {
        std::ostringstream out;
        out << k << "(" << spec_.lambda << ")";
        return out.str();
    }
    return k;
}

std::uint64_t ScriptedPolicy::stream(const ContextView& view) const {
    return derive_seed(seed_, {static_cast<std::uint64_t>(view.self), static_cast<std::uint64_t>(view.round),
                               static_cast<std::uint64_t>(view.phase)});
}

std::optional<MessageAction> ScriptedPolicy::decide_message(const ContextView& view) const {
    MessageAction action;
    for (AgentIndex j = 0; j < view.env.agent_count(); ++j) {
        if (j != view.self) action.targets.push_back(j);
    }
    const auto own = view.own_latest();
    const auto standing = view.standing();
    MessageHint hint;
    hint.round = view.round;
    hint.stance = std::string(to_string(spec_.kind));
    if (own) hint.own_latest = &view.transcript.proposal(*own).body;
    if (standing) hint.standing = &view.transcript.proposal(*standing).body;
    action.text = view.env.scripted_message(view.self, hint);
    return action;
}

ProposalAction ScriptedPolicy::decide_proposal(const ContextView& view) const {
    const auto own = view.own_latest();
    ProposalAction action;
    switch (spec_.kind) {
        case ScriptedKind::Selfish:
            if (!own) {
                action.body = view.env.selfish_proposal(view.self).payload;
                action.reasoning = "Maximizes my own utility.";
            }
            break;
        case ScriptedKind::EvenSplit:
            if (!own) {
                action.body = view.env.neutral_proposal().payload;
                action.reasoning = "Treats every agent the same.";
            }
            break;
        case ScriptedKind::Concessive: {
            if (!own) {
                action.body = view.env.selfish_proposal(view.self).payload;
                action.reasoning = "Opening with my preferred outcome.";
                break;
            }
            std::vector<ProposalBody> others;
            for (const auto& [agent, id] : view.latest_proposals()) {
                if (agent != view.self) others.push_back(view.transcript.proposal(id).body);
            }
            const ProposalBody& from = view.transcript.proposal(*own).body;
            const ProposalBody next = view.env.blend(from, others, spec_.lambda);
            if (!(next == from)) {
                action.body = next.payload;
                action.reasoning = "Moving toward the other proposals.";
            }
            break;
        }
        case ScriptedKind::RandomSeeded: {
            Rng rng(stream(view));
            action.body = view.env.random_proposal(rng).payload;
            action.reasoning = "Exploring a random outcome.";
            break;
        }
    }
    return action;
}

BallotAction ScriptedPolicy::decide_ballot(const ContextView& view) const {
    BallotAction action;
    if (!view.slate || view.slate->empty()) return action;
    std::vector<std::pair<ProposalId, double>> utilities;
    try {
        Rng rng(stream(view));
        for (const auto& c : *view.slate) {
            const double u = spec_.kind == ScriptedKind::RandomSeeded
                                 ? rng.uniform()
                                 : view.env.utility(view.self, view.transcript.proposal(c.id).body);
            utilities.emplace_back(c.id, u);
        }
    } catch (const std::exception&) {
        return action;
    }
    action.ballot = scripted_ballot(utilities, view.config.mechanism, view.budget(), view.config.tally.integer_cumulative);
    action.reasoning = "Ranked the candidates by my utility.";
    return action;
}

Ballot scripted_ballot(const std::vector<std::pair<ProposalId, double>>& utilities, Mechanism mechanism,
                       double budget, bool integer_points) {
    if (utilities.empty()) return ballot::Abstain{};
    for (const auto& [id, u] : utilities) {
        if (!std::isfinite(u)) return ballot::Abstain{};
    }
    auto by_id = utilities;
    std::sort(by_id.begin(), by_id.end());
    double lo = by_id.front().second, hi = lo;
    for (const auto& [id, u] : by_id) {
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    switch (mechanism) {
        case Mechanism::Unanimous:
        case Mechanism::Majority:
        case Mechanism::Plurality: {
            std::size_t best = 0;
            for (std::size_t i = 1; i < by_id.size(); ++i) {
                if (by_id[i].second > by_id[best].second) best = i;
            }
            return ballot::SingleChoice{by_id[best].first};
        }
        case Mechanism::Rated: {
            ballot::Rated b;
            for (const auto& [id, u] : by_id) {
                b.scores[id] = hi > lo ? 1 + static_cast<int>(std::lround(4.0 * (u - lo) / (hi - lo))) : 3;
            }
            return b;
        }
        case Mechanism::Ranked: {
            std::stable_sort(by_id.begin(), by_id.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            ballot::Ranked b;
            for (const auto& [id, u] : by_id) b.order.push_back(id);
            return b;
        }
        case Mechanism::Cumulative: {
            const double shift = lo < 0.0 ? lo : 0.0;
            double total = 0.0;
            for (const auto& [id, u] : by_id) total += u - shift;
            const double n = static_cast<double>(by_id.size());
            std::vector<double> share;
            for (const auto& [id, u] : by_id) share.push_back(total > 0.0 ? budget * (u - shift) / total : budget / n);
            if (integer_points) {
                const long long whole = std::llround(budget);
                std::vector<long long> floor_part;
                std::vector<std::size_t> order(share.size());
                long long assigned = 0;
                for (double s : share) {
                    floor_part.push_back(static_cast<long long>(std::floor(s)));
                    assigned += floor_part.back();
                }
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
                });
                for (std::size_t i = 0; assigned < whole && i < order.size(); ++i, ++assigned) ++floor_part[order[i]];
                for (std::size_t i = 0; i < share.size(); ++i) share[i] = static_cast<double>(floor_part[i]);
            }
            ballot::Cumulative b;
            for (std::size_t i = 0; i < by_id.size(); ++i) b.points[by_id[i].first] = share[i];
            return b;
        }
    }
    return ballot::Abstain{};
}

// ------------------------------------------------------------- reply parsing

namespace {

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Rewrites Python literals outside string literals.
std::string jsonify_literals(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool in_string = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < raw.size()) {
                out.push_back(raw[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
            out.push_back(c);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) && (i == 0 || !is_ident(raw[i - 1]))) {
            std::size_t j = i;
            while (j < raw.size() && is_ident(raw[j])) ++j;
            const std::string_view word = raw.substr(i, j - i);
            if (word == "None") {
                out += "null";
            } else if (word == "True") {
                out += "true";
            } else if (word == "False") {
                out += "false";
            } else {
                out.append(word);
            }
            i = j - 1;
            continue;
        }
        out.push_back(c);
    }
    return out;
}

std::size_t matching_brace(const std::string& s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::string::npos;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_none(const Json& v) {
    return v.is_null() || (v.is_string() && lower(trim(v.get<std::string>())) == "none");
}

/// 3, 3.0, "3" and "Proposal 3" all name proposal 3.
std::optional<ProposalId> as_proposal_id(const Json& v) {
    if (v.is_number_integer()) return v.get<ProposalId>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) return static_cast<ProposalId>(d);
        return std::nullopt;
    }
    if (!v.is_string()) return std::nullopt;
    const std::string s = v.get<std::string>();
    std::size_t first = s.find_first_of("0123456789");
    if (first == std::string::npos) return std::nullopt;
    std::size_t last = first;
    while (last < s.size() && std::isdigit(static_cast<unsigned char>(s[last]))) ++last;
    if (s.find_first_of("0123456789", last) != std::string::npos) return std::nullopt;
    ProposalId id = 0;
    auto [ptr, ec] = std::from_chars(s.data() + first, s.data() + last, id);
    if (ec != std::errc{}) return std::nullopt;
    return id;
}

ProposalId require_id(const Json& v) {
    auto id = as_proposal_id(v);
    if (!id) throw ReplyParseError("'" + v.dump() + "' does not name a proposal");
    return *id;
}

std::string text_of(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::optional<MessageAction> parse_message(const Json& obj, const std::vector<std::string>& names, AgentIndex self) {
    auto msg = obj.find("message");
    if (msg == obj.end()) throw ReplyParseError("message reply lacks \"message\"");
    if (is_none(*msg)) return std::nullopt;
    MessageAction action;
    action.text = text_of(*msg);
    if (trim(action.text).empty()) return std::nullopt;
    std::vector<std::string> requested;
    if (auto t = obj.find("target"); t != obj.end()) {
        if (t->is_array()) {
            for (const auto& x : *t) {
                if (x.is_string()) requested.push_back(trim(x.get<std::string>()));
            }
        } else if (t->is_string()) {
            requested.push_back(trim(t->get<std::string>()));
        }
    }
    for (const auto& name : requested) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto idx = static_cast<AgentIndex>(j);
            if (lower(names[j]) == lower(name) &&
                std::find(action.targets.begin(), action.targets.end(), idx) == action.targets.end()) {
                action.targets.push_back(idx);
            }
        }
    }
    if (action.targets.empty()) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (static_cast<AgentIndex>(j) != self) action.targets.push_back(static_cast<AgentIndex>(j));
        }
    }
    return action;
}

ProposalAction parse_proposal(const Json& obj) {
    auto reason = obj.find("reason_for_decision");
    auto proposal = obj.find("proposal");
    if (reason == obj.end() || proposal == obj.end()) {
        throw ReplyParseError("proposal reply needs \"reason_for_decision\" and \"proposal\"");
    }
    ProposalAction action;
    action.reasoning = text_of(*reason);
    if (!is_none(*proposal)) action.body = *proposal;
    return action;
}

BallotAction parse_ballot(const Json& obj, Mechanism mechanism) {
    auto decision = obj.find("decision");
    if (decision == obj.end()) throw ReplyParseError("voting reply lacks \"decision\"");
    BallotAction action;
    if (auto reason = obj.find("reason_for_decision"); reason != obj.end()) action.reasoning = text_of(*reason);
    const Json& d = *decision;
    if (is_none(d)) return action;
    switch (mechanism) {
        case Mechanism::Unanimous:
        case Mechanism::Majority:
        case Mechanism::Plurality: action.ballot = ballot::SingleChoice{require_id(d)}; break;
        case Mechanism::Rated: {
            if (!d.is_object()) throw ReplyParseError("rated decision must map proposal ids to scores");
            ballot::Rated b;
            for (const auto& [key, value] : d.items()) {
                if (!value.is_number() || value.get<double>() != std::floor(value.get<double>())) {
                    throw ReplyParseError("rated scores must be integers");
                }
                b.scores[require_id(Json(key))] = static_cast<int>(value.get<double>());
            }
            action.ballot = std::move(b);
            break;
        }
        case Mechanism::Ranked: {
            if (!d.is_array()) throw ReplyParseError("ranked decision must be a list of proposal ids");
            ballot::Ranked b;
            for (const auto& x : d) b.order.push_back(require_id(x));
            action.ballot = std::move(b);
            break;
        }
        case Mechanism::Cumulative: {
            if (!d.is_object()) throw ReplyParseError("cumulative decision must map proposal ids to points");
            ballot::Cumulative b;
            for (const auto& [key, value] : d.items()) {
                if (!value.is_number()) throw ReplyParseError("cumulative points must be numbers");
                b.points[require_id(Json(key))] = value.get<double>();
            }
            action.ballot = std::move(b);
            break;
        }
    }
    return action;
}

}  // namespace

std::optional<Json> extract_json_object(std::string_view raw) {
    const std::string text = jsonify_literals(raw);
    for (std::size_t open = text.find('{'); open != std::string::npos; open = text.find('{', open + 1)) {
        const std::size_t close = matching_brace(text, open);
        if (close == std::string::npos) continue;
        try {
            Json j = Json::parse(text.substr(open, close - open + 1));
            if (j.is_object()) return j;
        } catch (const Json::parse_error&) {
        }
    }
    return std::nullopt;
}

ParsedReply parse_agent_reply(Phase phase, Mechanism mechanism, std::string_view raw,
                              const std::vector<std::string>& agent_names, AgentIndex self) {
    const auto obj = extract_json_object(raw);
    if (!obj) throw ReplyParseError("no JSON object in reply");
    switch (phase) {
        case Phase::Message: return parse_message(*obj, agent_names, self);
        case Phase::Proposal: return parse_proposal(*obj);
        case Phase::Voting: return parse_ballot(*obj, mechanism);
    }
    throw ReplyParseError("unknown phase");
}

std::string serialize_action(Phase phase, Mechanism mechanism, const ParsedReply& action,
                             const std::vector<std::string>& agent_names) {
    nlohmann::ordered_json out;
    switch (phase) {
        case Phase::Message: {
            const auto& m = std::get<std::optional<MessageAction>>(action);
            out["target"] = nlohmann::ordered_json::array();
            if (!m) {
                out["message"] = "None";
                break;
            }
            for (AgentIndex t : m->targets) out["target"].push_back(agent_names.at(static_cast<std::size_t>(t)));
            out["message"] = m->text;
            break;
        }
        case Phase::Proposal: {
            const auto& p = std::get<ProposalAction>(action);
            out["reason_for_decision"] = p.reasoning;
            out["proposal"] = p.body ? nlohmann::ordered_json(*p.body) : nlohmann::ordered_json(nullptr);
            break;
        }
        case Phase::Voting: {
            const auto& b = std::get<BallotAction>(action);
            out["reason_for_decision"] = b.reasoning;
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, ballot::Abstain>) {
                        out["decision"] = "None";
                    } else if constexpr (std::is_same_v<T, ballot::SingleChoice>) {
                        out["decision"] = x.candidate ? nlohmann::ordered_json(*x.candidate)
                                                      : nlohmann::ordered_json("None");
                    } else if constexpr (std::is_same_v<T, ballot::Rated>) {
                        out["decision"] = nlohmann::ordered_json::object();
                        for (const auto& [id, s] : x.scores) out["decision"][std::to_string(id)] = s;
                    } else if constexpr (std::is_same_v<T, ballot::Ranked>) {
                        out["decision"] = x.order;
                    } else {
                        out["decision"] = nlohmann::ordered_json::object();
                        for (const auto& [id, p] : x.points) out["decision"][std::to_string(id)] = p;
                    }
                },
                b.ballot);
            (void)mechanism;
            break;
        }
    }
    return out.dump();
}

// --------------------------------------------------------------------- LLM

Json chat_request_json(const ChatRequest& request) {
    Json messages = Json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", request.model}, {"messages", std::move(messages)}, {"temperature", request.temperature}};
}

std::string HttpChatClient::complete(const ChatRequest& request) const {
    const Json reply = post_json(options_, "/v1/chat/completions", chat_request_json(request));
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception& e) {
        throw ProviderError(std::string("chat completion reply lacks choices[0].message.content: ") + e.what());
    }
}

namespace {

std::string number_text(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

std::string names_of(const Environment& env, const std::vector<AgentIndex>& agents) {
    std::string out;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (i) out += ", ";
        out += env.agent_name(agents[i]);
    }
    return out;
}

std::string ballot_text(const Ballot& b) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ballot::Abstain>) {
                return "None";
            } else if constexpr (std::is_same_v<T, ballot::SingleChoice>) {
                return x.candidate ? "Proposal " + std::to_string(*x.candidate) : "None";
            } else if constexpr (std::is_same_v<T, ballot::Rated>) {
                std::string s;
                for (const auto& [id, v] : x.scores) s += (s.empty() ? "" : ", ") + ("Proposal " + std::to_string(id)) + ": " + std::to_string(v);
                return s;
            } else if constexpr (std::is_same_v<T, ballot::Ranked>) {
                std::string s;
                for (auto id : x.order) s += (s.empty() ? "" : " > ") + ("Proposal " + std::to_string(id));
                return s;
            } else {
                std::string s;
                for (const auto& [id, v] : x.points) s += (s.empty() ? "" : ", ") + ("Proposal " + std::to_string(id)) + ": " + number_text(v);
                return s;
            }
        },
        b);
}

std::string candidates_text(const ContextView& view, const CandidateSlate& slate) {
    if (slate.empty()) return "None";
    std::string out;
    for (const auto& c : slate) {
        const Proposal& p = view.transcript.proposal(c.id);
        if (!out.empty()) out += "\n";
        out += "Proposal " + std::to_string(c.id) + " (round " + std::to_string(p.round) + ", proposed by " +
               names_of(view.env, p.authors) + (c.standing ? ", current result" : "") +
               "): " + view.env.describe(p.body);
        if (view.config.reasoning_visible) {
            for (const auto& rec : view.transcript.rounds) {
                for (const auto& e : rec.proposals) {
                    if (e.proposal == c.id && rec.round == p.round && !e.reasoning.empty()) {
                        out += "\n  Reasoning from " + view.env.agent_name(e.agent) + ": " + e.reasoning;
                    }
                }
            }
        }
    }
    return out;
}

const RoundRecord* completed_round(const ContextView& view, int round) {
    if (round < 1) return nullptr;
    for (const auto& rec : view.transcript.rounds) {
        if (rec.round == round) return &rec;
    }
    return nullptr;
}

}  // namespace

std::string render_initialization(const ContextView& view) {
    const int last = view.round - 1;
    const RoundRecord* prev = completed_round(view, last);
    TemplateVars vars;
    vars["my_name"] = view.env.agent_name(view.self);
    vars["task_description"] = view.env.task_description();
    vars["max_rounds"] = std::to_string(view.config.rounds);
    vars["my_agent_background"] = view.env.agent_background(view.self);
    vars["latest_candidates_round"] = std::to_string(last);
    vars["latest_candidates"] = prev ? candidates_text(view, prev->slate) : "None";
    vars["vote_history_length"] = std::to_string(last);
    if (prev && !prev->slate.empty()) {
        std::string votes;
        for (const auto& [agent, entry] : prev->ballots) {
            votes += view.env.agent_name(agent) + ": " + ballot_text(entry.ballot) + "\n";
        }
        votes += prev->outcome.selected ? "Result: Proposal " + std::to_string(*prev->outcome.selected) + " was selected."
                                        : "Result: no proposal was selected.";
        vars["latest_vote_history"] = votes;
    } else {
        vars["latest_vote_history"] = "None";
    }
    const auto standing = view.standing();
    if (standing) {
        int accepted_round = 0;
        for (const auto& a : view.transcript.accepted_history) {
            if (a.round <= last) accepted_round = a.round;
        }
        vars["latest_approved_proposal_id"] = std::to_string(*standing);
        vars["latest_approved_proposal_round"] = std::to_string(accepted_round);
        vars["latest_approved_proposal_detail"] = view.env.describe(view.transcript.proposal(*standing).body);
    } else {
        vars["latest_approved_proposal_id"] = "None";
        vars["latest_approved_proposal_round"] = "None";
        vars["latest_approved_proposal_detail"] = "None";
    }
    const int visible = view.phase == Phase::Message ? last : view.round;
    std::string history;
    for (const auto& rec : view.transcript.rounds) {
        if (rec.round > visible) break;
        history += (history.empty() ? "" : "\n") + std::string("Round ") + std::to_string(rec.round) + ":";
        for (const auto& m : rec.messages) {
            if (!m.message) continue;
            history += "\n" + view.env.agent_name(m.agent) + " to " + names_of(view.env, m.message->targets) + ": " +
                       m.message->text;
        }
    }
    vars["conversation_history_length"] = std::to_string(visible);
    vars["conversation_history"] = history.empty() ? "None" : history;
    return render_prompt(TemplateId::Initialization, vars, view.config.mechanism);
}

std::string render_phase_prompt(const ContextView& view) {
    TemplateVars vars;
    vars["my_name"] = view.env.agent_name(view.self);
    vars["round_num"] = std::to_string(view.round);
    switch (view.phase) {
        case Phase::Message: return render_prompt(TemplateId::MessagePhase, vars);
        case Phase::Proposal:
            vars["proposal_format_text"] = view.env.proposal_format_text();
            return render_prompt(TemplateId::ProposalPhase, vars);
        case Phase::Voting: {
            std::string list;
            if (view.slate) {
                for (const auto& c : *view.slate) {
                    list += (list.empty() ? "" : "\n") + ("Proposal " + std::to_string(c.id)) + ": " +
                            view.env.describe(view.transcript.proposal(c.id).body);
                }
            }
            vars["proposal_list"] = list.empty() ? "None" : list;
            vars["points"] = number_text(view.budget());
            return render_prompt(TemplateId::VotingPhase, vars, view.config.mechanism);
        }
    }
    throw TemplateError("unknown phase");
}

ParsedReply LlmPolicy::ask(const ContextView& view) const {
    ChatRequest request;
    request.model = model_;
    request.messages = {{"system", render_initialization(view)}, {"user", render_phase_prompt(view)}};
    std::string reply;
    try {
        reply = client_->complete(request);
    } catch (const ProviderError& e) {
        throw PolicyFailure(e.what());
    }
    std::vector<std::string> names;
    for (AgentIndex j = 0; j < view.env.agent_count(); ++j) names.push_back(view.env.agent_name(j));
    return parse_agent_reply(view.phase, view.config.mechanism, reply, names, view.self);
}

std::optional<MessageAction> LlmPolicy::decide_message(const ContextView& view) const {
    return std::get<std::optional<MessageAction>>(ask(view));
}

ProposalAction LlmPolicy::decide_proposal(const ContextView& view) const { return std::get<ProposalAction>(ask(view)); }

BallotAction LlmPolicy::decide_ballot(const ContextView& view) const { return std::get<BallotAction>(ask(view)); }

}  // namespace roundtable
