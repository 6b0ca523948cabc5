#include "roundtable/linguistics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roundtable/prompts.hpp"

namespace roundtable {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }
char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) words.push_back(text.substr(start, i - start));
    }
    return words;
}

}  // namespace

int word_count(std::string_view text) { return static_cast<int>(split_words(text).size()); }

int syllable_count(std::string_view word) {
    std::string letters;
    for (char c : word) {
        const char l = ascii_lower(c);
        if (l >= 'a' && l <= 'z') letters.push_back(l);
    }
    int groups = 0;
    bool in_group = false;
    for (char c : letters) {
        const bool v = is_vowel(c);
        if (v && !in_group) ++groups;
        in_group = v;
    }
    if (groups > 1 && letters.back() == 'e') --groups;
    return std::max(groups, 1);
}

int sentence_count(std::string_view text) {
    int runs = 0;
    bool in_run = false;
    for (char c : text) {
        const bool t = c == '.' || c == '!' || c == '?';
        if (t && !in_run) ++runs;
        in_run = t;
    }
    return std::max(runs, 1);
}

double fk_grade(std::string_view text) {
    const auto words = split_words(text);
    if (words.empty()) throw std::invalid_argument("Flesch-Kincaid grade needs at least one word");
    int syllables = 0;
    for (auto w : words) syllables += syllable_count(w);
    const double W = static_cast<double>(words.size());
    return 0.39 * (W / sentence_count(text)) + 11.8 * (syllables / W) - 15.59;
}

// --------------------------------------------------------------- embeddings

void normalize(Embedding& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0.0) {
        for (double& x : v) x /= n;
    }
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

Embedding StubEmbedder::embed_one(std::string_view text) const {
    Embedding v(static_cast<std::size_t>(dimension_), 0.0);
    std::size_t i = 0;
    bool any = false;
    while (i < text.size()) {
        while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        std::uint64_t h = 0xcbf29ce484222325ULL;
        bool token = false;
        while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) {
            h ^= static_cast<unsigned char>(ascii_lower(text[i]));
            h *= 0x100000001b3ULL;
            token = true;
            ++i;
        }
        if (token) {
            v[h % static_cast<std::uint64_t>(dimension_)] += 1.0;
            any = true;
        }
    }
    if (!any) v[0] = 1.0;
    normalize(v);
    return v;
}

std::vector<Embedding> StubEmbedder::embed(const std::vector<std::string>& texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

std::vector<Embedding> HttpEmbedder::embed(const std::vector<std::string>& texts) const {
    if (texts.empty()) return {};
    const Json reply = post_json(options_, "/v1/embeddings", {{"model", model_}, {"input", texts}});
    std::vector<Embedding> out(texts.size());
    try {
        const Json& data = reply.at("data");
        if (data.size() != texts.size()) throw ProviderError("embedding reply has the wrong number of vectors");
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t slot = data[i].contains("index") ? data[i].at("index").get<std::size_t>() : i;
            if (slot >= out.size()) throw ProviderError("embedding reply index out of range");
            out[slot] = data[i].at("embedding").get<Embedding>();
            normalize(out[slot]);
        }
    } catch (const Json::exception& e) {
        throw ProviderError(std::string("malformed embedding reply: ") + e.what());
    }
    return out;
}

std::optional<double> info_difference(const std::vector<Embedding>& current, const std::vector<Embedding>& previous) {
    if (current.empty() || previous.empty()) return std::nullopt;
    Embedding centroid(previous.front().size(), 0.0);
    for (const auto& v : previous) {
        if (v.size() != centroid.size()) throw std::invalid_argument("embedding dimensions differ");
        for (std::size_t i = 0; i < v.size(); ++i) centroid[i] += v[i];
    }
    normalize(centroid);
    double sum = 0.0;
    for (const auto& v : current) sum += 1.0 - cosine(v, centroid);
    return sum / static_cast<double>(current.size());
}

// ------------------------------------------------------------ dialogue acts

std::string_view to_string(DialogueAct a) {
    switch (a) {
        case DialogueAct::Inform: return "Inform";
        case DialogueAct::Request: return "Request";
        case DialogueAct::Confirm: return "Confirm";
        case DialogueAct::Summarize: return "Summarize";
        case DialogueAct::Evaluate: return "Evaluate";
        case DialogueAct::Propose: return "Propose";
        case DialogueAct::Compromise: return "Compromise";
        case DialogueAct::Defend: return "Defend";
        case DialogueAct::Accept: return "Accept";
        case DialogueAct::Decline: return "Decline";
        case DialogueAct::Others: return "Others";
        case DialogueAct::Start: return "Start";
        case DialogueAct::End: return "End";
    }
    return "?";
}

std::optional<DialogueAct> parse_dialogue_act(std::string_view name) {
    std::string want;
    for (char c : name) want.push_back(ascii_lower(c));
    if (want == "other") want = "others";
    for (DialogueAct a : kContentActs) {
        std::string have;
        for (char c : to_string(a)) have.push_back(ascii_lower(c));
        if (have == want) return a;
    }
    return std::nullopt;
}

ActSet parse_act_list(std::string_view answer) {
    ActSet acts;
    std::string token;
    auto flush = [&] {
        std::size_t b = 0, e = token.size();
        auto junk = [](char c) { return !std::isalpha(static_cast<unsigned char>(c)); };
        while (b < e && junk(token[b])) ++b;
        while (e > b && junk(token[e - 1])) --e;
        if (auto a = parse_dialogue_act(std::string_view(token).substr(b, e - b))) acts.insert(*a);
        token.clear();
    };
    for (char c : answer) {
        if (c == ',' || c == ';' || c == '\n') {
            flush();
        } else {
            token.push_back(c);
        }
    }
    flush();
    if (acts.empty()) acts.insert(DialogueAct::Others);
    return acts;
}

ActSet StubLabeler::label(const LabelRequest& request) const {
    struct Rule {
        DialogueAct act;
        std::vector<std::string_view> stems;
    };
    static const std::vector<Rule> rules = {
        {DialogueAct::Propose, {"propos", "suggest", "offer"}},
        {DialogueAct::Compromise, {"compromis", "willing", "middle", "meet"}},
        {DialogueAct::Accept, {"accept", "agree", "fine", "deal"}},
        {DialogueAct::Decline, {"declin", "reject", "disagree", "refus", "unacceptable"}},
        {DialogueAct::Confirm, {"confirm", "verify", "correct"}},
        {DialogueAct::Summarize, {"summar", "overall", "recap"}},
        {DialogueAct::Evaluate, {"fair", "think", "better", "worse", "unfair"}},
        {DialogueAct::Defend, {"insist", "maintain", "still", "keep"}},
        {DialogueAct::Inform, {"value", "average", "rated", "data", "current", "nothing"}},
    };
    ActSet acts;
    for (auto word : split_words(request.message)) {
        std::string w;
        for (char c : word) {
            const char l = ascii_lower(c);
            if (l >= 'a' && l <= 'z') w.push_back(l);
        }
        if (w.empty()) continue;
        for (const auto& rule : rules) {
            for (auto stem : rule.stems) {
                if (w.compare(0, stem.size(), stem) == 0) acts.insert(rule.act);
            }
        }
    }
    if (request.message.find('?') != std::string::npos) acts.insert(DialogueAct::Request);
    if (acts.empty()) acts.insert(DialogueAct::Others);
    return acts;
}

ActSet LlmLabeler::label(const LabelRequest& request) const {
    const std::string prompt = render_template(TemplateId::DialogueActLabeling, {{"previous_round", request.previous_round},
                                                                                 {"speaker", request.speaker},
                                                                                 {"message", request.message}});
    ChatRequest chat{model_, {{"user", prompt}}, 0.0};
    return parse_act_list(client_->complete(chat));
}

ActSet label_dialogue_acts(const LabelRequest& request, const DialogueActLabeler& labeler,
                           std::vector<std::string>* warnings) {
    try {
        ActSet acts = labeler.label(request);
        for (DialogueAct a : {DialogueAct::Start, DialogueAct::End}) acts.erase(a);
        if (acts.empty()) acts.insert(DialogueAct::Others);
        return acts;
    } catch (const std::exception& e) {
        if (warnings) warnings->push_back("labeler " + labeler.id() + " failed for " + request.speaker + ": " + e.what());
        return {DialogueAct::Others};
    }
}

LabelCache::LabelCache(std::filesystem::path file) : file_(std::move(file)) {
    std::ifstream in(*file_);
    std::string line;
    int n = 0;
    while (in && std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const Json j = Json::parse(line);
            ActSet acts;
            for (const auto& a : j.at("acts")) {
                auto act = parse_dialogue_act(a.get<std::string>());
                if (!act) throw std::invalid_argument("unknown act " + a.dump());
                acts.insert(*act);
            }
            labels_[{j.at("sim").get<std::string>(), j.at("round").get<int>(), j.at("agent").get<int>()}] = acts;
        } catch (const std::exception& e) {
            throw std::runtime_error(file_->string() + ":" + std::to_string(n) + ": bad label record: " + e.what());
        }
    }
}

std::optional<ActSet> LabelCache::find(const std::string& sim, int round, AgentIndex agent) const {
    std::lock_guard lock(mutex_);
    auto it = labels_.find({sim, round, agent});
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

void LabelCache::insert(const std::string& sim, int round, AgentIndex agent, const ActSet& acts) {
    std::lock_guard lock(mutex_);
    labels_.insert_or_assign({sim, round, agent}, acts);
    if (!file_) return;
    nlohmann::ordered_json j;
    j["sim"] = sim;
    j["round"] = round;
    j["agent"] = agent;
    j["acts"] = nlohmann::ordered_json::array();
    for (DialogueAct a : acts) j["acts"].push_back(std::string(to_string(a)));
    std::ofstream out(*file_, std::ios::app);
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("cannot append to label cache " + file_->string());
}

std::size_t LabelCache::size() const {
    std::lock_guard lock(mutex_);
    return labels_.size();
}

LabeledSimulation label_transcript(const Transcript& t, const std::string& sim_id, const DialogueActLabeler& labeler,
                                   LabelCache* cache, std::vector<std::string>* warnings) {
    LabeledSimulation sim;
    sim.id = sim_id;
    sim.rounds = static_cast<int>(t.rounds.size());
    sim.agents = t.config.agents;
    auto name = [&](AgentIndex a) {
        return static_cast<std::size_t>(a) < t.agents.size() ? t.agents[static_cast<std::size_t>(a)].name
                                                            : "A" + std::to_string(a + 1);
    };
    std::string previous = "None";
    for (const auto& rec : t.rounds) {
        std::vector<ActSet> acts(static_cast<std::size_t>(sim.agents));
        std::vector<bool> spoke(static_cast<std::size_t>(sim.agents), false);
        std::string current;
        for (const auto& m : rec.messages) {
            if (!m.message) continue;
            const auto slot = static_cast<std::size_t>(m.agent);
            spoke[slot] = true;
            std::optional<ActSet> cached = cache ? cache->find(sim_id, rec.round, m.agent) : std::nullopt;
            if (cached) {
                acts[slot] = *cached;
            } else {
                acts[slot] = label_dialogue_acts({name(m.agent), m.message->text, previous}, labeler, warnings);
                if (cache) cache->insert(sim_id, rec.round, m.agent, acts[slot]);
            }
            current += (current.empty() ? "" : "\n") + name(m.agent) + ": " + m.message->text;
        }
        previous = current.empty() ? "None" : current;
        sim.acts.push_back(std::move(acts));
        sim.spoke.push_back(std::move(spoke));
    }
    return sim;
}

// -------------------------------------------------------- transition graph

TransitionGraph transition_graph(const std::vector<LabeledSimulation>& sims, PairCounting counting) {
    TransitionGraph g;
    for (const auto& s : sims) {
        if (static_cast<int>(s.acts.size()) != s.rounds) throw std::invalid_argument("simulation " + s.id + " has ragged rounds");
        for (int r = 0; r < s.rounds; ++r) {
            for (int i = 0; i < s.agents; ++i) {
                const bool spoke = r < static_cast<int>(s.spoke.size()) && s.spoke[r][i];
                if (spoke && s.acts[r][i].empty()) {
                    throw std::invalid_argument("simulation " + s.id + " round " + std::to_string(r + 1) + " agent " +
                                                std::to_string(i) + " has an unlabeled message");
                }
            }
        }
        // Round 0 is Start for everyone, round R+1 End for everyone.
        auto acts_at = [&](int round, int agent) -> ActSet {
            if (round == 0) return {DialogueAct::Start};
            if (round == s.rounds + 1) return {DialogueAct::End};
            return s.acts[static_cast<std::size_t>(round - 1)][static_cast<std::size_t>(agent)];
        };
        for (int r = 1; r <= s.rounds + 1; ++r) {
            for (int i = 0; i < s.agents; ++i) {
                const ActSet before = acts_at(r - 1, i);
                for (DialogueAct a : before) {
                    ++g.occurrences[a];
                    std::map<DialogueAct, long long> hits;
                    for (int j = 0; j < s.agents; ++j) {
                        if (j == i) continue;
                        for (DialogueAct b : acts_at(r, j)) ++hits[b];
                    }
                    for (const auto& [b, n] : hits) g.numerator[{a, b}] += counting == PairCounting::Existence ? 1 : n;
                }
            }
        }
    }
    for (const auto& [pair, n] : g.numerator) {
        g.probability[pair] = static_cast<double>(n) / static_cast<double>(g.occurrences.at(pair.first));
    }
    return g;
}

std::vector<Edge> most_probable_edges(const TransitionGraph& graph) {
    std::map<DialogueAct, Edge> best;
    for (const auto& [pair, p] : graph.probability) {
        if (pair.first == pair.second) continue;
        auto it = best.find(pair.first);
        if (it == best.end()) {
            best.emplace(pair.first, Edge{pair.first, pair.second, p});
        } else if (p > it->second.probability ||
                   (p == it->second.probability && to_string(pair.second) < to_string(it->second.to))) {
            it->second = Edge{pair.first, pair.second, p};
        }
    }
    std::vector<Edge> out;
    for (const auto& [from, e] : best) out.push_back(e);
    return out;
}

namespace {
std::string fixed(double v, int decimals) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << v;
    return out.str();
}
}  // namespace

std::string transition_dot(const TransitionGraph& graph) {
    std::ostringstream out;
    out << "digraph transitions {\n  rankdir=LR;\n";
    for (const auto& [act, n] : graph.occurrences) out << "  \"" << to_string(act) << "\" [label=\"" << to_string(act) << " (" << n << ")\"];\n";
    for (const auto& e : most_probable_edges(graph)) {
        out << "  \"" << to_string(e.from) << "\" -> \"" << to_string(e.to) << "\" [label=\"" << fixed(e.probability, 3)
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string transition_csv(const TransitionGraph& graph) {
    std::ostringstream out;
    out << "from,to,count,occurrences,probability\n";
    for (const auto& [pair, p] : graph.probability) {
        out << to_string(pair.first) << ',' << to_string(pair.second) << ',' << graph.numerator.at(pair) << ','
            << graph.occurrences.at(pair.first) << ',' << fixed(p, 9) << '\n';
    }
    return out.str();
}

// ------------------------------------------------------------ round features

std::vector<RoundFeatures> round_features(const Transcript& t, const Embedder& embedder) {
    std::vector<std::string> texts;
    std::vector<std::vector<std::size_t>> by_round;
    for (const auto& rec : t.rounds) {
        by_round.emplace_back();
        for (const auto& m : rec.messages) {
            if (!m.message) continue;
            by_round.back().push_back(texts.size());
            texts.push_back(m.message->text);
        }
    }
    const std::vector<Embedding> vectors = embedder.embed(texts);
    std::vector<RoundFeatures> out;
    for (std::size_t r = 0; r < t.rounds.size(); ++r) {
        RoundFeatures f;
        f.round = t.rounds[r].round;
        f.messages = static_cast<int>(by_round[r].size());
        double words = 0.0, fk = 0.0;
        int fk_n = 0;
        for (std::size_t idx : by_round[r]) {
            const int w = word_count(texts[idx]);
            words += w;
            if (w > 0) {
                fk += fk_grade(texts[idx]);
                ++fk_n;
            }
        }
        if (f.messages > 0) f.mean_words = words / f.messages;
        if (fk_n > 0) f.mean_fk = fk / fk_n;
        if (r > 0) {
            std::vector<Embedding> cur, prev;
            for (std::size_t idx : by_round[r]) cur.push_back(vectors[idx]);
            for (std::size_t idx : by_round[r - 1]) prev.push_back(vectors[idx]);
            f.info_difference = info_difference(cur, prev);
        }
        out.push_back(f);
    }
    return out;
}

std::vector<std::map<DialogueAct, double>> act_ratios(const std::vector<LabeledSimulation>& sims) {
    int rounds = 0;
    for (const auto& s : sims) rounds = std::max(rounds, s.rounds);
    std::vector<std::map<DialogueAct, double>> out(static_cast<std::size_t>(rounds));
    std::vector<long long> messages(static_cast<std::size_t>(rounds), 0);
    for (const auto& s : sims) {
        for (int r = 0; r < s.rounds; ++r) {
            for (int i = 0; i < s.agents; ++i) {
                if (!s.spoke[r][i]) continue;
                ++messages[r];
                for (DialogueAct a : s.acts[r][i]) out[r][a] += 1.0;
            }
        }
    }
    for (int r = 0; r < rounds; ++r) {
        for (DialogueAct a : kContentActs) {
            out[r][a] = messages[r] > 0 ? out[r][a] / static_cast<double>(messages[r]) : 0.0;
        }
    }
    return out;
}

}  // namespace roundtable
