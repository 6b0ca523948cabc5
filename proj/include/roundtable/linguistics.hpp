#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "roundtable/agents.hpp"
#include "roundtable/parallel.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

// ------------------------------------------------------------------ surface

/// Whitespace-delimited tokens (ASCII space, tab, CR, LF, VT, FF).
int word_count(std::string_view text);
/// Vowel groups over a-z plus y, minus one for a silent trailing e when
/// more than one group was found; at least 1.
int syllable_count(std::string_view word);
/// Runs of '.', '!' or '?'; at least 1.
int sentence_count(std::string_view text);
/// 0.39 W/S + 11.8 Syl/W - 15.59. Throws std::invalid_argument without words.
double fk_grade(std::string_view text);

// --------------------------------------------------------------- embeddings

using Embedding = std::vector<double>;

class Embedder {
public:
    virtual ~Embedder() = default;
    [[nodiscard]] virtual std::string id() const = 0;
    /// Unit-norm vectors, one per input. Safe to call concurrently.
    [[nodiscard]] virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) const = 0;
};

/// Hashes lowercase alphanumeric tokens (FNV-1a) into `dimension` buckets,
/// counts them and L2-normalizes. Text without tokens maps to e_0.
class StubEmbedder final : public Embedder {
public:
    explicit StubEmbedder(int dimension = 256) : dimension_(dimension) {}
    [[nodiscard]] std::string id() const override { return "stub-" + std::to_string(dimension_); }
    [[nodiscard]] std::vector<Embedding> embed(const std::vector<std::string>& texts) const override;
    [[nodiscard]] Embedding embed_one(std::string_view text) const;
    [[nodiscard]] int dimension() const { return dimension_; }

private:
    int dimension_;
};

/// POST {base}/v1/embeddings {model, input[]}; reads data[i].embedding.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpOptions options, std::string model) : options_(std::move(options)), model_(std::move(model)) {}
    [[nodiscard]] std::string id() const override { return model_; }
    [[nodiscard]] std::vector<Embedding> embed(const std::vector<std::string>& texts) const override;

private:
    HttpOptions options_;
    std::string model_;
};

void normalize(Embedding& v);
double cosine(const Embedding& a, const Embedding& b);

/// Mean over `current` of 1 - cos(v, c), c the renormalized centroid of
/// `previous`. nullopt when either side is empty. In [0, 2].
std::optional<double> info_difference(const std::vector<Embedding>& current, const std::vector<Embedding>& previous);

// ------------------------------------------------------------ dialogue acts

enum class DialogueAct {
    Inform,
    Request,
    Confirm,
    Summarize,
    Evaluate,
    Propose,
    Compromise,
    Defend,
    Accept,
    Decline,
    Others,
    Start,
    End,
};

inline constexpr DialogueAct kContentActs[] = {
    DialogueAct::Inform,  DialogueAct::Request,    DialogueAct::Confirm, DialogueAct::Summarize,
    DialogueAct::Evaluate, DialogueAct::Propose,   DialogueAct::Compromise, DialogueAct::Defend,
    DialogueAct::Accept,  DialogueAct::Decline,    DialogueAct::Others,
};

std::string_view to_string(DialogueAct a);
/// Case-insensitive over the eleven content labels.
std::optional<DialogueAct> parse_dialogue_act(std::string_view name);

using ActSet = std::set<DialogueAct>;

/// Comma, semicolon or newline separated labels; unknown ones are ignored and
/// an answer with no known label is {Others}.
ActSet parse_act_list(std::string_view answer);

struct LabelRequest {
    std::string speaker;
    std::string message;
    /// Messages of the previous round, one "Name: text" per line, or "None".
    std::string previous_round;
};

class DialogueActLabeler {
public:
    virtual ~DialogueActLabeler() = default;
    [[nodiscard]] virtual std::string id() const = 0;
    /// Throws on provider failure.
    [[nodiscard]] virtual ActSet label(const LabelRequest& request) const = 0;
};

/// Keyword rules over word stems; {Others} when nothing matches.
class StubLabeler final : public DialogueActLabeler {
public:
    [[nodiscard]] std::string id() const override { return "stub"; }
    [[nodiscard]] ActSet label(const LabelRequest& request) const override;
};

class LlmLabeler final : public DialogueActLabeler {
public:
    LlmLabeler(std::shared_ptr<const ChatClient> client, std::string model = kDefaultModel)
        : client_(std::move(client)), model_(std::move(model)) {}
    [[nodiscard]] std::string id() const override { return "llm:" + model_; }
    [[nodiscard]] ActSet label(const LabelRequest& request) const override;

private:
    std::shared_ptr<const ChatClient> client_;
    std::string model_;
};

/// Labeler failure is {Others} plus a line in `warnings`.
ActSet label_dialogue_acts(const LabelRequest& request, const DialogueActLabeler& labeler,
                           std::vector<std::string>* warnings = nullptr);

/// Labels keyed by (simulation, round, agent). When backed by a file every
/// new label is appended as one JSON line. Thread-safe.
class LabelCache {
public:
    LabelCache() = default;
    explicit LabelCache(std::filesystem::path file);

    [[nodiscard]] std::optional<ActSet> find(const std::string& sim, int round, AgentIndex agent) const;
    void insert(const std::string& sim, int round, AgentIndex agent, const ActSet& acts);
    [[nodiscard]] std::size_t size() const;

private:
    using Key = std::tuple<std::string, int, AgentIndex>;
    mutable std::mutex mutex_;
    std::map<Key, ActSet> labels_;
    std::optional<std::filesystem::path> file_;
};

/// Acts per round and agent of one simulation; agents that sent no message
/// have an empty set and spoke = false.
struct LabeledSimulation {
    std::string id;
    int rounds = 0;
    int agents = 0;
    std::vector<std::vector<ActSet>> acts;   // [round - 1][agent]
    std::vector<std::vector<bool>> spoke;    // [round - 1][agent]
};

LabeledSimulation label_transcript(const Transcript& t, const std::string& sim_id, const DialogueActLabeler& labeler,
                                   LabelCache* cache = nullptr, std::vector<std::string>* warnings = nullptr);

// -------------------------------------------------------- transition graph

/// Existence counts each (s, r, i) once when some j != i has B at r;
/// Tuples counts every qualifying (s, r, i, j).
enum class PairCounting { Existence, Tuples };

using ActPair = std::pair<DialogueAct, DialogueAct>;

struct TransitionGraph {
    std::map<ActPair, long long> numerator;
    /// |A|: (s, r, i) with A at r - 1, r in 1..R+1.
    std::map<DialogueAct, long long> occurrences;
    std::map<ActPair, double> probability;
};

/// Virtual Start at round 0 and End at round R+1 for every agent. Throws
/// std::invalid_argument when an agent that spoke has no label.
TransitionGraph transition_graph(const std::vector<LabeledSimulation>& sims,
                                 PairCounting counting = PairCounting::Existence);

struct Edge {
    DialogueAct from;
    DialogueAct to;
    double probability;
};

/// Per source act, its most probable non-self edge; ties go to the
/// lexicographically smaller target name.
std::vector<Edge> most_probable_edges(const TransitionGraph& graph);

std::string transition_dot(const TransitionGraph& graph);
std::string transition_csv(const TransitionGraph& graph);

// ------------------------------------------------------------ round features

struct RoundFeatures {
    int round = 0;
    int messages = 0;
    std::optional<double> mean_words;
    std::optional<double> mean_fk;
    std::optional<double> info_difference;  // rounds >= 2
};

std::vector<RoundFeatures> round_features(const Transcript& t, const Embedder& embedder);

/// Share of messages carrying each content act, per round (index r - 1).
std::vector<std::map<DialogueAct, double>> act_ratios(const std::vector<LabeledSimulation>& sims);

}  // namespace roundtable
