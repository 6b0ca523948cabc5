#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "roundtable/environment.hpp"
#include "roundtable/http.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

enum class Phase { Message, Proposal, Voting };

std::string_view to_string(Phase p);

/// Read-only snapshot handed to a policy. `transcript` holds every committed
/// phase; its last round record is the round in progress.
struct ContextView {
    const Environment& env;
    const EngineConfig& config;
    const Transcript& transcript;
    int round = 1;
    Phase phase = Phase::Message;
    AgentIndex self = 0;
    /// Voting phase only.
    const CandidateSlate* slate = nullptr;

    /// Latest accepted proposal before this round's vote.
    [[nodiscard]] std::optional<ProposalId> standing() const;
    [[nodiscard]] std::optional<ProposalId> own_latest() const;
    [[nodiscard]] std::map<AgentIndex, ProposalId> latest_proposals() const;
    [[nodiscard]] double budget() const;
};

struct MessageAction {
    std::vector<AgentIndex> targets;
    std::string text;
    friend bool operator==(const MessageAction&, const MessageAction&) = default;
};

struct ProposalAction {
    std::optional<Json> body;  // nullopt = skip
    std::string reasoning;
    friend bool operator==(const ProposalAction&, const ProposalAction&) = default;
};

struct BallotAction {
    Ballot ballot = ballot::Abstain{};
    std::string reasoning;
    friend bool operator==(const BallotAction&, const BallotAction&) = default;
};

/// Thrown by a policy that could not produce an action; the engine retries.
class PolicyFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// f_p, f_v and messaging. Implementations must be callable concurrently
/// from several threads and must not keep mutable state between calls.
class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;
    [[nodiscard]] virtual std::string kind() const = 0;
    /// nullopt = stay silent this round.
    [[nodiscard]] virtual std::optional<MessageAction> decide_message(const ContextView& view) const = 0;
    [[nodiscard]] virtual ProposalAction decide_proposal(const ContextView& view) const = 0;
    [[nodiscard]] virtual BallotAction decide_ballot(const ContextView& view) const = 0;
};

// ------------------------------------------------------------------ scripted

enum class ScriptedKind { Selfish, EvenSplit, Concessive, RandomSeeded };

std::string_view to_string(ScriptedKind k);
ScriptedKind parse_scripted_kind(std::string_view name);

struct ScriptedSpec {
    ScriptedKind kind = ScriptedKind::Selfish;
    double lambda = 0.5;  // Concessive only, in (0, 1]
};

/// Deterministic stand-in for an LLM agent. Every choice derives from the
/// view and the seed; nothing is remembered between calls.
class ScriptedPolicy final : public AgentPolicy {
public:
    ScriptedPolicy(ScriptedSpec spec, std::uint64_t seed);

    [[nodiscard]] std::string kind() const override;
    [[nodiscard]] std::optional<MessageAction> decide_message(const ContextView& view) const override;
    [[nodiscard]] ProposalAction decide_proposal(const ContextView& view) const override;
    [[nodiscard]] BallotAction decide_ballot(const ContextView& view) const override;

    [[nodiscard]] const ScriptedSpec& spec() const { return spec_; }

private:
    [[nodiscard]] std::uint64_t stream(const ContextView& view) const;

    ScriptedSpec spec_;
    std::uint64_t seed_;
};

/// Utility-driven ballot. SingleChoice is the argmax (lowest id on ties);
/// Rated maps utilities min-max onto 1..5 (all equal: 3); Ranked sorts by
/// descending utility, ties by id; Cumulative splits the budget in proportion
/// to utility (all zero: evenly). Negative utilities are shifted so the worst
/// candidate gets nothing. A non-finite utility yields Abstain. With
/// `integer_points` the cumulative split is rounded by largest remainder.
Ballot scripted_ballot(const std::vector<std::pair<ProposalId, double>>& utilities, Mechanism mechanism,
                       double budget, bool integer_points = false);

// ------------------------------------------------------------- reply parsing

class ReplyParseError : public PolicyFailure {
public:
    using PolicyFailure::PolicyFailure;
};

using ParsedReply = std::variant<std::optional<MessageAction>, ProposalAction, BallotAction>;

/// Extracts the first balanced {...} block that parses as JSON (bare None,
/// True and False outside strings are accepted) and maps it onto the phase's
/// action. "None" decisions become skip or Abstain; unknown target names are
/// dropped and an empty target list addresses everyone else. Throws
/// ReplyParseError when nothing usable is found.
ParsedReply parse_agent_reply(Phase phase, Mechanism mechanism, std::string_view raw,
                              const std::vector<std::string>& agent_names, AgentIndex self = 0);

/// Reply text that parse_agent_reply maps back to `action`.
std::string serialize_action(Phase phase, Mechanism mechanism, const ParsedReply& action,
                             const std::vector<std::string>& agent_names);

/// First balanced-brace block of `raw` that parses, after None/True/False
/// rewriting. nullopt when there is none.
std::optional<Json> extract_json_object(std::string_view raw);

// --------------------------------------------------------------------- LLM

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
};

inline constexpr const char* kDefaultModel = "gpt-4o-mini-2024-07-18";

class ChatClient {
public:
    virtual ~ChatClient() = default;
    /// Reply text. Throws ProviderError. Must be safe to call concurrently.
    [[nodiscard]] virtual std::string complete(const ChatRequest& request) const = 0;
};

/// POST {base}/v1/chat/completions; reads choices[0].message.content.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(HttpOptions options) : options_(std::move(options)) {}
    [[nodiscard]] std::string complete(const ChatRequest& request) const override;

private:
    HttpOptions options_;
};

Json chat_request_json(const ChatRequest& request);

/// System prompt: the initialization template filled from the view.
std::string render_initialization(const ContextView& view);
/// User prompt for the view's phase.
std::string render_phase_prompt(const ContextView& view);

class LlmPolicy final : public AgentPolicy {
public:
    LlmPolicy(std::shared_ptr<const ChatClient> client, std::string model = kDefaultModel)
        : client_(std::move(client)), model_(std::move(model)) {}

    [[nodiscard]] std::string kind() const override { return "llm"; }
    [[nodiscard]] std::optional<MessageAction> decide_message(const ContextView& view) const override;
    [[nodiscard]] ProposalAction decide_proposal(const ContextView& view) const override;
    [[nodiscard]] BallotAction decide_ballot(const ContextView& view) const override;

private:
    [[nodiscard]] ParsedReply ask(const ContextView& view) const;

    std::shared_ptr<const ChatClient> client_;
    std::string model_;
};

}  // namespace roundtable
