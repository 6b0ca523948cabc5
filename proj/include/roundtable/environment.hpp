#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roundtable/proposal.hpp"
#include "roundtable/random.hpp"
#include "roundtable/social_choice.hpp"

namespace roundtable {

/// What a scripted agent talks about in the message phase.
struct MessageHint {
    int round = 1;
    std::string stance;  // policy kind, e.g. "selfish"
    const ProposalBody* own_latest = nullptr;
    const ProposalBody* standing = nullptr;
};

/// A task the agents decide on. Implementations are immutable after
/// construction and safe to share across threads.
class Environment {
public:
    virtual ~Environment() = default;

    [[nodiscard]] virtual std::string id() const = 0;
    [[nodiscard]] virtual int agent_count() const = 0;
    [[nodiscard]] virtual std::string agent_name(AgentIndex agent) const = 0;

    /// Task description shown to every agent.
    [[nodiscard]] virtual std::string task_description() const = 0;
    /// Private goal and data for one agent.
    [[nodiscard]] virtual std::string agent_background(AgentIndex agent) const = 0;
    /// Shape of the "proposal" field requested in the proposal prompt.
    [[nodiscard]] virtual std::string proposal_format_text() const = 0;

    /// Normalizes a raw proposal payload. Returns nullopt and sets `why` when
    /// the payload is malformed or infeasible.
    [[nodiscard]] virtual std::optional<ProposalBody> canonicalize(const Json& raw, std::string* why) const = 0;
    /// Human-readable body for prompts.
    [[nodiscard]] virtual std::string describe(const ProposalBody& body) const = 0;

    /// Outcome standing before any proposal is accepted, if the task has one.
    [[nodiscard]] virtual std::optional<ProposalBody> initial_state() const = 0;

    // Hooks for the scripted policies.
    /// The agent's private preference over bodies; larger is better.
    [[nodiscard]] virtual double utility(AgentIndex agent, const ProposalBody& body) const = 0;
    [[nodiscard]] virtual ProposalBody selfish_proposal(AgentIndex agent) const = 0;
    [[nodiscard]] virtual ProposalBody neutral_proposal() const = 0;
    /// Moves `lambda` of the way from `from` toward the mean of `toward`.
    [[nodiscard]] virtual ProposalBody blend(const ProposalBody& from, const std::vector<ProposalBody>& toward,
                                             double lambda) const = 0;
    [[nodiscard]] virtual ProposalBody random_proposal(Rng& rng) const = 0;
    [[nodiscard]] virtual std::string scripted_message(AgentIndex agent, const MessageHint& hint) const = 0;
};

}  // namespace roundtable
