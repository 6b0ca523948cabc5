#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/proposal.hpp"
#include "roundtable/social_choice.hpp"

namespace roundtable {

struct EngineConfig {
    int rounds = 10;
    int agents = 3;
    Mechanism mechanism = Mechanism::Majority;
    std::string environment = "economy";
    /// Utility-set preset name for the economy, task id for the rating task.
    std::string utility_set = "AsymmetricLiteral";
    std::uint64_t seed = 0;
    /// Attempts per policy query before the action degrades to skip/abstain.
    int max_attempts = 3;
    /// Share proposal reasoning with the other agents.
    bool reasoning_visible = false;
    TallyOptions tally;

    /// Every violated constraint, not just the first.
    [[nodiscard]] std::vector<std::string> validate() const;
};

struct AgentInfo {
    AgentIndex index = 0;
    std::string name;
    std::string policy;
};

struct Message {
    AgentIndex sender = 0;
    std::vector<AgentIndex> targets;
    std::string text;
};

enum class ActionStatus { Ok, Skipped, Failed, Rejected };

std::string_view to_string(ActionStatus s);
ActionStatus parse_action_status(std::string_view s);

struct MessageEntry {
    AgentIndex agent = 0;
    ActionStatus status = ActionStatus::Ok;
    std::optional<Message> message;
};

struct ProposalEntry {
    AgentIndex agent = 0;
    ActionStatus status = ActionStatus::Skipped;
    std::optional<ProposalId> proposal;
    /// Stored with the record; hidden from other agents unless the run shares reasoning.
    std::string reasoning;
};

struct BallotEntry {
    ActionStatus action = ActionStatus::Ok;
    Ballot ballot = ballot::Abstain{};
    BallotStatus status = BallotStatus::Abstained;
    std::string disqualify_reason;
    std::string reasoning;
};

struct Proposal {
    ProposalId id = 0;
    int round = 0;
    /// Agents that submitted this body in its creation round.
    std::vector<AgentIndex> authors;
    ProposalBody body;
};

struct RoundRecord {
    int round = 0;
    std::vector<MessageEntry> messages;    // one per agent, ascending
    std::vector<ProposalEntry> proposals;  // one per agent, ascending
    CandidateSlate slate;
    std::map<AgentIndex, BallotEntry> ballots;
    Outcome outcome;
    Tally tally;

    [[nodiscard]] bool any_new_proposal() const;
};

struct AcceptedEntry {
    int round = 0;
    ProposalId proposal = 0;
    friend bool operator==(const AcceptedEntry&, const AcceptedEntry&) = default;
};

struct Transcript {
    static constexpr int kVersion = 1;

    EngineConfig config;
    std::uint64_t seed = 0;
    std::vector<AgentInfo> agents;
    /// Indexed by id - 1; ids are assigned in creation order starting at 1.
    std::vector<Proposal> proposals;
    std::vector<RoundRecord> rounds;
    std::vector<AcceptedEntry> accepted_history;
    std::optional<ProposalId> final_decision;
    /// Whatever the metrics need to be recomputed from the record alone:
    /// utility exponents and endowment, or the rating task and gold value.
    Json environment_info;
    std::vector<std::string> log;

    [[nodiscard]] const Proposal& proposal(ProposalId id) const;
    /// The latest accepted proposal as of the end of `round` (0 = before the run).
    [[nodiscard]] std::optional<ProposalId> standing_after(int round) const;
    /// Each agent's latest proposal as of the end of `round`'s proposal phase.
    [[nodiscard]] std::map<AgentIndex, ProposalId> latest_proposals(int round) const;
};

}  // namespace roundtable
