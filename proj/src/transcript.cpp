#include "roundtable/transcript.hpp"

#include <algorithm>
#include <stdexcept>

namespace roundtable {

std::vector<std::string> EngineConfig::validate() const {
    std::vector<std::string> errors;
    if (rounds < 1) errors.push_back("rounds must be >= 1 (got " + std::to_string(rounds) + ")");
    if (agents < 2) errors.push_back("agent count must be >= 2 (got " + std::to_string(agents) + ")");
    if (max_attempts < 1) errors.push_back("max_attempts must be >= 1");
    if (environment != "economy" && environment != "rating") {
        errors.push_back("environment must be 'economy' or 'rating' (got '" + environment + "')");
    }
    return errors;
}

std::string_view to_string(ActionStatus s) {
    switch (s) {
        case ActionStatus::Ok: return "ok";
        case ActionStatus::Skipped: return "skipped";
        case ActionStatus::Failed: return "failed";
        case ActionStatus::Rejected: return "rejected";
    }
    return "?";
}

ActionStatus parse_action_status(std::string_view s) {
    if (s == "ok") return ActionStatus::Ok;
    if (s == "skipped") return ActionStatus::Skipped;
    if (s == "failed") return ActionStatus::Failed;
    if (s == "rejected") return ActionStatus::Rejected;
    throw std::invalid_argument("unknown action status '" + std::string(s) + "'");
}

bool RoundRecord::any_new_proposal() const {
    return std::any_of(proposals.begin(), proposals.end(),
                       [](const ProposalEntry& p) { return p.proposal.has_value(); });
}

const Proposal& Transcript::proposal(ProposalId id) const {
    if (id < 1 || static_cast<std::size_t>(id) > proposals.size()) {
        throw std::out_of_range("no proposal with id " + std::to_string(id));
    }
    return proposals[static_cast<std::size_t>(id - 1)];
}

std::optional<ProposalId> Transcript::standing_after(int round) const {
    std::optional<ProposalId> standing;
    for (const auto& a : accepted_history) {
        if (a.round <= round) standing = a.proposal;
    }
    return standing;
}

std::map<AgentIndex, ProposalId> Transcript::latest_proposals(int round) const {
    std::map<AgentIndex, ProposalId> latest;
    for (const auto& rec : rounds) {
        if (rec.round > round) break;
        for (const auto& p : rec.proposals) {
            if (p.proposal) latest[p.agent] = *p.proposal;
        }
    }
    return latest;
}

}  // namespace roundtable
