#pragma once

#include <map>
#include <optional>
#include <vector>

#include "roundtable/agents.hpp"
#include "roundtable/environment.hpp"
#include "roundtable/parallel.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

struct RunOptions {
    /// Order in which policies are queried within a phase; empty = ascending.
    /// Commits always happen in ascending agent order.
    std::vector<AgentIndex> query_order;
    /// Parallel queries policies of one phase concurrently.
    Execution queries = Execution::Serial;
};

/// Runs R rounds of message, proposal and voting phases. Policy failures
/// degrade to skip or abstain after config.max_attempts tries; the run never
/// aborts on them. Throws std::invalid_argument when the configuration, the
/// roster size or the environment disagree.
Transcript run_collaboration(const EngineConfig& config, const std::vector<const AgentPolicy*>& agents,
                             const Environment& env, const RunOptions& options = {});

/// Each agent's latest proposal plus the standing decision, merged by id,
/// ascending. `supporters` are the agents whose latest proposal it is.
CandidateSlate assemble_candidates(const std::map<AgentIndex, ProposalId>& latest_proposals,
                                   std::optional<ProposalId> latest_accepted);

/// Selected(c) appends (round, c) to the accepted history and updates the
/// final decision; Deferred leaves both unchanged.
void commit_outcome(Transcript& transcript, int round, const Outcome& outcome);

}  // namespace roundtable
