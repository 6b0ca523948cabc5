#include "roundtable/engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace roundtable {

CandidateSlate assemble_candidates(const std::map<AgentIndex, ProposalId>& latest_proposals,
                                   std::optional<ProposalId> latest_accepted) {
    std::map<ProposalId, Candidate> merged;
    for (const auto& [agent, id] : latest_proposals) {
        Candidate& c = merged[id];
        c.id = id;
        c.supporters.push_back(agent);
    }
    if (latest_accepted) {
        Candidate& c = merged[*latest_accepted];
        c.id = *latest_accepted;
        c.standing = true;
    }
    CandidateSlate slate;
    slate.reserve(merged.size());
    for (auto& [id, c] : merged) slate.push_back(std::move(c));
    return slate;
}

void commit_outcome(Transcript& transcript, int round, const Outcome& outcome) {
    if (!outcome.selected) return;
    transcript.accepted_history.push_back({round, *outcome.selected});
    transcript.final_decision = outcome.selected;
}

namespace {

template <typename T>
struct Attempt {
    std::optional<T> value;
    int failures = 0;
    std::string last_error;
};

/// Calls `query` up to `max_attempts` times.
template <typename T, typename F>
Attempt<T> with_retries(int max_attempts, const F& query) {
    Attempt<T> a;
    for (int i = 0; i < max_attempts; ++i) {
        try {
            a.value = query();
            return a;
        } catch (const std::exception& e) {
            ++a.failures;
            a.last_error = e.what();
        }
    }
    return a;
}

class Runner {
public:
    Runner(const EngineConfig& config, const std::vector<const AgentPolicy*>& agents, const Environment& env,
           const RunOptions& options)
        : config_(config), agents_(agents), env_(env), options_(options) {
        auto errors = config.validate();
        if (static_cast<int>(agents.size()) != config.agents) {
            errors.push_back("roster has " + std::to_string(agents.size()) + " policies for K=" +
                             std::to_string(config.agents));
        }
        if (env.agent_count() != config.agents) {
            errors.push_back("environment '" + env.id() + "' has " + std::to_string(env.agent_count()) +
                             " agents, config says " + std::to_string(config.agents));
        }
        for (const auto* a : agents) {
            if (!a) errors.push_back("null agent policy");
        }
        order_ = options.query_order;
        if (order_.empty()) {
            order_.resize(agents.size());
            std::iota(order_.begin(), order_.end(), 0);
        }
        std::vector<AgentIndex> sorted = order_;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted.size() != agents.size() || sorted[i] != static_cast<AgentIndex>(i)) {
                errors.push_back("query order must be a permutation of the agents");
                break;
            }
        }
        if (!errors.empty()) {
            std::string all = "invalid run:";
            for (const auto& e : errors) all += "\n  " + e;
            throw std::invalid_argument(all);
        }
    }

    Transcript run() {
        t_.config = config_;
        t_.seed = config_.seed;
        for (AgentIndex i = 0; i < config_.agents; ++i) {
            t_.agents.push_back({i, env_.agent_name(i), agents_[static_cast<std::size_t>(i)]->kind()});
        }
        for (int r = 1; r <= config_.rounds; ++r) {
            t_.rounds.push_back(RoundRecord{});
            t_.rounds.back().round = r;
            message_phase(r);
            proposal_phase(r);
            voting_phase(r);
        }
        return std::move(t_);
    }

private:
    ContextView view(int round, Phase phase, AgentIndex self, const CandidateSlate* slate = nullptr) const {
        return ContextView{env_, config_, t_, round, phase, self, slate};
    }

    /// Queries every agent against the same snapshot; results land in
    /// agent-indexed slots so commit order never depends on query order.
    template <typename T, typename F>
    std::vector<Attempt<T>> query_all(const F& ask) const {
        std::vector<Attempt<T>> results(agents_.size());
        for_each_index(options_.queries, order_.size(), [&](std::size_t i) {
            const AgentIndex agent = order_[i];
            results[static_cast<std::size_t>(agent)] =
                with_retries<T>(config_.max_attempts, [&] { return ask(agent); });
        });
        return results;
    }

    void note_failure(int round, Phase phase, AgentIndex agent, const std::string& error) {
        t_.log.push_back("round " + std::to_string(round) + " " + std::string(to_string(phase)) + ": " +
                         env_.agent_name(agent) + " failed after " + std::to_string(config_.max_attempts) +
                         " attempts (" + error + ")");
    }

    void message_phase(int r) {
        auto results = query_all<std::optional<MessageAction>>([&](AgentIndex a) {
            return agents_[static_cast<std::size_t>(a)]->decide_message(view(r, Phase::Message, a));
        });
        RoundRecord& rec = t_.rounds.back();
        for (AgentIndex a = 0; a < config_.agents; ++a) {
            auto& res = results[static_cast<std::size_t>(a)];
            MessageEntry entry{a, ActionStatus::Skipped, std::nullopt};
            if (!res.value) {
                entry.status = ActionStatus::Failed;
                note_failure(r, Phase::Message, a, res.last_error);
            } else if (*res.value && !(*res.value)->text.empty()) {
                Message m{a, {}, (*res.value)->text};
                for (AgentIndex target : (*res.value)->targets) {
                    if (target >= 0 && target < config_.agents &&
                        std::find(m.targets.begin(), m.targets.end(), target) == m.targets.end()) {
                        m.targets.push_back(target);
                    }
                }
                if (m.targets.empty()) {
                    for (AgentIndex j = 0; j < config_.agents; ++j) {
                        if (j != a) m.targets.push_back(j);
                    }
                }
                entry.status = ActionStatus::Ok;
                entry.message = std::move(m);
            }
            rec.messages.push_back(std::move(entry));
        }
    }

    void proposal_phase(int r) {
        auto results = query_all<ProposalAction>([&](AgentIndex a) {
            return agents_[static_cast<std::size_t>(a)]->decide_proposal(view(r, Phase::Proposal, a));
        });
        RoundRecord& rec = t_.rounds.back();
        for (AgentIndex a = 0; a < config_.agents; ++a) {
            auto& res = results[static_cast<std::size_t>(a)];
            ProposalEntry entry{a, ActionStatus::Skipped, std::nullopt, {}};
            if (!res.value) {
                entry.status = ActionStatus::Failed;
                note_failure(r, Phase::Proposal, a, res.last_error);
            } else {
                entry.reasoning = res.value->reasoning;
                if (res.value->body) {
                    std::string why;
                    auto body = env_.canonicalize(*res.value->body, &why);
                    if (!body) {
                        entry.status = ActionStatus::Rejected;
                        t_.log.push_back("round " + std::to_string(r) + " proposal: " + env_.agent_name(a) +
                                         " submitted a malformed body (" + why + ")");
                    } else {
                        entry.status = ActionStatus::Ok;
                        entry.proposal = register_body(std::move(*body), r, a);
                    }
                }
            }
            rec.proposals.push_back(std::move(entry));
        }
    }

    ProposalId register_body(ProposalBody body, int round, AgentIndex author) {
        auto it = registry_.find(body.canonical);
        if (it != registry_.end()) {
            Proposal& p = t_.proposals[static_cast<std::size_t>(it->second - 1)];
            if (p.round == round && std::find(p.authors.begin(), p.authors.end(), author) == p.authors.end()) {
                p.authors.push_back(author);
            }
            return it->second;
        }
        const ProposalId id = static_cast<ProposalId>(t_.proposals.size()) + 1;
        registry_.emplace(body.canonical, id);
        t_.proposals.push_back({id, round, {author}, std::move(body)});
        return id;
    }

    void voting_phase(int r) {
        CandidateSlate slate = assemble_candidates(t_.latest_proposals(r), t_.standing_after(r - 1));
        RoundRecord& rec = t_.rounds.back();
        rec.slate = slate;
        if (slate.empty()) {
            rec.outcome = Outcome::defer();
            return;
        }
        auto results = query_all<BallotAction>([&](AgentIndex a) {
            return agents_[static_cast<std::size_t>(a)]->decide_ballot(view(r, Phase::Voting, a, &slate));
        });
        std::map<AgentIndex, Ballot> ballots;
        for (AgentIndex a = 0; a < config_.agents; ++a) {
            auto& res = results[static_cast<std::size_t>(a)];
            BallotEntry entry;
            if (!res.value) {
                entry.action = ActionStatus::Failed;
                note_failure(r, Phase::Voting, a, res.last_error);
            } else {
                entry.ballot = res.value->ballot;
                entry.reasoning = res.value->reasoning;
            }
            ballots.emplace(a, entry.ballot);
            rec.ballots.emplace(a, std::move(entry));
        }
        TallyResult result = tally(config_.mechanism, slate, ballots, config_.agents, config_.tally);
        for (auto& [agent, entry] : rec.ballots) {
            entry.status = result.status.at(agent);
            if (auto it = result.disqualify_reason.find(agent); it != result.disqualify_reason.end()) {
                entry.disqualify_reason = it->second;
                t_.log.push_back("round " + std::to_string(r) + " voting: " + env_.agent_name(agent) +
                                 " ballot disqualified (" + it->second + ")");
            }
        }
        rec.outcome = result.outcome;
        rec.tally = std::move(result.tally);
        commit_outcome(t_, r, rec.outcome);
    }

    const EngineConfig& config_;
    const std::vector<const AgentPolicy*>& agents_;
    const Environment& env_;
    const RunOptions& options_;
    std::vector<AgentIndex> order_;
    Transcript t_;
    std::unordered_map<std::string, ProposalId> registry_;
};

}  // namespace

Transcript run_collaboration(const EngineConfig& config, const std::vector<const AgentPolicy*>& agents,
                             const Environment& env, const RunOptions& options) {
    return Runner(config, agents, env, options).run();
}

}  // namespace roundtable
