#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "roundtable/rational.hpp"

namespace roundtable {

using AgentIndex = int;
using ProposalId = std::int64_t;

enum class Mechanism { Unanimous, Majority, Plurality, Rated, Ranked, Cumulative };

inline constexpr Mechanism kAllMechanisms[] = {Mechanism::Unanimous, Mechanism::Majority,
                                               Mechanism::Plurality, Mechanism::Rated,
                                               Mechanism::Ranked,    Mechanism::Cumulative};

std::string_view to_string(Mechanism m);
/// Case-insensitive. Throws std::invalid_argument listing the six valid names.
Mechanism parse_mechanism(std::string_view name);
/// Unanimous, Majority and Plurality take one vote per agent.
bool is_single_choice(Mechanism m);

/// One entry of a voting slate. `supporters` are the agents whose latest
/// proposal this is; `standing` marks the latest accepted decision.
struct Candidate {
    ProposalId id = 0;
    std::vector<AgentIndex> supporters;
    bool standing = false;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Ascending proposal id, no duplicates.
using CandidateSlate = std::vector<Candidate>;

namespace ballot {
struct Abstain {
    friend bool operator==(const Abstain&, const Abstain&) = default;
};
/// nullopt is an explicit "None" vote.
struct SingleChoice {
    std::optional<ProposalId> candidate;
    friend bool operator==(const SingleChoice&, const SingleChoice&) = default;
};
struct Rated {
    std::map<ProposalId, int> scores;
    friend bool operator==(const Rated&, const Rated&) = default;
};
/// Most preferred first.
struct Ranked {
    std::vector<ProposalId> order;
    friend bool operator==(const Ranked&, const Ranked&) = default;
};
struct Cumulative {
    std::map<ProposalId, double> points;
    friend bool operator==(const Cumulative&, const Cumulative&) = default;
};
}  // namespace ballot

using Ballot = std::variant<ballot::Abstain, ballot::SingleChoice, ballot::Rated, ballot::Ranked,
                            ballot::Cumulative>;

/// True for whole-ballot abstention and for a single-choice "None".
bool is_abstention(const Ballot& b);

struct BallotCheck {
    bool valid = true;
    /// Machine-readable code when disqualified: wrong_shape, unknown_candidate,
    /// score_out_of_range, incomplete_rating, not_a_permutation, sum_mismatch,
    /// negative_points, non_integer_points.
    std::string reason;

    static BallotCheck ok() { return {}; }
    static BallotCheck disqualified(std::string why) { return {false, std::move(why)}; }
};

inline constexpr double kCumulativeTolerance = 1e-9;

struct TallyOptions {
    /// Classic cumulative voting: every allotment must be a whole number.
    bool integer_cumulative = false;
};

BallotCheck validate_ballot(Mechanism mechanism, const CandidateSlate& slate, const Ballot& ballot,
                            double budget, const TallyOptions& options = {});

struct Outcome {
    std::optional<ProposalId> selected;  // nullopt = Deferred

    [[nodiscard]] bool deferred() const noexcept { return !selected.has_value(); }
    static Outcome defer() { return {}; }
    static Outcome select(ProposalId id) { return {id}; }
    friend bool operator==(const Outcome&, const Outcome&) = default;
};

enum class BallotStatus { Valid, Abstained, Disqualified };

struct Tally {
    /// Parallel to the slate. Exact for every mechanism except Cumulative.
    std::vector<Rational> exact_totals;
    /// Used by Cumulative only.
    std::vector<double> real_totals;
    int valid_ballots = 0;
    int abstentions = 0;
    int disqualified = 0;
};

struct TallyResult {
    Outcome outcome;
    Tally tally;
    /// Keyed by agent; agents with no ballot are recorded as Abstained.
    std::map<AgentIndex, BallotStatus> status;
    std::map<AgentIndex, std::string> disqualify_reason;
};

/// Maps one voting round to an outcome. Unanimous and Majority count against
/// all `total_agents`, so abstentions work against acceptance. Any tie for the
/// top score defers.
TallyResult tally(Mechanism mechanism, const CandidateSlate& slate,
                  const std::map<AgentIndex, Ballot>& ballots, int total_agents,
                  const TallyOptions& options = {});

/// 1/position. Throws std::invalid_argument for position < 1.
Rational borda_points(int position);

/// Points each agent distributes under cumulative voting for a slate of this
/// size (one point per candidate).
double cumulative_budget(int slate_size);

}  // namespace roundtable
