#include "roundtable/social_choice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>

namespace roundtable {

std::string_view to_string(Mechanism m) {
    switch (m) {
        case Mechanism::Unanimous: return "Unanimous";
        case Mechanism::Majority: return "Majority";
        case Mechanism::Plurality: return "Plurality";
        case Mechanism::Rated: return "Rated";
        case Mechanism::Ranked: return "Ranked";
        case Mechanism::Cumulative: return "Cumulative";
    }
    return "?";
}

Mechanism parse_mechanism(std::string_view name) {
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    const std::string wanted = lower(name);
    for (Mechanism m : kAllMechanisms) {
        if (lower(to_string(m)) == wanted) return m;
    }
    throw std::invalid_argument("unknown mechanism '" + std::string(name) +
                                "'; valid values: Unanimous, Majority, Plurality, Rated, Ranked, "
                                "Cumulative");
}

bool is_single_choice(Mechanism m) {
    return m == Mechanism::Unanimous || m == Mechanism::Majority || m == Mechanism::Plurality;
}

bool is_abstention(const Ballot& b) {
    if (std::holds_alternative<ballot::Abstain>(b)) return true;
    if (auto* s = std::get_if<ballot::SingleChoice>(&b)) return !s->candidate.has_value();
    return false;
}

namespace {

bool on_slate(const CandidateSlate& slate, ProposalId id) {
    return std::any_of(slate.begin(), slate.end(), [id](const Candidate& c) { return c.id == id; });
}

std::size_t slate_index(const CandidateSlate& slate, ProposalId id) {
    for (std::size_t i = 0; i < slate.size(); ++i) {
        if (slate[i].id == id) return i;
    }
    throw std::logic_error("candidate not on slate");
}

BallotCheck check_single(const CandidateSlate& slate, const ballot::SingleChoice& b) {
    if (b.candidate && !on_slate(slate, *b.candidate)) return BallotCheck::disqualified("unknown_candidate");
    return BallotCheck::ok();
}

BallotCheck check_rated(const CandidateSlate& slate, const ballot::Rated& b) {
    for (const auto& [id, score] : b.scores) {
        if (!on_slate(slate, id)) return BallotCheck::disqualified("unknown_candidate");
        if (score < 1 || score > 5) return BallotCheck::disqualified("score_out_of_range");
    }
    if (b.scores.size() != slate.size()) return BallotCheck::disqualified("incomplete_rating");
    return BallotCheck::ok();
}

BallotCheck check_ranked(const CandidateSlate& slate, const ballot::Ranked& b) {
    std::set<ProposalId> seen;
    for (ProposalId id : b.order) {
        if (!on_slate(slate, id)) return BallotCheck::disqualified("unknown_candidate");
        if (!seen.insert(id).second) return BallotCheck::disqualified("not_a_permutation");
    }
    if (seen.size() != slate.size()) return BallotCheck::disqualified("not_a_permutation");
    return BallotCheck::ok();
}

BallotCheck check_cumulative(const CandidateSlate& slate, const ballot::Cumulative& b, double budget,
                             const TallyOptions& options) {
    double sum = 0.0;
    for (const auto& [id, pts] : b.points) {
        if (!on_slate(slate, id)) return BallotCheck::disqualified("unknown_candidate");
        if (!(pts >= 0.0) || !std::isfinite(pts)) return BallotCheck::disqualified("negative_points");
        if (options.integer_cumulative && pts != std::floor(pts)) {
            return BallotCheck::disqualified("non_integer_points");
        }
        sum += pts;
    }
    if (std::fabs(sum - budget) > kCumulativeTolerance) return BallotCheck::disqualified("sum_mismatch");
    return BallotCheck::ok();
}

/// Index of the unique maximum, or nullopt on a tie or when `totals` is empty.
template <typename T, typename Greater>
std::optional<std::size_t> unique_argmax(const std::vector<T>& totals, Greater greater) {
    if (totals.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < totals.size(); ++i) {
        if (greater(totals[i], totals[best])) best = i;
    }
    for (std::size_t i = 0; i < totals.size(); ++i) {
        if (i != best && !greater(totals[best], totals[i])) return std::nullopt;
    }
    return best;
}

}  // namespace

BallotCheck validate_ballot(Mechanism mechanism, const CandidateSlate& slate, const Ballot& ballot,
                            double budget, const TallyOptions& options) {
    if (std::holds_alternative<ballot::Abstain>(ballot)) return BallotCheck::ok();
    switch (mechanism) {
        case Mechanism::Unanimous:
        case Mechanism::Majority:
        case Mechanism::Plurality:
            if (auto* b = std::get_if<ballot::SingleChoice>(&ballot)) return check_single(slate, *b);
            break;
        case Mechanism::Rated:
            if (auto* b = std::get_if<ballot::Rated>(&ballot)) return check_rated(slate, *b);
            break;
        case Mechanism::Ranked:
            if (auto* b = std::get_if<ballot::Ranked>(&ballot)) return check_ranked(slate, *b);
            break;
        case Mechanism::Cumulative:
            if (auto* b = std::get_if<ballot::Cumulative>(&ballot)) {
                return check_cumulative(slate, *b, budget, options);
            }
            break;
    }
    return BallotCheck::disqualified("wrong_shape");
}

Rational borda_points(int position) {
    if (position < 1) throw std::invalid_argument("ranked position must be >= 1");
    return Rational(1, position);
}

double cumulative_budget(int slate_size) {
    if (slate_size < 1) throw std::invalid_argument("cumulative budget needs a nonempty slate");
    return static_cast<double>(slate_size);
}

TallyResult tally(Mechanism mechanism, const CandidateSlate& slate,
                  const std::map<AgentIndex, Ballot>& ballots, int total_agents,
                  const TallyOptions& options) {
    TallyResult result;
    Tally& t = result.tally;
    const std::size_t n = slate.size();
    t.exact_totals.assign(mechanism == Mechanism::Cumulative ? 0 : n, Rational(0));
    if (mechanism == Mechanism::Cumulative) t.real_totals.assign(n, 0.0);

    if (slate.empty()) {
        t.abstentions = total_agents;
        for (AgentIndex a = 0; a < total_agents; ++a) result.status[a] = BallotStatus::Abstained;
        result.outcome = Outcome::defer();
        return result;
    }

    const double budget = cumulative_budget(static_cast<int>(n));
    for (AgentIndex agent = 0; agent < total_agents; ++agent) {
        auto it = ballots.find(agent);
        if (it == ballots.end() || is_abstention(it->second)) {
            // An explicit None that also has the wrong shape is still just "None".
            result.status[agent] = BallotStatus::Abstained;
            ++t.abstentions;
            continue;
        }
        const Ballot& b = it->second;
        BallotCheck check = validate_ballot(mechanism, slate, b, budget, options);
        if (!check.valid) {
            result.status[agent] = BallotStatus::Disqualified;
            result.disqualify_reason[agent] = check.reason;
            ++t.disqualified;
            continue;
        }
        result.status[agent] = BallotStatus::Valid;
        ++t.valid_ballots;
        std::visit(
            [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, ballot::SingleChoice>) {
                    t.exact_totals[slate_index(slate, *v.candidate)] += Rational(1);
                } else if constexpr (std::is_same_v<V, ballot::Rated>) {
                    for (const auto& [id, score] : v.scores) t.exact_totals[slate_index(slate, id)] += Rational(score);
                } else if constexpr (std::is_same_v<V, ballot::Ranked>) {
                    for (std::size_t pos = 0; pos < v.order.size(); ++pos) {
                        t.exact_totals[slate_index(slate, v.order[pos])] += borda_points(static_cast<int>(pos) + 1);
                    }
                } else if constexpr (std::is_same_v<V, ballot::Cumulative>) {
                    for (const auto& [id, pts] : v.points) t.real_totals[slate_index(slate, id)] += pts;
                }
            },
            b);
    }

    auto exact_greater = [](const Rational& a, const Rational& b) { return a > b; };
    std::optional<std::size_t> winner;
    switch (mechanism) {
        case Mechanism::Unanimous:
        case Mechanism::Majority: {
            std::vector<std::size_t> passed;
            for (std::size_t i = 0; i < n; ++i) {
                const Rational votes = t.exact_totals[i];
                const bool pass = mechanism == Mechanism::Unanimous
                                      ? votes == Rational(total_agents)
                                      : votes + votes > Rational(total_agents);
                if (pass) passed.push_back(i);
            }
            // More than one passing proposal selects none.
            if (passed.size() == 1) winner = passed.front();
            break;
        }
        case Mechanism::Plurality:
        case Mechanism::Rated:
        case Mechanism::Ranked:
            if (t.valid_ballots > 0) winner = unique_argmax(t.exact_totals, exact_greater);
            break;
        case Mechanism::Cumulative:
            if (t.valid_ballots > 0) {
                winner = unique_argmax(t.real_totals, [](double a, double b) {
                    return a > b + kCumulativeTolerance;
                });
            }
            break;
    }
    result.outcome = winner ? Outcome::select(slate[*winner].id) : Outcome::defer();
    return result;
}

}  // namespace roundtable
