#include "roundtable/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace roundtable {

std::optional<double> auc_at(const std::vector<double>& series, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > series.size()) return std::nullopt;
    double sum = 0.0;
    for (int r = 0; r < n; ++r) sum += series[static_cast<std::size_t>(r)];
    return sum;
}

EconMetrics econ_metrics(const Transcript& t, const EconomyEnvironment& env, double u_max) {
    if (!(u_max > 0.0)) throw std::invalid_argument("econ_metrics needs a positive u_max");
    const auto& utilities = env.utilities();
    const Allocation endowment = env.endowment();

    auto allocation_standing_after = [&](int round) {
        const auto id = t.standing_after(round);
        return id ? EconomyEnvironment::allocation_of(t.proposal(*id).body) : endowment;
    };

    EconMetrics m;
    m.u0 = group_total(endowment, utilities) / u_max;
    const int R = static_cast<int>(t.rounds.size());
    double prev = m.u0;
    int unchanged = 0;
    for (int r = 1; r <= R; ++r) {
        const double u = group_total(allocation_standing_after(r), utilities) / u_max;
        m.utility.push_back(u);
        if (u == prev) ++unchanged;
        prev = u;
    }
    m.rigidity = R > 0 ? static_cast<double>(unchanged) / R : 0.0;
    m.auc3 = auc_at(m.utility, 3);
    m.auc5 = auc_at(m.utility, 5);
    m.auc10 = auc_at(m.utility, 10);

    const Allocation final_alloc = allocation_standing_after(R);
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < final_alloc.agents(); ++i) {
        const double u = cobb_douglas(final_alloc.row(i), utilities[static_cast<std::size_t>(i)].theta);
        if (i == 0 || u < lo) lo = u;
        if (i == 0 || u > hi) hi = u;
    }
    m.minmax = hi > 0.0 ? lo / hi : 0.0;

    int rational = 0;
    for (const auto& rec : t.rounds) {
        const Allocation standing = allocation_standing_after(rec.round - 1);
        for (const auto& p : rec.proposals) {
            if (p.status != ActionStatus::Ok || !p.proposal) continue;
            ++m.proposal_events;
            const auto& theta = utilities[static_cast<std::size_t>(p.agent)].theta;
            const Allocation proposed = EconomyEnvironment::allocation_of(t.proposal(*p.proposal).body);
            if (cobb_douglas(proposed.row(p.agent), theta) > cobb_douglas(standing.row(p.agent), theta)) ++rational;
        }
    }
    m.rationality = m.proposal_events > 0 ? static_cast<double>(rational) / m.proposal_events : 0.0;
    return m;
}

std::vector<std::optional<double>> rating_predictions(const Transcript& t) {
    std::vector<std::optional<double>> out;
    for (const auto& rec : t.rounds) {
        const auto id = t.standing_after(rec.round);
        if (id) {
            out.emplace_back(RatingEnvironment::rating_of(t.proposal(*id).body));
        } else {
            out.emplace_back(std::nullopt);
        }
    }
    return out;
}

EconomyEnvironment economy_from_transcript(const Transcript& t) {
    const Json& info = t.environment_info;
    if (!info.is_object() || !info.contains("theta")) {
        throw std::invalid_argument("transcript carries no economy utilities");
    }
    std::vector<CobbDouglasUtility> utilities;
    for (const auto& row : info.at("theta")) utilities.push_back({row.get<std::vector<double>>()});
    std::optional<Allocation> endowment;
    if (info.contains("endowment")) endowment = Allocation::from_json(info.at("endowment"));
    return EconomyEnvironment(std::move(utilities), std::move(endowment));
}

}  // namespace roundtable
