#pragma once

#include <optional>
#include <vector>

#include "roundtable/economy.hpp"
#include "roundtable/rating.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

struct EconMetrics {
    /// Normalized group utility of the standing allocation at the end of each
    /// round, index r-1.
    std::vector<double> utility;
    double u0 = 0.0;  // endowment, normalized
    std::optional<double> auc3, auc5, auc10;
    double minmax = 0.0;
    double rationality = 0.0;
    int proposal_events = 0;
    double rigidity = 0.0;
};

/// Throws std::invalid_argument when u_max is not positive.
EconMetrics econ_metrics(const Transcript& transcript, const EconomyEnvironment& env, double u_max);

/// Area under the first n rounds of a series. nullopt when n exceeds its length.
std::optional<double> auc_at(const std::vector<double>& series, int n);

/// Standing rating at the end of each round; nullopt before any acceptance.
std::vector<std::optional<double>> rating_predictions(const Transcript& transcript);

/// Rebuilds the environment recorded in environment_info.
EconomyEnvironment economy_from_transcript(const Transcript& transcript);

}  // namespace roundtable
