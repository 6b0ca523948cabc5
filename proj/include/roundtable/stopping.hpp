#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roundtable/linguistics.hpp"
#include "roundtable/parallel.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

enum class Direction { HigherBetter, LowerBetter };

struct PerformanceSeries {
    std::vector<double> values;  // index r - 1
    Direction direction = Direction::HigherBetter;

    [[nodiscard]] int rounds() const { return static_cast<int>(values.size()); }
    [[nodiscard]] double at(int round) const { return values.at(static_cast<std::size_t>(round - 1)); }
    /// a strictly better than b under the direction.
    [[nodiscard]] bool better(double a, double b) const { return direction == Direction::HigherBetter ? a > b : a < b; }
};

struct StopDecision {
    int stopped_round = 0;
    bool triggered = false;
};

/// What the stopping rules look at for one simulation.
struct SimulationRecord {
    std::string id;
    PerformanceSeries performance;
    std::vector<bool> selected;       // outcome of round r selected a proposal
    std::vector<bool> new_proposal;   // some agent proposed in round r
    std::vector<std::optional<double>> info_difference;
    std::optional<LabeledSimulation> acts;

    [[nodiscard]] int rounds() const { return performance.rounds(); }
};

SimulationRecord simulation_record(const Transcript& t, std::string id, PerformanceSeries performance,
                                   const std::vector<RoundFeatures>* features = nullptr,
                                   std::optional<LabeledSimulation> acts = std::nullopt);

/// Best round, earliest on ties.
int oracle_round(const PerformanceSeries& series);

StopDecision first_agreement(const SimulationRecord& sim);
/// First r >= 2 whose previous round selected a proposal and in which nobody proposed.
StopDecision consecutive_agreements(const SimulationRecord& sim);

/// Mean of the oracle rounds, rounded half-up, clamped to [1, R]. Throws
/// std::invalid_argument on an empty training set.
int validation_checkpoint(const std::vector<PerformanceSeries>& train);
StopDecision stop_at_checkpoint(const SimulationRecord& sim, int checkpoint);

/// Mean information difference at each training simulation's oracle round,
/// skipping simulations whose oracle round is 1. Throws when none remain.
double info_diff_threshold(const std::vector<const SimulationRecord*>& train);
/// First r >= 2 whose information difference is strictly below threshold.
StopDecision info_diff_rule(const SimulationRecord& sim, double threshold);

// ---------------------------------------------------------------------- OLS

class OlsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OLSResult {
    /// Columns of X that survived rank pruning, ascending.
    std::vector<int> kept;
    Eigen::VectorXd beta, se, t, p;  // parallel to kept
    int dof = 0;
    double sigma2 = 0.0;
    std::vector<std::string> warnings;
};

/// Least squares through Householder QR after dropping, in column order,
/// every column that is linearly dependent on the kept ones. Two-sided
/// p-values come from Student's t with n - k degrees of freedom. Throws
/// OlsError when n <= k or nothing is left.
OLSResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Two-sided p-value of a t statistic.
double t_two_sided_p(double t, int dof);

// ------------------------------------------------------ dialogue-act pairs

/// All ordered pairs of the eleven content acts, in enum order.
const std::vector<ActPair>& all_act_pairs();

struct FeatureRow {
    std::size_t sim = 0;
    int round = 0;
    std::vector<double> x;  // parallel to all_act_pairs()
    double y = 0.0;
};

enum class DependentVariable { RoundPerformance, FinalPerformance };

/// One row per round r in [2, R]: pair (A, B) is 1 iff some agent had A at
/// r - 1 and a different agent had B at r.
std::vector<FeatureRow> da_pair_features(const SimulationRecord& sim, std::size_t sim_index = 0,
                                         DependentVariable dependent = DependentVariable::RoundPerformance);

/// Number of (i, j != i) with A in acts[i][r-1] and B in acts[j][r].
int pair_count(const LabeledSimulation& acts, int round, const ActPair& pair);

struct DAHyperParams {
    int top_da = 1;                       // 1..5
    std::optional<double> p_threshold;    // 0.05, 0.1, 0.2 or none
    int count_per_round = 1;              // 1..3
    int score_threshold = 1;              // 1..top_da
    friend bool operator==(const DAHyperParams&, const DAHyperParams&) = default;
};

/// The exhaustive grid: top_da outermost, then score, then p-value, then count.
std::vector<DAHyperParams> da_grid();

enum class PairRanking { StopFavorable, AbsoluteMagnitude };

struct DASearchOptions {
    PairRanking ranking = PairRanking::StopFavorable;
    DependentVariable dependent = DependentVariable::RoundPerformance;
};

struct DARule {
    bool active = false;
    DAHyperParams params;
    std::vector<ActPair> pairs;
    double train_performance = 0.0;
    double baseline_performance = 0.0;  // @R on the same training set
    std::vector<std::string> warnings;
};

/// Pairs ranked for one p-value threshold, best first.
std::vector<ActPair> ranked_pairs(const OLSResult& fit, std::optional<double> p_threshold, Direction direction,
                                  PairRanking ranking);

/// Greedy search over da_grid() on the training set. A combination replaces
/// the incumbent only when strictly better; the rule stays inactive unless
/// it beats @R on the training set.
DARule da_rule_search(const std::vector<const SimulationRecord*>& train, const DASearchOptions& options = {});

/// Stops at the first r in [2, R] where at least score_threshold of the
/// rule's pairs occur count_per_round times or more.
StopDecision apply_da_rule(const DARule& rule, const SimulationRecord& sim);
StopDecision apply_da_params(const DAHyperParams& params, const std::vector<ActPair>& pairs,
                             const SimulationRecord& sim);

// ------------------------------------------------------------- evaluation

enum class RuleId { Oracle, AtR, FirstAgreement, ConsecutiveAgreements, ValidationCheckpoint, InfoDifference, DialogueAct };

inline constexpr RuleId kAllRules[] = {RuleId::Oracle,         RuleId::AtR,
                                       RuleId::FirstAgreement, RuleId::ConsecutiveAgreements,
                                       RuleId::ValidationCheckpoint, RuleId::InfoDifference,
                                       RuleId::DialogueAct};

std::string_view to_string(RuleId r);
RuleId parse_rule(std::string_view name);

/// Seeded shuffle dealt round-robin into k folds.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, int k, std::uint64_t seed);

struct FoldResult {
    RuleId rule;
    int fold = 0;
    int test_size = 0;
    double mean_performance = 0.0;
    double mean_stopped_round = 0.0;
    double effective_ratio = 0.0;
    std::optional<double> threshold;
    std::string detail;
};

struct RuleSummary {
    RuleId rule;
    double mean_performance = 0.0;
    double standard_error = 0.0;
    double mean_stopped_round = 0.0;
    double effective_ratio = 0.0;
    std::optional<double> mean_threshold;
};

struct CVReport {
    std::string label;
    int k = 5;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> folds;
    std::vector<FoldResult> fold_results;
    std::vector<RuleSummary> summary;
    /// decisions[rule index in `rules`][simulation]
    std::vector<RuleId> rules;
    std::vector<std::vector<StopDecision>> decisions;
};

struct CVOptions {
    int k = 5;
    std::uint64_t seed = 0;
    std::vector<RuleId> rules{std::begin(kAllRules), std::end(kAllRules)};
    DASearchOptions da;
    Execution execution = Execution::Parallel;
};

/// Throws std::invalid_argument with fewer than k simulations.
CVReport kfold_evaluate(const std::vector<SimulationRecord>& sims, const CVOptions& options, std::string label = "");

std::string cv_report_csv(const std::vector<CVReport>& reports);
Json cv_report_json(const std::vector<CVReport>& reports);

/// Inverted-V performance peaking at `peak`, agreement and info-difference
/// signals near the peak, and an Accept-then-Summarize exchange planted at
/// rounds peak - 1 and peak.
std::vector<SimulationRecord> synthetic_v_shape(int n, int rounds, int peak, double noise, std::uint64_t seed,
                                                int agents = 3);

}  // namespace roundtable
