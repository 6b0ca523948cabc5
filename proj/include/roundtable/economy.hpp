#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roundtable/environment.hpp"
#include "roundtable/parallel.hpp"

namespace roundtable {

inline constexpr double kGoodQuantity = 100.0;
inline constexpr double kConservationTolerance = 1e-6;

/// Goods held by each agent, row-major: at(agent, good).
class Allocation {
public:
    Allocation() = default;
    Allocation(int agents, int goods) : agents_(agents), goods_(goods), a_(std::size_t(agents) * goods, 0.0) {}

    static Allocation even_split(int agents, int goods);

    [[nodiscard]] int agents() const noexcept { return agents_; }
    [[nodiscard]] int goods() const noexcept { return goods_; }
    [[nodiscard]] double& at(int agent, int good) { return a_[std::size_t(agent) * goods_ + good]; }
    [[nodiscard]] double at(int agent, int good) const { return a_[std::size_t(agent) * goods_ + good]; }
    [[nodiscard]] std::span<const double> row(int agent) const {
        return {a_.data() + std::size_t(agent) * goods_, std::size_t(goods_)};
    }
    [[nodiscard]] std::span<double> data() noexcept { return a_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return a_; }

    /// Nonnegative and every good's column sums to 100 within tolerance.
    [[nodiscard]] bool feasible(double tolerance = kConservationTolerance) const;

    [[nodiscard]] Json to_json() const;
    static Allocation from_json(const Json& rows);

    friend bool operator==(const Allocation&, const Allocation&) = default;

private:
    int agents_ = 0;
    int goods_ = 0;
    std::vector<double> a_;
};

struct CobbDouglasUtility {
    std::vector<double> theta;
};

enum class UtilitySetPreset { AsymmetricLiteral, AsymmetricNormalized, Symmetric, Uniform };

std::string_view to_string(UtilitySetPreset p);
UtilitySetPreset parse_preset(std::string_view name);

/// One utility per agent, K agents over K goods.
std::vector<CobbDouglasUtility> make_utilities(UtilitySetPreset preset, int agents);

/// prod a_k^theta_k with 0^0 = 1. Throws std::domain_error on a negative amount.
double cobb_douglas(std::span<const double> amounts, std::span<const double> theta);

double group_total(const Allocation& alloc, const std::vector<CobbDouglasUtility>& utilities);

struct UMaxOptions {
    int starts = 32;
    int max_iterations = 10000;
    double tolerance = 1e-10;
    std::uint64_t seed = 0x5eed;
    Execution execution = Execution::Parallel;
};

struct UMaxResult {
    double value = 0.0;
    Allocation argmax;
    int converged_starts = 0;
};

class UMaxError : public std::runtime_error {
public:
    UMaxError(const std::string& what, double best) : std::runtime_error(what), best_value(best) {}
    double best_value;
};

/// Maximizes total utility over all feasible allocations by multi-start
/// projected-gradient ascent with step halving. The first start is the even
/// split; the rest are seeded random interior points.
UMaxResult u_max(const std::vector<CobbDouglasUtility>& utilities, const UMaxOptions& options = {});
UMaxResult u_max(UtilitySetPreset preset, int agents, const UMaxOptions& options = {});

/// Exhaustive search over allocations in `step_units` increments of every
/// good, followed by pairwise-transfer polishing. Exponential in K; intended
/// for K <= 3.
struct GridOracleResult {
    double grid_value = 0.0;
    double polished_value = 0.0;
    Allocation argmax;
};
GridOracleResult grid_u_max(const std::vector<CobbDouglasUtility>& utilities, double step_units = 2.0,
                            Execution execution = Execution::Parallel);

struct Certification {
    double optimizer = 0.0;
    double oracle = 0.0;
    double relative_gap = 0.0;
    bool certified = false;
};
inline constexpr double kCertificationTolerance = 0.005;
/// Accepts the optimizer when it is within 0.5% of the grid oracle.
Certification certify_u_max(const std::vector<CobbDouglasUtility>& utilities, double optimizer_value,
                            Execution execution = Execution::Parallel);

/// Euclidean projection of `x` onto {y >= 0, sum y = total}.
void project_to_simplex(std::span<double> x, double total);

class EconomyEnvironment final : public Environment {
public:
    EconomyEnvironment(UtilitySetPreset preset, int agents, std::optional<Allocation> endowment = std::nullopt);
    EconomyEnvironment(std::vector<CobbDouglasUtility> utilities, std::optional<Allocation> endowment = std::nullopt);

    [[nodiscard]] std::string id() const override { return "economy"; }
    [[nodiscard]] int agent_count() const override { return static_cast<int>(utilities_.size()); }
    [[nodiscard]] int goods() const { return agent_count(); }
    [[nodiscard]] std::string agent_name(AgentIndex agent) const override;
    [[nodiscard]] std::string good_name(int good) const;
    [[nodiscard]] std::string task_description() const override;
    [[nodiscard]] std::string agent_background(AgentIndex agent) const override;
    [[nodiscard]] std::string proposal_format_text() const override;
    [[nodiscard]] std::optional<ProposalBody> canonicalize(const Json& raw, std::string* why) const override;
    [[nodiscard]] std::string describe(const ProposalBody& body) const override;
    [[nodiscard]] std::optional<ProposalBody> initial_state() const override;

    [[nodiscard]] double utility(AgentIndex agent, const ProposalBody& body) const override;
    [[nodiscard]] ProposalBody selfish_proposal(AgentIndex agent) const override;
    [[nodiscard]] ProposalBody neutral_proposal() const override;
    [[nodiscard]] ProposalBody blend(const ProposalBody& from, const std::vector<ProposalBody>& toward,
                                     double lambda) const override;
    [[nodiscard]] ProposalBody random_proposal(Rng& rng) const override;
    [[nodiscard]] std::string scripted_message(AgentIndex agent, const MessageHint& hint) const override;

    [[nodiscard]] const std::vector<CobbDouglasUtility>& utilities() const { return utilities_; }
    [[nodiscard]] const Allocation& endowment() const { return endowment_; }
    /// The utility function as shown to the agent.
    [[nodiscard]] std::string utility_text(AgentIndex agent) const;

    [[nodiscard]] ProposalBody body_of(const Allocation& alloc) const;
    [[nodiscard]] static Allocation allocation_of(const ProposalBody& body);

private:
    std::vector<CobbDouglasUtility> utilities_;
    Allocation endowment_;
};

}  // namespace roundtable
