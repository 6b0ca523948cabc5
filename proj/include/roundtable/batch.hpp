#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "roundtable/config.hpp"
#include "roundtable/parallel.hpp"
#include "roundtable/rating.hpp"
#include "roundtable/stopping.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

struct BatchOptions {
    int sims = 1;
    /// Simulation i runs with seed seed_base + i.
    std::uint64_t seed_base = 0;
    Execution execution = Execution::Parallel;
    /// Required when the roster has LLM agents.
    std::shared_ptr<const ChatClient> chat;
    /// Seeds that already have a transcript; they are not rerun.
    std::set<std::uint64_t> completed;
    /// Called once per finished simulation, serialized.
    std::function<void(const Transcript&)> on_done;
};

/// Everything a batch shares across simulations.
struct BatchContext {
    RunConfig config;
    std::vector<RatingTask> tasks;  // rating only
    std::optional<double> u_max;    // economy only

    /// Ingests the rating tasks or solves u_max once.
    static BatchContext prepare(RunConfig config, Execution execution = Execution::Parallel);
};

/// One simulation. Rating simulation i works on task i mod |tasks|.
Transcript run_simulation(const BatchContext& ctx, int index, std::uint64_t seed,
                          const std::shared_ptr<const ChatClient>& chat = nullptr);

/// The simulations of the batch that are not already completed, ascending by seed.
std::vector<Transcript> run_batch(const BatchContext& ctx, const BatchOptions& options);

/// Economy: normalized group utility per round, higher is better. Rating:
/// absolute error of the standing prediction per round (always-guess-4 before
/// any acceptance), lower is better.
PerformanceSeries performance_series(const Transcript& t, std::optional<double> u_max);

struct SummaryRow {
    std::string metric;
    double mean = 0.0;
    std::optional<double> standard_error;
    int n = 0;
};

/// Mean and standard error of every reported metric over the batch.
std::vector<SummaryRow> summarize(const std::vector<Transcript>& transcripts, std::optional<double> u_max);

/// One row per simulation and round.
std::string metrics_csv(const std::vector<Transcript>& transcripts, std::optional<double> u_max);
std::string summary_csv(const std::vector<SummaryRow>& rows);
Json summary_json(const std::vector<SummaryRow>& rows);

/// Fixed-point decimal text with `digits` places, locale independent.
std::string fixed(double v, int digits = 9);

}  // namespace roundtable
