#include "roundtable/batch.hpp"

#include <charconv>
#include <cmath>
#include <mutex>

#include "roundtable/engine.hpp"
#include "roundtable/metrics.hpp"

namespace roundtable {

std::string fixed(double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

BatchContext BatchContext::prepare(RunConfig config, Execution execution) {
    BatchContext ctx;
    ctx.config = std::move(config);
    if (ctx.config.engine.environment == "rating") {
        ctx.tasks = ingest_tables(ctx.config.tasks);
    } else {
        UMaxOptions opts;
        opts.execution = execution;
        ctx.u_max = roundtable::u_max(parse_preset(ctx.config.engine.utility_set), ctx.config.engine.agents, opts).value;
    }
    return ctx;
}

Transcript run_simulation(const BatchContext& ctx, int index, std::uint64_t seed,
                          const std::shared_ptr<const ChatClient>& chat) {
    EngineConfig engine = ctx.config.engine;
    engine.seed = seed;
    std::unique_ptr<Environment> env;
    Json info;
    if (engine.environment == "rating") {
        if (ctx.tasks.empty()) throw std::invalid_argument("no rating tasks loaded");
        const RatingTask& task = ctx.tasks[static_cast<std::size_t>(index) % ctx.tasks.size()];
        engine.utility_set = task.id;
        info = {{"task", task.id}, {"gold", task.gold_rating}};
        env = std::make_unique<RatingEnvironment>(task);
    } else {
        auto econ = std::make_unique<EconomyEnvironment>(parse_preset(engine.utility_set), engine.agents,
                                                         ctx.config.endowment);
        Json theta = Json::array();
        for (const auto& u : econ->utilities()) theta.push_back(u.theta);
        info = {{"theta", theta}, {"endowment", econ->endowment().to_json()}};
        env = std::move(econ);
    }

    std::vector<std::unique_ptr<AgentPolicy>> owned;
    for (const auto& slot : roster_for(ctx.config, seed)) {
        if (slot.llm) {
            if (!chat) throw std::invalid_argument("the roster has LLM agents but no chat client is configured");
            owned.push_back(std::make_unique<LlmPolicy>(chat, ctx.config.llm.model));
        } else {
            owned.push_back(std::make_unique<ScriptedPolicy>(slot.scripted, seed));
        }
    }
    std::vector<const AgentPolicy*> policies;
    for (const auto& p : owned) policies.push_back(p.get());
    Transcript t = run_collaboration(engine, policies, *env);
    t.environment_info = std::move(info);
    return t;
}

std::vector<Transcript> run_batch(const BatchContext& ctx, const BatchOptions& options) {
    if (options.sims < 0) throw std::invalid_argument("simulation count must be >= 0");
    std::vector<int> todo;
    for (int i = 0; i < options.sims; ++i) {
        if (!options.completed.count(options.seed_base + static_cast<std::uint64_t>(i))) todo.push_back(i);
    }
    std::vector<Transcript> out(todo.size());
    std::mutex done_mutex;
    for_each_index(options.execution, todo.size(), [&](std::size_t k) {
        const int i = todo[k];
        out[k] = run_simulation(ctx, i, options.seed_base + static_cast<std::uint64_t>(i), options.chat);
        if (options.on_done) {
            std::lock_guard<std::mutex> lock(done_mutex);
            options.on_done(out[k]);
        }
    });
    return out;
}

namespace {

bool is_rating(const Transcript& t) { return t.config.environment == "rating"; }

int gold_of(const Transcript& t) { return t.environment_info.at("gold").get<int>(); }

double require_u_max(std::optional<double> u_max) {
    if (!u_max) throw std::invalid_argument("economy metrics need u_max");
    return *u_max;
}

SummaryRow row_of(std::string metric, const std::vector<double>& xs) {
    SummaryRow r{std::move(metric), 0.0, std::nullopt, static_cast<int>(xs.size())};
    if (xs.empty()) return r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.standard_error = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    }
    return r;
}

}  // namespace

PerformanceSeries performance_series(const Transcript& t, std::optional<double> u_max) {
    PerformanceSeries s;
    if (is_rating(t)) {
        s.direction = Direction::LowerBetter;
        const int gold = gold_of(t);
        for (const auto& p : rating_predictions(t)) s.values.push_back(std::fabs(p.value_or(kAlwaysGuess) - gold));
    } else {
        s.direction = Direction::HigherBetter;
        s.values = econ_metrics(t, economy_from_transcript(t), require_u_max(u_max)).utility;
    }
    return s;
}

std::vector<SummaryRow> summarize(const std::vector<Transcript>& transcripts, std::optional<double> u_max) {
    std::vector<SummaryRow> rows;
    if (transcripts.empty()) return rows;
    const int R = transcripts.front().config.rounds;
    if (is_rating(transcripts.front())) {
        std::vector<std::vector<std::optional<double>>> preds;
        std::vector<int> gold;
        for (const auto& t : transcripts) {
            preds.push_back(rating_predictions(t));
            gold.push_back(gold_of(t));
        }
        const RatingMetrics m = rating_metrics(preds, gold);
        for (int r = 1; r <= R; ++r) {
            std::vector<double> abs_err, imputed;
            for (std::size_t e = 0; e < preds.size(); ++e) {
                const auto& p = preds[e][static_cast<std::size_t>(r - 1)];
                abs_err.push_back(std::fabs(p.value_or(kAlwaysGuess) - gold[e]));
                imputed.push_back(p ? 0.0 : 1.0);
            }
            rows.push_back(row_of("mae_r" + std::to_string(r), abs_err));
            rows.push_back({"rmse_r" + std::to_string(r), m.rmse[static_cast<std::size_t>(r - 1)], std::nullopt,
                            static_cast<int>(preds.size())});
            rows.push_back(row_of("imputed_r" + std::to_string(r), imputed));
        }
        const auto [mae4, rmse4] = always_guess_baseline(gold);
        rows.push_back({"always_guess_mae", mae4, std::nullopt, static_cast<int>(gold.size())});
        rows.push_back({"always_guess_rmse", rmse4, std::nullopt, static_cast<int>(gold.size())});
        return rows;
    }
    const double um = require_u_max(u_max);
    std::vector<EconMetrics> ms;
    for (const auto& t : transcripts) ms.push_back(econ_metrics(t, economy_from_transcript(t), um));
    auto collect = [&](auto get) {
        std::vector<double> xs;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            if (auto v = get(ms[i], transcripts[i])) xs.push_back(*v);
        }
        return xs;
    };
    using Opt = std::optional<double>;
    rows.push_back(row_of("u_max", {um}));
    rows.push_back(row_of("u0", collect([](const EconMetrics& m, const Transcript&) -> Opt { return m.u0; })));
    for (int r = 1; r <= R; ++r) {
        rows.push_back(row_of("utility_r" + std::to_string(r), collect([r](const EconMetrics& m, const Transcript&) -> Opt {
                                  return m.utility[static_cast<std::size_t>(r - 1)];
                              })));
    }
    rows.push_back(row_of("auc3", collect([](const EconMetrics& m, const Transcript&) { return m.auc3; })));
    rows.push_back(row_of("auc5", collect([](const EconMetrics& m, const Transcript&) { return m.auc5; })));
    rows.push_back(row_of("auc10", collect([](const EconMetrics& m, const Transcript&) { return m.auc10; })));
    rows.push_back(row_of("minmax", collect([](const EconMetrics& m, const Transcript&) -> Opt { return m.minmax; })));
    rows.push_back(
        row_of("rationality", collect([](const EconMetrics& m, const Transcript&) -> Opt { return m.rationality; })));
    rows.push_back(row_of("rigidity", collect([](const EconMetrics& m, const Transcript&) -> Opt { return m.rigidity; })));
    rows.push_back(row_of("agreement", collect([](const EconMetrics&, const Transcript& t) -> Opt {
                              return t.final_decision ? 1.0 : 0.0;
                          })));
    return rows;
}

std::string metrics_csv(const std::vector<Transcript>& transcripts, std::optional<double> u_max) {
    std::string out;
    if (transcripts.empty()) return "seed,round\n";
    if (is_rating(transcripts.front())) {
        out = "seed,task,round,prediction,gold,abs_error,imputed\n";
        for (const auto& t : transcripts) {
            const int gold = gold_of(t);
            const auto preds = rating_predictions(t);
            for (std::size_t r = 0; r < preds.size(); ++r) {
                const double p = preds[r].value_or(kAlwaysGuess);
                out += std::to_string(t.seed) + "," + t.config.utility_set + "," + std::to_string(r + 1) + "," +
                       fixed(p, 2) + "," + std::to_string(gold) + "," + fixed(std::fabs(p - gold), 2) + "," +
                       (preds[r] ? "0" : "1") + "\n";
            }
        }
        return out;
    }
    out = "seed,round,utility,selected,standing\n";
    const double um = require_u_max(u_max);
    for (const auto& t : transcripts) {
        const EconMetrics m = econ_metrics(t, economy_from_transcript(t), um);
        for (std::size_t r = 0; r < m.utility.size(); ++r) {
            const auto& rec = t.rounds[r];
            const auto standing = t.standing_after(static_cast<int>(r + 1));
            out += std::to_string(t.seed) + "," + std::to_string(r + 1) + "," + fixed(m.utility[r]) + "," +
                   (rec.outcome.selected ? std::to_string(*rec.outcome.selected) : "") + "," +
                   (standing ? std::to_string(*standing) : "") + "\n";
        }
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "metric,mean,standard_error,n\n";
    for (const auto& r : rows) {
        out += r.metric + "," + fixed(r.mean) + "," + (r.standard_error ? fixed(*r.standard_error) : "") + "," +
               std::to_string(r.n) + "\n";
    }
    return out;
}

Json summary_json(const std::vector<SummaryRow>& rows) {
    Json out = Json::object();
    for (const auto& r : rows) {
        out[r.metric] = {{"mean", r.mean},
                         {"standard_error", r.standard_error ? Json(*r.standard_error) : Json(nullptr)},
                         {"n", r.n}};
    }
    return out;
}

}  // namespace roundtable
