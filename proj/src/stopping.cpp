#include "roundtable/stopping.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "roundtable/random.hpp"

namespace roundtable {

SimulationRecord simulation_record(const Transcript& t, std::string id, PerformanceSeries performance,
                                   const std::vector<RoundFeatures>* features, std::optional<LabeledSimulation> acts) {
    if (performance.rounds() != static_cast<int>(t.rounds.size())) {
        throw std::invalid_argument("performance series length differs from the transcript's round count");
    }
    SimulationRecord s;
    s.id = std::move(id);
    s.performance = std::move(performance);
    for (const auto& rec : t.rounds) {
        s.selected.push_back(!rec.outcome.deferred());
        s.new_proposal.push_back(rec.any_new_proposal());
    }
    s.info_difference.assign(t.rounds.size(), std::nullopt);
    if (features) {
        for (const auto& f : *features) {
            if (f.round >= 1 && f.round <= static_cast<int>(t.rounds.size())) {
                s.info_difference[static_cast<std::size_t>(f.round - 1)] = f.info_difference;
            }
        }
    }
    s.acts = std::move(acts);
    return s;
}

int oracle_round(const PerformanceSeries& series) {
    if (series.values.empty()) throw std::invalid_argument("empty performance series");
    int best = 1;
    for (int r = 2; r <= series.rounds(); ++r) {
        if (series.better(series.at(r), series.at(best))) best = r;
    }
    return best;
}

namespace {
StopDecision fallback(const SimulationRecord& sim) { return {sim.rounds(), false}; }
}  // namespace

StopDecision first_agreement(const SimulationRecord& sim) {
    for (int r = 1; r <= sim.rounds(); ++r) {
        if (sim.selected[static_cast<std::size_t>(r - 1)]) return {r, true};
    }
    return fallback(sim);
}

StopDecision consecutive_agreements(const SimulationRecord& sim) {
    for (int r = 2; r <= sim.rounds(); ++r) {
        if (sim.selected[static_cast<std::size_t>(r - 2)] && !sim.new_proposal[static_cast<std::size_t>(r - 1)]) {
            return {r, true};
        }
    }
    return fallback(sim);
}

int validation_checkpoint(const std::vector<PerformanceSeries>& train) {
    if (train.empty()) throw std::invalid_argument("validation checkpoint needs at least one training simulation");
    long long sum = 0;
    int rounds = train.front().rounds();
    for (const auto& s : train) sum += oracle_round(s);
    const long long n = static_cast<long long>(train.size());
    const long long half_up = (2 * sum + n) / (2 * n);
    return static_cast<int>(std::clamp<long long>(half_up, 1, rounds));
}

StopDecision stop_at_checkpoint(const SimulationRecord& sim, int checkpoint) {
    const int r = std::clamp(checkpoint, 1, sim.rounds());
    return {r, r < sim.rounds()};
}

double info_diff_threshold(const std::vector<const SimulationRecord*>& train) {
    double sum = 0.0;
    int n = 0;
    for (const auto* s : train) {
        const int r = oracle_round(s->performance);
        if (r == 1) continue;
        const auto& v = s->info_difference[static_cast<std::size_t>(r - 1)];
        if (!v) continue;
        sum += *v;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("information-difference threshold undefined: every oracle round is 1");
    return sum / n;
}

StopDecision info_diff_rule(const SimulationRecord& sim, double threshold) {
    for (int r = 2; r <= sim.rounds(); ++r) {
        const auto& v = sim.info_difference[static_cast<std::size_t>(r - 1)];
        if (v && *v < threshold) return {r, true};
    }
    return fallback(sim);
}

// ---------------------------------------------------------------------- OLS

double t_two_sided_p(double t, int dof) {
    if (dof < 1) throw OlsError("t distribution needs at least one degree of freedom");
    if (std::isnan(t)) return 1.0;
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t dist(static_cast<double>(dof));
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

OLSResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    if (y.size() != n) throw OlsError("design and response have different lengths");
    if (n <= X.cols() && X.cols() > 0 && n <= 1) throw OlsError("OLS needs more rows than columns");
    OLSResult res;

    // Greedy rank pruning by Gram-Schmidt against the kept columns.
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        Eigen::VectorXd v = X.col(c);
        const double norm = v.norm();
        if (norm == 0.0) {
            res.warnings.push_back("column " + std::to_string(c) + " is all zero; dropped");
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) v -= q.dot(v) * q;
        }
        if (v.norm() <= 1e-10 * norm) {
            res.warnings.push_back("column " + std::to_string(c) + " is linearly dependent on earlier columns; dropped");
            continue;
        }
        basis.push_back(v / v.norm());
        res.kept.push_back(static_cast<int>(c));
    }
    const Eigen::Index k = static_cast<Eigen::Index>(res.kept.size());
    if (k == 0) throw OlsError("no usable columns after rank pruning");
    if (n <= k) {
        throw OlsError("OLS needs more rows than kept columns (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    Eigen::MatrixXd Xk(n, k);
    for (Eigen::Index j = 0; j < k; ++j) Xk.col(j) = X.col(res.kept[static_cast<std::size_t>(j)]);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Xk);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < k; ++j) {
        if (R(j, j) == 0.0) throw OlsError("design is singular after pruning");
    }
    res.beta = qr.solve(y);
    const Eigen::VectorXd resid = y - Xk * res.beta;
    res.dof = static_cast<int>(n - k);
    res.sigma2 = resid.squaredNorm() / res.dof;
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd cov_unscaled = Rinv * Rinv.transpose();
    res.se.resize(k);
    res.t.resize(k);
    res.p.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        res.se(j) = std::sqrt(std::max(0.0, res.sigma2 * cov_unscaled(j, j)));
        if (res.se(j) == 0.0) {
            res.t(j) = res.beta(j) == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), res.beta(j));
        } else {
            res.t(j) = res.beta(j) / res.se(j);
        }
        res.p(j) = t_two_sided_p(res.t(j), res.dof);
    }
    return res;
}

// ------------------------------------------------------ dialogue-act pairs

const std::vector<ActPair>& all_act_pairs() {
    static const std::vector<ActPair> pairs = [] {
        std::vector<ActPair> out;
        for (DialogueAct a : kContentActs) {
            for (DialogueAct b : kContentActs) out.emplace_back(a, b);
        }
        return out;
    }();
    return pairs;
}

int pair_count(const LabeledSimulation& acts, int round, const ActPair& pair) {
    if (round < 2 || round > acts.rounds) return 0;
    const auto& before = acts.acts[static_cast<std::size_t>(round - 2)];
    const auto& now = acts.acts[static_cast<std::size_t>(round - 1)];
    int count = 0;
    for (int i = 0; i < acts.agents; ++i) {
        if (!before[static_cast<std::size_t>(i)].count(pair.first)) continue;
        for (int j = 0; j < acts.agents; ++j) {
            if (j != i && now[static_cast<std::size_t>(j)].count(pair.second)) ++count;
        }
    }
    return count;
}

std::vector<FeatureRow> da_pair_features(const SimulationRecord& sim, std::size_t sim_index, DependentVariable dependent) {
    if (!sim.acts) throw std::invalid_argument("simulation " + sim.id + " has no dialogue-act labels");
    const auto& pairs = all_act_pairs();
    std::vector<FeatureRow> rows;
    for (int r = 2; r <= sim.rounds(); ++r) {
        FeatureRow row;
        row.sim = sim_index;
        row.round = r;
        row.x.resize(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p) row.x[p] = pair_count(*sim.acts, r, pairs[p]) > 0 ? 1.0 : 0.0;
        row.y = dependent == DependentVariable::RoundPerformance ? sim.performance.at(r)
                                                                 : sim.performance.at(sim.rounds());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<DAHyperParams> da_grid() {
    const std::optional<double> p_values[] = {0.05, 0.1, 0.2, std::nullopt};
    std::vector<DAHyperParams> grid;
    for (int top = 1; top <= 5; ++top) {
        for (int score = 1; score <= top; ++score) {
            for (auto p : p_values) {
                for (int count = 1; count <= 3; ++count) grid.push_back({top, p, count, score});
            }
        }
    }
    return grid;
}

std::vector<ActPair> ranked_pairs(const OLSResult& fit, std::optional<double> p_threshold, Direction direction,
                                  PairRanking ranking) {
    const auto& pairs = all_act_pairs();
    struct Scored {
        double key;
        std::size_t pair;
    };
    std::vector<Scored> candidates;
    for (std::size_t j = 0; j < fit.kept.size(); ++j) {
        const int column = fit.kept[j];
        if (column == 0) continue;  // intercept
        if (p_threshold && !(fit.p(static_cast<Eigen::Index>(j)) < *p_threshold)) continue;
        const double beta = fit.beta(static_cast<Eigen::Index>(j));
        double key = 0.0;
        if (ranking == PairRanking::AbsoluteMagnitude) {
            key = std::fabs(beta);
            if (key == 0.0) continue;
        } else {
            key = direction == Direction::HigherBetter ? beta : -beta;
            if (!(key > 0.0)) continue;
        }
        candidates.push_back({key, static_cast<std::size_t>(column - 1)});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Scored& a, const Scored& b) { return a.key > b.key; });
    std::vector<ActPair> out;
    for (const auto& c : candidates) out.push_back(pairs[c.pair]);
    return out;
}

StopDecision apply_da_params(const DAHyperParams& params, const std::vector<ActPair>& pairs, const SimulationRecord& sim) {
    if (!sim.acts || pairs.empty()) return fallback(sim);
    for (int r = 2; r <= sim.rounds(); ++r) {
        int score = 0;
        for (const auto& p : pairs) {
            if (pair_count(*sim.acts, r, p) >= params.count_per_round) ++score;
        }
        if (score >= params.score_threshold) return {r, true};
    }
    return fallback(sim);
}

StopDecision apply_da_rule(const DARule& rule, const SimulationRecord& sim) {
    if (!rule.active) return fallback(sim);
    return apply_da_params(rule.params, rule.pairs, sim);
}

DARule da_rule_search(const std::vector<const SimulationRecord*>& train, const DASearchOptions& options) {
    DARule rule;
    if (train.empty()) throw std::invalid_argument("dialogue-act rule search needs training simulations");
    const Direction direction = train.front()->performance.direction;
    const int R = train.front()->rounds();
    for (const auto* s : train) rule.baseline_performance += s->performance.at(R);
    rule.baseline_performance /= static_cast<double>(train.size());
    rule.train_performance = rule.baseline_performance;

    std::vector<FeatureRow> rows;
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto part = da_pair_features(*train[i], i, options.dependent);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    const std::size_t pairs = all_act_pairs().size();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pairs + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        for (std::size_t p = 0; p < pairs; ++p) X(r, static_cast<Eigen::Index>(p + 1)) = rows[i].x[p];
        y(r) = rows[i].y;
    }
    OLSResult fit;
    try {
        fit = ols_fit(X, y);
    } catch (const OlsError& e) {
        rule.warnings.push_back(std::string("OLS failed: ") + e.what());
        return rule;
    }

    const std::optional<double> p_values[] = {0.05, 0.1, 0.2, std::nullopt};
    std::map<int, std::vector<ActPair>> ranked;  // keyed by position in p_values
    auto ranked_for = [&](std::optional<double> p) -> const std::vector<ActPair>& {
        const int key = p ? static_cast<int>(std::lround(*p * 100)) : -1;
        auto it = ranked.find(key);
        if (it == ranked.end()) it = ranked.emplace(key, ranked_pairs(fit, p, direction, options.ranking)).first;
        return it->second;
    };
    (void)p_values;

    std::optional<double> best;
    for (const auto& params : da_grid()) {
        const auto& candidates = ranked_for(params.p_threshold);
        if (candidates.empty()) continue;
        std::vector<ActPair> chosen(candidates.begin(),
                                    candidates.begin() + std::min<std::size_t>(candidates.size(), params.top_da));
        double mean = 0.0;
        for (const auto* s : train) mean += s->performance.at(apply_da_params(params, chosen, *s).stopped_round);
        mean /= static_cast<double>(train.size());
        const bool improves = !best || (direction == Direction::HigherBetter ? mean > *best : mean < *best);
        if (improves) {
            best = mean;
            rule.params = params;
            rule.pairs = std::move(chosen);
        }
    }
    if (best && (direction == Direction::HigherBetter ? *best > rule.baseline_performance
                                                      : *best < rule.baseline_performance)) {
        rule.active = true;
        rule.train_performance = *best;
    } else {
        rule.pairs.clear();
    }
    return rule;
}

// ------------------------------------------------------------- evaluation

std::string_view to_string(RuleId r) {
    switch (r) {
        case RuleId::Oracle: return "oracle";
        case RuleId::AtR: return "at_R";
        case RuleId::FirstAgreement: return "first_agreement";
        case RuleId::ConsecutiveAgreements: return "consecutive_agreements";
        case RuleId::ValidationCheckpoint: return "validation_checkpoint";
        case RuleId::InfoDifference: return "info_difference";
        case RuleId::DialogueAct: return "dialogue_act";
    }
    return "?";
}

RuleId parse_rule(std::string_view name) {
    for (RuleId r : kAllRules) {
        if (to_string(r) == name) return r;
    }
    std::string all;
    for (RuleId r : kAllRules) all += (all.empty() ? "" : ", ") + std::string(to_string(r));
    throw std::invalid_argument("unknown stopping rule '" + std::string(name) + "' (expected one of " + all + ")");
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k-fold needs k >= 2");
    if (n < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("k-fold needs at least k=" + std::to_string(k) + " simulations, got " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {0x6b666f6c64ULL}));
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

CVReport kfold_evaluate(const std::vector<SimulationRecord>& sims, const CVOptions& options, std::string label) {
    if (sims.size() < static_cast<std::size_t>(std::max(options.k, 1))) {
        throw std::invalid_argument("cross-validation needs at least " + std::to_string(options.k) +
                                    " simulations, got " + std::to_string(sims.size()));
    }
    const int R = sims.front().rounds();
    for (const auto& s : sims) {
        if (s.rounds() != R) throw std::invalid_argument("all simulations must have the same number of rounds");
    }
    CVReport report;
    report.label = std::move(label);
    report.k = options.k;
    report.seed = options.seed;
    report.rules = options.rules;
    report.folds = kfold_partition(sims.size(), options.k, options.seed);
    report.decisions.assign(options.rules.size(), std::vector<StopDecision>(sims.size()));

    std::vector<std::vector<FoldResult>> per_fold(report.folds.size());
    for_each_index(options.execution, report.folds.size(), [&](std::size_t f) {
        const auto& test = report.folds[f];
        std::vector<bool> in_test(sims.size(), false);
        for (auto i : test) in_test[i] = true;
        std::vector<const SimulationRecord*> train;
        for (std::size_t i = 0; i < sims.size(); ++i) {
            if (!in_test[i]) train.push_back(&sims[i]);
        }
        for (std::size_t ri = 0; ri < options.rules.size(); ++ri) {
            const RuleId rule = options.rules[ri];
            FoldResult fr{rule, static_cast<int>(f), static_cast<int>(test.size()), 0.0, 0.0, 0.0, std::nullopt, ""};
            std::function<StopDecision(const SimulationRecord&)> decide;
            switch (rule) {
                case RuleId::Oracle:
                    decide = [](const SimulationRecord& s) { return StopDecision{oracle_round(s.performance), true}; };
                    break;
                case RuleId::AtR: decide = [](const SimulationRecord& s) { return fallback(s); }; break;
                case RuleId::FirstAgreement: decide = first_agreement; break;
                case RuleId::ConsecutiveAgreements: decide = consecutive_agreements; break;
                case RuleId::ValidationCheckpoint: {
                    std::vector<PerformanceSeries> series;
                    for (const auto* s : train) series.push_back(s->performance);
                    const int c = validation_checkpoint(series);
                    fr.threshold = c;
                    decide = [c](const SimulationRecord& s) { return stop_at_checkpoint(s, c); };
                    break;
                }
                case RuleId::InfoDifference: {
                    try {
                        const double th = info_diff_threshold(train);
                        fr.threshold = th;
                        decide = [th](const SimulationRecord& s) { return info_diff_rule(s, th); };
                    } catch (const std::invalid_argument& e) {
                        fr.detail = e.what();
                        decide = [](const SimulationRecord& s) { return fallback(s); };
                    }
                    break;
                }
                case RuleId::DialogueAct: {
                    const DARule da = da_rule_search(train, options.da);
                    if (da.active) {
                        fr.threshold = da.params.score_threshold;
                        std::string d = "top_da=" + std::to_string(da.params.top_da) + " p=" +
                                        (da.params.p_threshold ? std::to_string(*da.params.p_threshold).substr(0, 4) : "none") +
                                        " count=" + std::to_string(da.params.count_per_round) +
                                        " score=" + std::to_string(da.params.score_threshold) + " pairs=";
                        for (std::size_t i = 0; i < da.pairs.size(); ++i) {
                            d += (i ? ";" : "") + std::string(to_string(da.pairs[i].first)) + ">" +
                                 std::string(to_string(da.pairs[i].second));
                        }
                        fr.detail = d;
                    } else {
                        fr.detail = "inactive";
                        for (const auto& w : da.warnings) fr.detail += "; " + w;
                    }
                    decide = [da](const SimulationRecord& s) { return apply_da_rule(da, s); };
                    break;
                }
            }
            for (auto i : test) {
                const StopDecision d = decide(sims[i]);
                report.decisions[ri][i] = d;
                fr.mean_performance += sims[i].performance.at(d.stopped_round);
                fr.mean_stopped_round += d.stopped_round;
                if (d.triggered && d.stopped_round < R) fr.effective_ratio += 1.0;
            }
            const double n = static_cast<double>(test.size());
            fr.mean_performance /= n;
            fr.mean_stopped_round /= n;
            fr.effective_ratio /= n;
            per_fold[f].push_back(std::move(fr));
        }
    });
    for (auto& f : per_fold) {
        for (auto& fr : f) report.fold_results.push_back(std::move(fr));
    }

    const double n = static_cast<double>(sims.size());
    for (std::size_t ri = 0; ri < options.rules.size(); ++ri) {
        RuleSummary s{};
        s.rule = options.rules[ri];
        std::vector<double> perf;
        for (std::size_t i = 0; i < sims.size(); ++i) {
            const auto& d = report.decisions[ri][i];
            perf.push_back(sims[i].performance.at(d.stopped_round));
            s.mean_stopped_round += d.stopped_round;
            if (d.triggered && d.stopped_round < R) s.effective_ratio += 1.0;
        }
        s.mean_performance = std::accumulate(perf.begin(), perf.end(), 0.0) / n;
        double ss = 0.0;
        for (double p : perf) ss += (p - s.mean_performance) * (p - s.mean_performance);
        s.standard_error = sims.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
        s.mean_stopped_round /= n;
        s.effective_ratio /= n;
        double th = 0.0;
        int th_n = 0;
        for (const auto& fr : report.fold_results) {
            if (fr.rule == s.rule && fr.threshold) {
                th += *fr.threshold;
                ++th_n;
            }
        }
        if (th_n > 0) s.mean_threshold = th / th_n;
        report.summary.push_back(s);
    }
    return report;
}

namespace {

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 9);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string cv_report_csv(const std::vector<CVReport>& reports) {
    std::string out = "label,rule,fold,test_size,mean_performance,mean_stopped_round,effective_ratio,threshold,detail\n";
    for (const auto& rep : reports) {
        for (const auto& fr : rep.fold_results) {
            out += csv_field(rep.label) + "," + std::string(to_string(fr.rule)) + "," + std::to_string(fr.fold) + "," +
                   std::to_string(fr.test_size) + "," + num(fr.mean_performance) + "," + num(fr.mean_stopped_round) +
                   "," + num(fr.effective_ratio) + "," + (fr.threshold ? num(*fr.threshold) : "") + "," +
                   csv_field(fr.detail) + "\n";
        }
    }
    return out;
}

Json cv_report_json(const std::vector<CVReport>& reports) {
    Json out = Json::array();
    for (const auto& rep : reports) {
        Json rules = Json::object();
        for (const auto& s : rep.summary) {
            rules[std::string(to_string(s.rule))] = {{"mean_performance", s.mean_performance},
                                                     {"standard_error", s.standard_error},
                                                     {"early_stopped_round", s.mean_stopped_round},
                                                     {"effective_ratio", s.effective_ratio},
                                                     {"threshold", s.mean_threshold ? Json(*s.mean_threshold) : Json(nullptr)}};
        }
        out.push_back({{"label", rep.label}, {"k", rep.k}, {"seed", rep.seed}, {"folds", rep.folds}, {"rules", rules}});
    }
    return out;
}

// ---------------------------------------------------------------- synthetic

std::vector<SimulationRecord> synthetic_v_shape(int n, int rounds, int peak, double noise, std::uint64_t seed, int agents) {
    if (rounds < 3 || peak < 2 || peak >= rounds || agents < 2) {
        throw std::invalid_argument("synthetic series need 2 <= peak < rounds and at least 2 agents");
    }
    static const DialogueAct background[] = {DialogueAct::Inform,     DialogueAct::Request, DialogueAct::Propose,
                                             DialogueAct::Evaluate,   DialogueAct::Defend,  DialogueAct::Decline,
                                             DialogueAct::Compromise, DialogueAct::Confirm, DialogueAct::Others};
    std::vector<SimulationRecord> out;
    for (int s = 0; s < n; ++s) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
        auto gauss = [&] {
            const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
        };
        SimulationRecord rec;
        rec.id = "synthetic-" + std::to_string(s);
        rec.performance.direction = Direction::HigherBetter;
        for (int r = 1; r <= rounds; ++r) {
            rec.performance.values.push_back(0.9 - 0.1 * std::abs(r - peak) + noise * gauss());
        }
        const int agree = peak - 1 + static_cast<int>(rng.below(2));
        for (int r = 1; r <= rounds; ++r) {
            rec.selected.push_back(r >= agree);
            rec.new_proposal.push_back(r <= agree);
            rec.info_difference.push_back(r == 1 ? std::nullopt
                                                 : std::optional<double>(0.6 - 0.05 * r + 0.3 * noise * gauss()));
        }
        LabeledSimulation acts;
        acts.id = rec.id;
        acts.rounds = rounds;
        acts.agents = agents;
        for (int r = 1; r <= rounds; ++r) {
            std::vector<ActSet> row(static_cast<std::size_t>(agents));
            for (int i = 0; i < agents; ++i) {
                const int k = 1 + static_cast<int>(rng.below(2));
                for (int j = 0; j < k; ++j) row[static_cast<std::size_t>(i)].insert(background[rng.below(std::size(background))]);
            }
            if (r == peak - 1) row[0] = {DialogueAct::Accept};
            if (r == peak) row[1] = {DialogueAct::Summarize};
            acts.acts.push_back(std::move(row));
            acts.spoke.emplace_back(static_cast<std::size_t>(agents), true);
        }
        rec.acts = std::move(acts);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace roundtable
