#include "roundtable/economy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "roundtable/prompts.hpp"

namespace roundtable {

// ---------------------------------------------------------------- Allocation

Allocation Allocation::even_split(int agents, int goods) {
    Allocation a(agents, goods);
    std::fill(a.a_.begin(), a.a_.end(), kGoodQuantity / agents);
    return a;
}

bool Allocation::feasible(double tolerance) const {
    for (int k = 0; k < goods_; ++k) {
        double sum = 0.0;
        for (int i = 0; i < agents_; ++i) {
            if (!(at(i, k) >= 0.0)) return false;
            sum += at(i, k);
        }
        if (std::fabs(sum - kGoodQuantity) > tolerance) return false;
    }
    return true;
}

Json Allocation::to_json() const {
    Json rows = Json::array();
    for (int i = 0; i < agents_; ++i) {
        Json row = Json::array();
        for (int k = 0; k < goods_; ++k) row.push_back(at(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Allocation Allocation::from_json(const Json& rows) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
        throw std::invalid_argument("allocation must be a nonempty array of rows");
    }
    const int agents = static_cast<int>(rows.size());
    const int goods = static_cast<int>(rows[0].size());
    Allocation a(agents, goods);
    for (int i = 0; i < agents; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != goods) {
            throw std::invalid_argument("allocation rows must all have the same length");
        }
        for (int k = 0; k < goods; ++k) {
            if (!rows[i][k].is_number()) throw std::invalid_argument("allocation entries must be numbers");
            a.at(i, k) = rows[i][k].get<double>();
        }
    }
    return a;
}

// ----------------------------------------------------------------- utilities

std::string_view to_string(UtilitySetPreset p) {
    switch (p) {
        case UtilitySetPreset::AsymmetricLiteral: return "AsymmetricLiteral";
        case UtilitySetPreset::AsymmetricNormalized: return "AsymmetricNormalized";
        case UtilitySetPreset::Symmetric: return "Symmetric";
        case UtilitySetPreset::Uniform: return "Uniform";
    }
    return "?";
}

UtilitySetPreset parse_preset(std::string_view name) {
    for (auto p : {UtilitySetPreset::AsymmetricLiteral, UtilitySetPreset::AsymmetricNormalized,
                   UtilitySetPreset::Symmetric, UtilitySetPreset::Uniform}) {
        if (to_string(p) == name) return p;
    }
    throw std::invalid_argument("unknown utility set '" + std::string(name) +
                                "'; valid values: AsymmetricLiteral, AsymmetricNormalized, Symmetric, Uniform");
}

std::vector<CobbDouglasUtility> make_utilities(UtilitySetPreset preset, int agents) {
    if (agents < 2) throw std::invalid_argument("utility sets need at least 2 agents");
    const double k = agents;
    std::vector<CobbDouglasUtility> out(static_cast<std::size_t>(agents));
    for (int i = 0; i < agents; ++i) {
        auto& theta = out[i].theta;
        switch (preset) {
            case UtilitySetPreset::AsymmetricLiteral:
                theta.assign(agents, 0.2 / k);
                theta[i] = 0.8;
                break;
            case UtilitySetPreset::AsymmetricNormalized:
                theta.assign(agents, 0.2 / (k - 1));
                theta[i] = 0.8;
                break;
            case UtilitySetPreset::Symmetric:
                theta.assign(agents, 0.2 / k);
                theta[0] = 0.8;
                break;
            case UtilitySetPreset::Uniform: theta.assign(agents, 1.0 / k); break;
        }
    }
    return out;
}

double cobb_douglas(std::span<const double> amounts, std::span<const double> theta) {
    if (amounts.size() != theta.size()) throw std::invalid_argument("amount/exponent length mismatch");
    double u = 1.0;
    for (std::size_t k = 0; k < amounts.size(); ++k) {
        if (amounts[k] < 0.0) throw std::domain_error("negative amount in Cobb-Douglas utility");
        if (theta[k] == 0.0) continue;
        if (amounts[k] == 0.0) return 0.0;
        u *= std::pow(amounts[k], theta[k]);
    }
    return u;
}

double group_total(const Allocation& alloc, const std::vector<CobbDouglasUtility>& utilities) {
    double total = 0.0;
    for (int i = 0; i < alloc.agents(); ++i) total += cobb_douglas(alloc.row(i), utilities.at(i).theta);
    return total;
}

// ----------------------------------------------------------------- optimizer

void project_to_simplex(std::span<double> x, double total) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0, threshold = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double t = (cumulative - total) / static_cast<double>(j + 1);
        if (sorted[j] - t > 0.0) threshold = t;
    }
    for (auto& v : x) v = std::max(v - threshold, 0.0);
}

namespace {

constexpr double kGradientFloor = 1e-9;

struct AscentOutcome {
    double value = 0.0;
    Allocation x;
    bool converged = false;
};

void project_columns(Allocation& a) {
    std::vector<double> column(static_cast<std::size_t>(a.agents()));
    for (int k = 0; k < a.goods(); ++k) {
        for (int i = 0; i < a.agents(); ++i) column[i] = a.at(i, k);
        project_to_simplex(column, kGoodQuantity);
        for (int i = 0; i < a.agents(); ++i) a.at(i, k) = column[i];
    }
}

void gradient(const Allocation& x, const std::vector<CobbDouglasUtility>& utilities, Allocation& g) {
    for (int i = 0; i < x.agents(); ++i) {
        double u = 1.0;
        for (int k = 0; k < x.goods(); ++k) {
            const double th = utilities[i].theta[k];
            if (th != 0.0) u *= std::pow(std::max(x.at(i, k), kGradientFloor), th);
        }
        for (int k = 0; k < x.goods(); ++k) {
            g.at(i, k) = utilities[i].theta[k] * u / std::max(x.at(i, k), kGradientFloor);
        }
    }
}

AscentOutcome ascend(const std::vector<CobbDouglasUtility>& utilities, Allocation x, const UMaxOptions& opt) {
    AscentOutcome out;
    double f = group_total(x, utilities);
    double step = 1.0;
    Allocation g(x.agents(), x.goods());
    Allocation trial(x.agents(), x.goods());
    for (int it = 0; it < opt.max_iterations; ++it) {
        gradient(x, utilities, g);
        double f_trial = f;
        bool improved = false;
        while (step > 1e-18) {
            for (std::size_t j = 0; j < trial.data().size(); ++j) {
                trial.data()[j] = x.data()[j] + step * g.data()[j];
            }
            project_columns(trial);
            f_trial = group_total(trial, utilities);
            if (f_trial > f) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {  // no ascent direction left at any step size
            out.converged = true;
            break;
        }
        const double gain = f_trial - f;
        x = trial;
        f = f_trial;
        step = std::min(step * 2.0, 1e6);
        if (gain < opt.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.value = f;
    out.x = std::move(x);
    return out;
}

Allocation random_interior(int agents, int goods, Rng& rng) {
    Allocation a(agents, goods);
    for (int k = 0; k < goods; ++k) {
        double sum = 0.0;
        for (int i = 0; i < agents; ++i) {
            a.at(i, k) = -std::log(1.0 - rng.uniform()) + 1e-3;
            sum += a.at(i, k);
        }
        for (int i = 0; i < agents; ++i) a.at(i, k) *= kGoodQuantity / sum;
    }
    return a;
}

}  // namespace

UMaxResult u_max(const std::vector<CobbDouglasUtility>& utilities, const UMaxOptions& options) {
    const int agents = static_cast<int>(utilities.size());
    if (agents < 2) throw std::invalid_argument("u_max needs at least 2 agents");
    const int starts = std::max(options.starts, 1);
    std::vector<AscentOutcome> results(static_cast<std::size_t>(starts));
    for_each_index(options.execution, results.size(), [&](std::size_t s) {
        Allocation x0;
        if (s == 0) {
            x0 = Allocation::even_split(agents, agents);
        } else {
            Rng rng(derive_seed(options.seed, {s}));
            x0 = random_interior(agents, agents, rng);
        }
        results[s] = ascend(utilities, std::move(x0), options);
    });

    UMaxResult best;
    double best_any = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& r : results) {
        best_any = std::max(best_any, r.value);
        if (!r.converged) continue;
        ++best.converged_starts;
        if (!found || r.value > best.value) {
            best.value = r.value;
            best.argmax = r.x;
            found = true;
        }
    }
    if (!found) throw UMaxError("u_max: no start converged", best_any);
    return best;
}

UMaxResult u_max(UtilitySetPreset preset, int agents, const UMaxOptions& options) {
    return u_max(make_utilities(preset, agents), options);
}

// --------------------------------------------------------------- grid oracle

namespace {

void compositions(int total, int parts, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        current.push_back(total);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int v = 0; v <= total; ++v) {
        current.push_back(v);
        compositions(total - v, parts - 1, current, out);
        current.pop_back();
    }
}

struct GridBest {
    double value = -1.0;
    std::vector<std::size_t> choice;  // composition index per good
};

struct GridSearch {
    const std::vector<std::vector<int>>& comps;
    // table[(i * goods + k) * (levels) + m] = (m * step)^theta_ik
    const std::vector<double>& table;
    int agents;
    int goods;
    int levels;

    double power(int i, int k, int m) const { return table[(std::size_t(i) * goods + k) * levels + m]; }

    void search(int k, std::vector<double>& partial, std::vector<std::size_t>& choice, GridBest& best) const {
        if (k == goods - 1) {
            for (std::size_t c = 0; c < comps.size(); ++c) {
                const auto& comp = comps[c];
                double s = 0.0;
                for (int i = 0; i < agents; ++i) s += partial[i] * power(i, k, comp[i]);
                if (s > best.value) {
                    best.value = s;
                    choice[k] = c;
                    best.choice = choice;
                }
            }
            return;
        }
        std::vector<double> next(partial.size());
        for (std::size_t c = 0; c < comps.size(); ++c) {
            const auto& comp = comps[c];
            for (int i = 0; i < agents; ++i) next[i] = partial[i] * power(i, k, comp[i]);
            choice[k] = c;
            search(k + 1, next, choice, best);
        }
    }
};

void polish(Allocation& x, const std::vector<CobbDouglasUtility>& utilities, double start_delta) {
    double f = group_total(x, utilities);
    for (double delta = start_delta; delta > 1e-10; delta *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (int k = 0; k < x.goods(); ++k) {
                for (int to = 0; to < x.agents(); ++to) {
                    for (int from = 0; from < x.agents(); ++from) {
                        if (to == from) continue;
                        const double amount = std::min(delta, x.at(from, k));
                        if (amount <= 0.0) continue;
                        x.at(from, k) -= amount;
                        x.at(to, k) += amount;
                        const double f_new = group_total(x, utilities);
                        if (f_new > f) {
                            f = f_new;
                            moved = true;
                        } else {
                            x.at(from, k) += amount;
                            x.at(to, k) -= amount;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

GridOracleResult grid_u_max(const std::vector<CobbDouglasUtility>& utilities, double step_units,
                            Execution execution) {
    const int agents = static_cast<int>(utilities.size());
    const int goods = agents;
    const int units = static_cast<int>(std::lround(kGoodQuantity / step_units));
    if (agents < 2 || units < 1) throw std::invalid_argument("grid oracle needs >= 2 agents and a positive step");

    std::vector<std::vector<int>> comps;
    std::vector<int> scratch;
    compositions(units, agents, scratch, comps);

    const int levels = units + 1;
    std::vector<double> table(std::size_t(agents) * goods * levels);
    for (int i = 0; i < agents; ++i)
        for (int k = 0; k < goods; ++k)
            for (int m = 0; m < levels; ++m) {
                const double th = utilities[i].theta[k];
                const double amount = m * step_units;
                table[(std::size_t(i) * goods + k) * levels + m] = th == 0.0 ? 1.0 : std::pow(amount, th);
            }

    GridSearch search{comps, table, agents, goods, levels};
    std::vector<GridBest> per_top(comps.size());
    for_each_index(execution, comps.size(), [&](std::size_t c0) {
        std::vector<double> partial(static_cast<std::size_t>(agents));
        for (int i = 0; i < agents; ++i) partial[i] = search.power(i, 0, comps[c0][i]);
        std::vector<std::size_t> choice(static_cast<std::size_t>(goods), 0);
        choice[0] = c0;
        if (goods == 1) {
            double s = std::accumulate(partial.begin(), partial.end(), 0.0);
            per_top[c0] = {s, choice};
        } else {
            search.search(1, partial, choice, per_top[c0]);
        }
    });

    // Lowest top-level index wins ties, so both execution modes agree.
    const GridBest* best = &per_top.front();
    for (const auto& b : per_top) {
        if (b.value > best->value) best = &b;
    }

    GridOracleResult out;
    out.grid_value = best->value;
    out.argmax = Allocation(agents, goods);
    for (int k = 0; k < goods; ++k) {
        const auto& comp = comps[best->choice[k]];
        for (int i = 0; i < agents; ++i) out.argmax.at(i, k) = comp[i] * step_units;
    }
    polish(out.argmax, utilities, step_units / 2.0);
    out.polished_value = group_total(out.argmax, utilities);
    return out;
}

Certification certify_u_max(const std::vector<CobbDouglasUtility>& utilities, double optimizer_value,
                            Execution execution) {
    Certification c;
    c.optimizer = optimizer_value;
    c.oracle = grid_u_max(utilities, 2.0, execution).polished_value;
    c.relative_gap = std::fabs(optimizer_value - c.oracle) / std::max(std::fabs(c.oracle), 1e-300);
    c.certified = c.relative_gap <= kCertificationTolerance;
    return c;
}

// --------------------------------------------------------------- environment

namespace {

constexpr double kMicro = 1e6;

std::string trim_number(double v, int decimals) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    std::string s(buf, res.ptr);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.append(sep);
        out.append(items[i]);
    }
    return out;
}

}  // namespace

EconomyEnvironment::EconomyEnvironment(UtilitySetPreset preset, int agents, std::optional<Allocation> endowment)
    : EconomyEnvironment(make_utilities(preset, agents), std::move(endowment)) {}

EconomyEnvironment::EconomyEnvironment(std::vector<CobbDouglasUtility> utilities, std::optional<Allocation> endowment)
    : utilities_(std::move(utilities)) {
    const int k = static_cast<int>(utilities_.size());
    if (k < 2) throw std::invalid_argument("economy needs at least 2 agents");
    for (const auto& u : utilities_) {
        if (static_cast<int>(u.theta.size()) != k) throw std::invalid_argument("economy needs K goods for K agents");
    }
    endowment_ = endowment ? *endowment : Allocation::even_split(k, k);
    if (endowment_.agents() != k || endowment_.goods() != k || !endowment_.feasible()) {
        throw std::invalid_argument("endowment must be a feasible K x K allocation");
    }
}

std::string EconomyEnvironment::agent_name(AgentIndex agent) const { return "A" + std::to_string(agent + 1); }
std::string EconomyEnvironment::good_name(int good) const { return "good_" + std::to_string(good + 1); }

std::string EconomyEnvironment::utility_text(AgentIndex agent) const {
    std::vector<std::string> factors;
    for (int k = 0; k < goods(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", utilities_.at(agent).theta[k]);
        factors.push_back(good_name(k) + "^" + buf);
    }
    return "u = " + join(factors, " * ");
}

std::string EconomyEnvironment::task_description() const {
    std::vector<std::string> agents, goods_list, totals;
    for (int i = 0; i < agent_count(); ++i) agents.push_back(agent_name(i));
    for (int k = 0; k < goods(); ++k) {
        goods_list.push_back(good_name(k));
        totals.push_back(good_name(k) + ": " + trim_number(kGoodQuantity, 6));
    }
    return render_template(TemplateId::EconomyTask, {{"num_of_agents", std::to_string(agent_count())},
                                                     {"list_of_agents", join(agents, ", ")},
                                                     {"num_of_goods", std::to_string(goods())},
                                                     {"list_of_goods", join(goods_list, ", ")},
                                                     {"total_num_of_goods", join(totals, ", ")}});
}

std::string EconomyEnvironment::agent_background(AgentIndex agent) const {
    return render_template(TemplateId::EconomyGoal, {{"util_func", utility_text(agent)}});
}

std::string EconomyEnvironment::proposal_format_text() const {
    std::vector<std::string> rows;
    std::vector<std::string> amounts;
    for (int k = 0; k < goods(); ++k) amounts.push_back("<amount of " + good_name(k) + ">");
    for (int i = 0; i < agent_count(); ++i) rows.push_back("\"" + agent_name(i) + "\": [" + join(amounts, ", ") + "]");
    return "{" + join(rows, ", ") + "}";
}

std::optional<ProposalBody> EconomyEnvironment::canonicalize(const Json& raw, std::string* why) const {
    auto fail = [&](std::string reason) -> std::optional<ProposalBody> {
        if (why) *why = std::move(reason);
        return std::nullopt;
    };
    const int k = agent_count();
    Allocation a(k, k);
    try {
        if (raw.is_object() && raw.contains("allocation")) {
            a = Allocation::from_json(raw.at("allocation"));
        } else if (raw.is_object()) {
            for (int i = 0; i < k; ++i) {
                auto it = raw.find(agent_name(i));
                if (it == raw.end()) return fail("missing row for " + agent_name(i));
                const Json& row = *it;
                if (row.is_array()) {
                    if (static_cast<int>(row.size()) != k) return fail("row for " + agent_name(i) + " has wrong length");
                    for (int g = 0; g < k; ++g) {
                        if (!row[g].is_number()) return fail("non-numeric amount");
                        a.at(i, g) = row[g].get<double>();
                    }
                } else if (row.is_object()) {
                    for (int g = 0; g < k; ++g) {
                        auto cell = row.find(good_name(g));
                        if (cell == row.end() || !cell->is_number()) return fail("missing amount of " + good_name(g));
                        a.at(i, g) = cell->get<double>();
                    }
                } else {
                    return fail("row for " + agent_name(i) + " is not a list");
                }
            }
        } else {
            return fail("proposal is not an object");
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    if (a.agents() != k || a.goods() != k) return fail("allocation has wrong shape");
    if (!a.feasible(kConservationTolerance)) return fail("allocation is negative or does not use every good exactly");

    // Snap to micro-units, then push residual rounding onto the largest holder
    // so every column sums to exactly 100.
    for (int g = 0; g < k; ++g) {
        std::vector<long long> micro(static_cast<std::size_t>(k));
        long long sum = 0;
        int largest = 0;
        for (int i = 0; i < k; ++i) {
            micro[i] = std::llround(a.at(i, g) * kMicro);
            sum += micro[i];
            if (micro[i] > micro[largest]) largest = i;
        }
        micro[largest] += static_cast<long long>(kGoodQuantity * kMicro) - sum;
        for (int i = 0; i < k; ++i) a.at(i, g) = static_cast<double>(micro[i]) / kMicro;
    }
    return body_of(a);
}

ProposalBody EconomyEnvironment::body_of(const Allocation& alloc) const {
    Json rows = Json::array();
    for (int i = 0; i < alloc.agents(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < alloc.goods(); ++k) row.push_back(static_cast<double>(alloc.at(i, k)));
        rows.push_back(std::move(row));
    }
    return ProposalBody::from_payload(Json{{"allocation", std::move(rows)}});
}

Allocation EconomyEnvironment::allocation_of(const ProposalBody& body) {
    return Allocation::from_json(body.payload.at("allocation"));
}

std::string EconomyEnvironment::describe(const ProposalBody& body) const {
    const Allocation a = allocation_of(body);
    std::vector<std::string> rows;
    for (int i = 0; i < a.agents(); ++i) {
        std::vector<std::string> cells;
        for (int k = 0; k < a.goods(); ++k) cells.push_back(trim_number(a.at(i, k), 6));
        rows.push_back("\"" + agent_name(i) + "\": [" + join(cells, ", ") + "]");
    }
    return "{" + join(rows, ", ") + "}";
}

std::optional<ProposalBody> EconomyEnvironment::initial_state() const { return body_of(endowment_); }

double EconomyEnvironment::utility(AgentIndex agent, const ProposalBody& body) const {
    const Allocation a = allocation_of(body);
    return cobb_douglas(a.row(agent), utilities_.at(agent).theta);
}

ProposalBody EconomyEnvironment::selfish_proposal(AgentIndex agent) const {
    const int k = agent_count();
    Allocation a(k, k);
    for (int g = 0; g < k; ++g) a.at(agent, g) = kGoodQuantity;
    return body_of(a);
}

ProposalBody EconomyEnvironment::neutral_proposal() const {
    return *canonicalize(Json{{"allocation", Allocation::even_split(agent_count(), agent_count()).to_json()}}, nullptr);
}

ProposalBody EconomyEnvironment::blend(const ProposalBody& from, const std::vector<ProposalBody>& toward,
                                       double lambda) const {
    if (toward.empty()) return from;
    Allocation a = allocation_of(from);
    Allocation mean(a.agents(), a.goods());
    for (const auto& t : toward) {
        const Allocation b = allocation_of(t);
        for (std::size_t j = 0; j < mean.data().size(); ++j) mean.data()[j] += b.data()[j] / toward.size();
    }
    for (std::size_t j = 0; j < a.data().size(); ++j) {
        a.data()[j] = std::max(0.0, a.data()[j] + lambda * (mean.data()[j] - a.data()[j]));
    }
    // Renormalize columns against accumulated floating error before snapping.
    for (int g = 0; g < a.goods(); ++g) {
        double sum = 0.0;
        for (int i = 0; i < a.agents(); ++i) sum += a.at(i, g);
        for (int i = 0; i < a.agents(); ++i) a.at(i, g) *= kGoodQuantity / sum;
    }
    return *canonicalize(Json{{"allocation", a.to_json()}}, nullptr);
}

ProposalBody EconomyEnvironment::random_proposal(Rng& rng) const {
    Allocation a(agent_count(), goods());
    for (int g = 0; g < goods(); ++g) {
        double sum = 0.0;
        for (int i = 0; i < agent_count(); ++i) {
            a.at(i, g) = -std::log(1.0 - rng.uniform());
            sum += a.at(i, g);
        }
        for (int i = 0; i < agent_count(); ++i) a.at(i, g) *= kGoodQuantity / sum;
    }
    return *canonicalize(Json{{"allocation", a.to_json()}}, nullptr);
}

std::string EconomyEnvironment::scripted_message(AgentIndex agent, const MessageHint& hint) const {
    std::ostringstream out;
    const auto& theta = utilities_.at(agent).theta;
    const int favorite = static_cast<int>(std::max_element(theta.begin(), theta.end()) - theta.begin());
    out << "This is " << agent_name(agent) << " in round " << hint.round << ". ";
    if (hint.stance == "selfish") {
        out << "I value " << good_name(favorite) << " the most and I propose that I keep all of the goods.";
    } else if (hint.stance == "even_split") {
        out << "I propose that we split every good evenly so each agent receives "
            << trim_number(kGoodQuantity / agent_count(), 2) << " units.";
    } else if (hint.stance == "concessive") {
        out << "I am willing to compromise and move my proposal toward yours.";
    } else {
        out << "Here is my current thinking about the market.";
    }
    if (hint.own_latest) {
        const Allocation mine = allocation_of(*hint.own_latest);
        out << " My latest proposal gives me " << trim_number(mine.at(agent, favorite), 2) << " units of "
            << good_name(favorite) << ".";
    }
    if (hint.standing) {
        const Allocation standing = allocation_of(*hint.standing);
        out << " The current allocation gives me " << trim_number(standing.at(agent, favorite), 2) << " units of "
            << good_name(favorite) << ". Do you accept it?";
    } else {
        out << " Nothing has been accepted yet. What do you need?";
    }
    return out.str();
}

}  // namespace roundtable
