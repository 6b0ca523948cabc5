#include "roundtable/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "roundtable/random.hpp"

namespace roundtable {

namespace {

std::string join_lines(const std::vector<std::string>& errors) {
    std::string out = "invalid configuration:";
    for (const auto& e : errors) out += "\n  - " + e;
    return out;
}

const std::set<std::string> kKnownKeys = {"environment", "mechanism", "rounds",     "agents",
                                          "utility_set", "endowment", "seed",       "roster",
                                          "tasks",       "llm",       "max_attempts", "reasoning_visible",
                                          "integer_cumulative"};

template <typename T>
std::optional<T> read(const Json& j, const char* key, const char* kind, std::vector<std::string>& errors) {
    if (!j.contains(key)) return std::nullopt;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        errors.push_back(std::string("'") + key + "' must be " + kind + " (got " + j.at(key).dump() + ")");
        return std::nullopt;
    }
}

std::optional<AgentSlot> parse_slot(const Json& entry, std::size_t index, std::vector<std::string>& errors) {
    const std::string where = "roster[" + std::to_string(index) + "]";
    std::string policy;
    Json params = Json::object();
    if (entry.is_string()) {
        policy = entry.get<std::string>();
    } else if (entry.is_object() && entry.contains("policy") && entry.at("policy").is_string()) {
        policy = entry.at("policy").get<std::string>();
        params = entry;
    } else {
        errors.push_back(where + " must be a policy name or an object with a 'policy' string");
        return std::nullopt;
    }
    AgentSlot slot;
    if (policy == "llm") {
        slot.llm = true;
        return slot;
    }
    try {
        slot.scripted.kind = parse_scripted_kind(policy);
    } catch (const std::invalid_argument& e) {
        errors.push_back(where + ": " + e.what());
        return std::nullopt;
    }
    if (params.contains("lambda")) {
        if (!params.at("lambda").is_number()) {
            errors.push_back(where + ".lambda must be a number");
            return std::nullopt;
        }
        slot.scripted.lambda = params.at("lambda").get<double>();
        if (!(slot.scripted.lambda > 0.0 && slot.scripted.lambda <= 1.0)) {
            errors.push_back(where + ".lambda must lie in (0, 1]");
            return std::nullopt;
        }
    }
    return slot;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs) : std::invalid_argument(join_lines(errs)), errors(std::move(errs)) {}

bool RunConfig::uses_llm() const {
    for (const auto& s : roster) {
        if (s.llm) return true;
    }
    return false;
}

RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir) {
    std::vector<std::string> errors;
    if (!j.is_object()) throw ConfigError({"configuration must be a JSON object"});
    for (const auto& [key, value] : j.items()) {
        if (!kKnownKeys.count(key)) errors.push_back("unknown key '" + key + "'");
    }
    RunConfig c;
    EngineConfig& e = c.engine;
    if (auto v = read<std::string>(j, "environment", "a string", errors)) e.environment = *v;
    if (auto v = read<std::string>(j, "mechanism", "a string", errors)) {
        try {
            e.mechanism = parse_mechanism(*v);
        } catch (const std::invalid_argument& ex) {
            errors.push_back(ex.what());
        }
    }
    if (auto v = read<int>(j, "rounds", "an integer", errors)) e.rounds = *v;
    if (auto v = read<int>(j, "agents", "an integer", errors)) e.agents = *v;
    if (auto v = read<std::uint64_t>(j, "seed", "a non-negative integer", errors)) e.seed = *v;
    if (auto v = read<int>(j, "max_attempts", "an integer", errors)) e.max_attempts = *v;
    if (auto v = read<bool>(j, "reasoning_visible", "a boolean", errors)) e.reasoning_visible = *v;
    if (auto v = read<bool>(j, "integer_cumulative", "a boolean", errors)) e.tally.integer_cumulative = *v;

    if (e.environment == "rating") {
        e.agents = j.contains("agents") ? e.agents : 3;
        if (e.agents != 3) errors.push_back("the rating task has exactly 3 agents (got " + std::to_string(e.agents) + ")");
        e.utility_set = "";
    }
    if (auto v = read<std::string>(j, "utility_set", "a string", errors)) {
        if (e.environment == "rating") {
            errors.push_back("'utility_set' applies to the economy only");
        } else {
            try {
                e.utility_set = std::string(to_string(parse_preset(*v)));
            } catch (const std::invalid_argument& ex) {
                errors.push_back(ex.what());
            }
        }
    }
    for (auto& msg : e.validate()) errors.push_back(std::move(msg));

    if (j.contains("endowment")) {
        if (e.environment != "economy") {
            errors.push_back("'endowment' applies to the economy only");
        } else {
            try {
                Allocation a = Allocation::from_json(j.at("endowment"));
                if (a.agents() != e.agents || a.goods() != e.agents) {
                    errors.push_back("'endowment' must be " + std::to_string(e.agents) + " rows of " +
                                     std::to_string(e.agents) + " amounts");
                } else if (!a.feasible()) {
                    errors.push_back("'endowment' must be nonnegative with every good summing to 100");
                } else {
                    c.endowment = std::move(a);
                }
            } catch (const std::exception& ex) {
                errors.push_back(std::string("'endowment': ") + ex.what());
            }
        }
    }

    if (j.contains("roster")) {
        const Json& r = j.at("roster");
        if (r.is_object() && r.contains("random_mix")) {
            RandomMix mix;
            const Json& m = r.at("random_mix");
            if (!m.is_object()) {
                errors.push_back("roster.random_mix must be an object");
            } else {
                if (auto v = read<double>(m, "selfish_probability", "a number", errors)) mix.selfish_probability = *v;
                if (auto v = read<double>(m, "lambda_min", "a number", errors)) mix.lambda_min = *v;
                if (auto v = read<double>(m, "lambda_max", "a number", errors)) mix.lambda_max = *v;
                if (!(mix.selfish_probability >= 0.0 && mix.selfish_probability <= 1.0)) {
                    errors.push_back("roster.random_mix.selfish_probability must lie in [0, 1]");
                }
                if (!(mix.lambda_min > 0.0 && mix.lambda_min <= mix.lambda_max && mix.lambda_max <= 1.0)) {
                    errors.push_back("roster.random_mix needs 0 < lambda_min <= lambda_max <= 1");
                }
            }
            c.random_mix = mix;
        } else if (r.is_array()) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (auto slot = parse_slot(r[i], i, errors)) c.roster.push_back(*slot);
            }
            if (!r.empty() && static_cast<int>(r.size()) != e.agents) {
                errors.push_back("roster lists " + std::to_string(r.size()) + " agents but agents = " +
                                 std::to_string(e.agents));
            }
        } else {
            errors.push_back("'roster' must be a list of policies or {\"random_mix\": {...}}");
        }
    }
    if (c.roster.empty() && !c.random_mix && e.agents >= 2) {
        c.roster.assign(static_cast<std::size_t>(e.agents), AgentSlot{true, {}});
    }

    if (j.contains("tasks")) {
        if (e.environment != "rating") errors.push_back("'tasks' applies to the rating task only");
        if (!j.at("tasks").is_array()) {
            errors.push_back("'tasks' must be a list of directories");
        } else {
            for (const auto& t : j.at("tasks")) {
                if (!t.is_string()) {
                    errors.push_back("'tasks' entries must be strings");
                    continue;
                }
                std::filesystem::path p = t.get<std::string>();
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                c.tasks.push_back(p);
            }
        }
    }
    if (e.environment == "rating" && c.tasks.empty()) errors.push_back("the rating task needs at least one entry in 'tasks'");

    if (j.contains("llm")) {
        const Json& l = j.at("llm");
        if (!l.is_object()) {
            errors.push_back("'llm' must be an object");
        } else {
            if (auto v = read<std::string>(l, "model", "a string", errors)) c.llm.model = *v;
            if (auto v = read<std::string>(l, "base_url", "a string", errors)) c.llm.base_url = *v;
            if (auto v = read<int>(l, "timeout_s", "an integer", errors)) c.llm.timeout_seconds = *v;
            if (auto v = read<int>(l, "retries", "an integer", errors)) c.llm.retries = *v;
            if (c.llm.timeout_seconds < 1) errors.push_back("llm.timeout_s must be >= 1");
            if (c.llm.retries < 0) errors.push_back("llm.retries must be >= 0");
        }
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError({"cannot open config file " + file.string()});
    std::stringstream ss;
    ss << in.rdbuf();
    Json j;
    try {
        j = Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError({file.string() + " is not valid JSON: " + e.what()});
    }
    return parse_run_config(j, file.parent_path());
}

void drop_llm(RunConfig& config) {
    for (auto& s : config.roster) {
        if (s.llm) s = AgentSlot{false, {ScriptedKind::Concessive, 0.5}};
    }
}

std::vector<AgentSlot> roster_for(const RunConfig& config, std::uint64_t seed) {
    if (!config.random_mix) return config.roster;
    const RandomMix& mix = *config.random_mix;
    Rng rng(derive_seed(seed, {0x726f73746572ULL}));
    std::vector<AgentSlot> out;
    for (int i = 0; i < config.engine.agents; ++i) {
        AgentSlot s;
        if (rng.uniform() < mix.selfish_probability) {
            s.scripted = {ScriptedKind::Selfish, 0.5};
        } else {
            s.scripted = {ScriptedKind::Concessive, rng.uniform(mix.lambda_min, mix.lambda_max)};
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace roundtable
