#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roundtable/agents.hpp"
#include "roundtable/economy.hpp"
#include "roundtable/transcript.hpp"

namespace roundtable {

/// Every problem found in a configuration, reported together.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> errors);
    std::vector<std::string> errors;
};

struct AgentSlot {
    bool llm = false;
    ScriptedSpec scripted;
};

/// Per-simulation roster drawn from the seed: each agent is selfish with
/// probability selfish_probability, otherwise concessive with lambda uniform
/// in [lambda_min, lambda_max].
struct RandomMix {
    double selfish_probability = 0.5;
    double lambda_min = 0.1;
    double lambda_max = 1.0;
};

struct LlmSettings {
    std::string model = kDefaultModel;
    std::optional<std::string> base_url;
    int timeout_seconds = 60;
    int retries = 3;
};

struct RunConfig {
    EngineConfig engine;
    std::optional<Allocation> endowment;
    /// Fixed roster, one slot per agent. Empty when random_mix is set.
    std::vector<AgentSlot> roster;
    std::optional<RandomMix> random_mix;
    /// Rating task directories, resolved against the config file's directory.
    std::vector<std::filesystem::path> tasks;
    LlmSettings llm;

    [[nodiscard]] bool uses_llm() const;
};

/// Throws ConfigError listing every invalid key at once.
RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file);

/// Replaces every LLM slot with a concessive(0.5) scripted agent.
void drop_llm(RunConfig& config);

/// The roster of the simulation run with `seed`.
std::vector<AgentSlot> roster_for(const RunConfig& config, std::uint64_t seed);

}  // namespace roundtable
