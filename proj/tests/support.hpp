#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "roundtable/agents.hpp"
#include "roundtable/economy.hpp"
#include "roundtable/engine.hpp"

namespace test_support {

inline std::filesystem::path golden(const std::string& name) {
    return std::filesystem::path(ROUNDTABLE_GOLDEN_DIR) / name;
}

inline std::filesystem::path source_root() { return std::filesystem::path(ROUNDTABLE_SOURCE_DIR); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("roundtable_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Scripted roster of the given kinds, all sharing `seed`.
struct Roster {
    std::vector<roundtable::ScriptedPolicy> policies;
    std::vector<const roundtable::AgentPolicy*> view() const {
        std::vector<const roundtable::AgentPolicy*> out;
        for (const auto& p : policies) out.push_back(&p);
        return out;
    }
};

inline Roster roster(std::initializer_list<roundtable::ScriptedSpec> specs, std::uint64_t seed) {
    Roster r;
    for (const auto& s : specs) r.policies.emplace_back(s, seed);
    return r;
}

inline roundtable::Transcript run_economy(roundtable::Mechanism m, std::initializer_list<roundtable::ScriptedSpec> specs,
                                          std::uint64_t seed, int rounds = 10,
                                          roundtable::UtilitySetPreset preset = roundtable::UtilitySetPreset::AsymmetricLiteral) {
    roundtable::EngineConfig c;
    c.rounds = rounds;
    c.agents = static_cast<int>(specs.size());
    c.mechanism = m;
    c.seed = seed;
    c.utility_set = std::string(roundtable::to_string(preset));
    roundtable::EconomyEnvironment env(preset, c.agents);
    const Roster r = roster(specs, seed);
    return roundtable::run_collaboration(c, r.view(), env);
}

}  // namespace test_support
