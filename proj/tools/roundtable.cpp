#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "roundtable/batch.hpp"
#include "roundtable/config.hpp"
#include "roundtable/economy.hpp"
#include "roundtable/linguistics.hpp"
#include "roundtable/stopping.hpp"
#include "roundtable/transcript_io.hpp"

namespace fs = std::filesystem;
using namespace roundtable;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

Execution set_parallelism(int degree) {
    if (degree < 0) throw ValidationError("--parallel must be >= 0");
#ifdef _OPENMP
    if (degree > 0) omp_set_num_threads(degree);
#endif
    return degree == 1 ? Execution::Serial : Execution::Parallel;
}

/// Transcript lines with a seed, ignoring a truncated trailing record.
std::map<std::uint64_t, Transcript> read_existing(const fs::path& file, std::ostream& log) {
    std::map<std::uint64_t, Transcript> out;
    std::ifstream in(file);
    std::string line;
    int n = 0;
    while (in && std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            Transcript t = parse_transcript(line);
            out.emplace(t.seed, std::move(t));
        } catch (const std::exception& e) {
            log << "warning: " << file.string() << ":" << n << " skipped (" << e.what() << ")\n";
        }
    }
    return out;
}

/// Every transcript in `dir` (all *.jsonl files, sorted by name), each with
/// a simulation id "<file stem>/<seed>".
std::vector<std::pair<std::string, Transcript>> read_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl" && e.path().filename() != "labels.jsonl") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<std::pair<std::string, Transcript>> out;
    for (const auto& f : files) {
        for (auto& t : read_transcripts(f)) {
            out.emplace_back(f.stem().string() + "/" + std::to_string(t.seed), std::move(t));
        }
    }
    if (out.empty()) throw ValidationError("no transcripts found in " + dir.string());
    return out;
}

std::shared_ptr<const ChatClient> chat_client(const LlmSettings& llm) {
    HttpOptions defaults;
    if (llm.base_url) defaults.base_url = *llm.base_url;
    defaults.timeout_seconds = llm.timeout_seconds;
    defaults.retries = llm.retries;
    return std::make_shared<HttpChatClient>(http_options_from_env(defaults));
}

std::optional<double> u_max_of(const Transcript& t, std::map<std::string, double>& cache, Execution exec) {
    if (t.config.environment != "economy") return std::nullopt;
    const std::string key = t.environment_info.at("theta").dump();
    auto it = cache.find(key);
    if (it == cache.end()) {
        std::vector<CobbDouglasUtility> utilities;
        for (const auto& row : t.environment_info.at("theta")) utilities.push_back({row.get<std::vector<double>>()});
        UMaxOptions opts;
        opts.execution = exec;
        it = cache.emplace(key, u_max(utilities, opts).value).first;
    }
    return it->second;
}

// ---------------------------------------------------------------------- run

struct RunArgs {
    std::string config;
    std::string out;
    int sims = 1;
    std::optional<std::uint64_t> seed;
    int parallel = 0;
    std::string mechanism;
    bool no_llm = false;
};

int cmd_run(const RunArgs& a) {
    RunConfig config = load_run_config(a.config);
    if (!a.mechanism.empty()) {
        try {
            config.engine.mechanism = parse_mechanism(a.mechanism);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("--mechanism: ") + e.what());
        }
    }
    if (a.no_llm) drop_llm(config);
    if (a.sims < 1) throw ValidationError("--sims must be >= 1");
    const Execution exec = set_parallelism(a.parallel);

    fs::create_directories(a.out);
    const fs::path transcripts_file = fs::path(a.out) / "transcripts.jsonl";
    auto existing = read_existing(transcripts_file, std::cerr);

    BatchOptions opts;
    opts.sims = a.sims;
    opts.seed_base = a.seed.value_or(config.engine.seed);
    opts.execution = exec;
    if (config.uses_llm()) opts.chat = chat_client(config.llm);
    for (const auto& [seed, t] : existing) {
        if (seed >= opts.seed_base && seed < opts.seed_base + static_cast<std::uint64_t>(a.sims)) opts.completed.insert(seed);
    }
    if (!opts.completed.empty()) {
        std::cerr << "resuming: " << opts.completed.size() << " of " << a.sims << " simulations already done\n";
    }
    std::ofstream append(transcripts_file, std::ios::binary | std::ios::app);
    opts.on_done = [&](const Transcript& t) { append << serialize_transcript(t) << '\n' << std::flush; };

    const BatchContext ctx = BatchContext::prepare(config, exec);
    for (auto& t : run_batch(ctx, opts)) existing.insert_or_assign(t.seed, std::move(t));
    append.close();

    std::vector<Transcript> batch;
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(a.sims); ++i) batch.push_back(existing.at(opts.seed_base + i));
    write_transcripts(transcripts_file, batch);
    write_file(fs::path(a.out) / "metrics.csv", metrics_csv(batch, ctx.u_max));
    const auto rows = summarize(batch, ctx.u_max);
    write_file(fs::path(a.out) / "summary.csv", summary_csv(rows));
    write_file(fs::path(a.out) / "summary.json", summary_json(rows).dump(2) + "\n");
    std::cout << "wrote " << batch.size() << " transcripts to " << transcripts_file.string() << "\n";
    return 0;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
    std::string in;
    std::string out;
    std::string labeler = "stub";
    std::string embedder = "stub";
    std::string model = kDefaultModel;
    std::string embedding_model = "text-embedding-3-small";
    int parallel = 0;
};

std::unique_ptr<Embedder> make_embedder(const std::string& kind, const std::string& model) {
    if (kind == "stub") return std::make_unique<StubEmbedder>();
    if (kind == "http") return std::make_unique<HttpEmbedder>(http_options_from_env(), model);
    throw ValidationError("--embedder must be 'stub' or 'http'");
}

std::unique_ptr<DialogueActLabeler> make_labeler(const std::string& kind, const std::string& model) {
    if (kind == "stub") return std::make_unique<StubLabeler>();
    if (kind == "llm") return std::make_unique<LlmLabeler>(std::make_shared<HttpChatClient>(http_options_from_env()), model);
    throw ValidationError("--labeler must be 'stub' or 'llm'");
}

int cmd_analyze(const AnalyzeArgs& a) {
    const Execution exec = set_parallelism(a.parallel);
    const auto sims = read_dir(a.in);
    const fs::path out = a.out.empty() ? fs::path(a.in) : fs::path(a.out);
    fs::create_directories(out);
    const auto embedder = make_embedder(a.embedder, a.embedding_model);
    const auto labeler = make_labeler(a.labeler, a.model);
    LabelCache cache(out / "labels.jsonl");

    std::vector<std::vector<RoundFeatures>> features(sims.size());
    std::vector<LabeledSimulation> labeled(sims.size());
    std::vector<std::vector<std::string>> warnings(sims.size());
    for_each_index(exec, sims.size(), [&](std::size_t i) {
        features[i] = round_features(sims[i].second, *embedder);
        labeled[i] = label_transcript(sims[i].second, sims[i].first, *labeler, &cache, &warnings[i]);
    });
    for (const auto& w : warnings) {
        for (const auto& line : w) std::cerr << "warning: " << line << "\n";
    }

    std::string fcsv = "sim,mechanism,round,messages,mean_words,mean_fk,info_difference\n";
    auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string(); };
    for (std::size_t i = 0; i < sims.size(); ++i) {
        for (const auto& f : features[i]) {
            fcsv += sims[i].first + "," + std::string(to_string(sims[i].second.config.mechanism)) + "," +
                    std::to_string(f.round) + "," + std::to_string(f.messages) + "," + opt(f.mean_words) + "," +
                    opt(f.mean_fk) + "," + opt(f.info_difference) + "\n";
        }
    }
    write_file(out / "features.csv", fcsv);

    std::string acsv = "round,act,ratio\n";
    const auto ratios = act_ratios(labeled);
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        for (DialogueAct act : kContentActs) {
            auto it = ratios[r].find(act);
            acsv += std::to_string(r + 1) + "," + std::string(to_string(act)) + "," +
                    fixed(it == ratios[r].end() ? 0.0 : it->second) + "\n";
        }
    }
    write_file(out / "act_ratios.csv", acsv);

    const TransitionGraph graph = transition_graph(labeled);
    write_file(out / "transitions.dot", transition_dot(graph));
    write_file(out / "transitions.csv", transition_csv(graph));
    std::cout << "analyzed " << sims.size() << " transcripts into " << out.string() << "\n";
    return 0;
}

// ----------------------------------------------------------------- stopping

struct StoppingArgs {
    std::string in;
    std::string out;
    int k = 5;
    std::uint64_t seed = 0;
    std::vector<std::string> rules;
    std::string dependent = "round";
    std::string ranking = "favorable";
    std::string embedder = "stub";
    std::string embedding_model = "text-embedding-3-small";
    int parallel = 0;
};

int cmd_stopping(const StoppingArgs& a) {
    const Execution exec = set_parallelism(a.parallel);
    CVOptions cv;
    cv.k = a.k;
    cv.seed = a.seed;
    cv.execution = exec;
    if (!a.rules.empty()) {
        cv.rules.clear();
        for (const auto& r : a.rules) {
            try {
                cv.rules.push_back(parse_rule(r));
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
        }
    }
    if (a.dependent == "round") {
        cv.da.dependent = DependentVariable::RoundPerformance;
    } else if (a.dependent == "final") {
        cv.da.dependent = DependentVariable::FinalPerformance;
    } else {
        throw ValidationError("--dependent must be 'round' or 'final'");
    }
    if (a.ranking == "favorable") {
        cv.da.ranking = PairRanking::StopFavorable;
    } else if (a.ranking == "absolute") {
        cv.da.ranking = PairRanking::AbsoluteMagnitude;
    } else {
        throw ValidationError("--ranking must be 'favorable' or 'absolute'");
    }
    const bool need_acts = std::count(cv.rules.begin(), cv.rules.end(), RuleId::DialogueAct) > 0;
    const bool need_info = std::count(cv.rules.begin(), cv.rules.end(), RuleId::InfoDifference) > 0;

    const auto sims = read_dir(a.in);
    const fs::path out = a.out.empty() ? fs::path(a.in) : fs::path(a.out);
    fs::create_directories(out);
    std::optional<LabelCache> cache;
    if (need_acts) {
        const fs::path labels = fs::path(a.in) / "labels.jsonl";
        if (!fs::exists(labels)) {
            throw ValidationError("the dialogue_act rule needs labels: run `roundtable analyze --in " + a.in +
                                  "` first, or drop the rule with --rules");
        }
        cache.emplace(labels);
    }
    const auto embedder = make_embedder(a.embedder, a.embedding_model);

    // Group by environment and mechanism; each group is one report.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < sims.size(); ++i) {
        const auto& t = sims[i].second;
        groups[t.config.environment + ":" + std::string(to_string(t.config.mechanism))].push_back(i);
    }
    std::map<std::string, double> umax_cache;
    std::vector<CVReport> reports;
    for (const auto& [label, members] : groups) {
        if (members.size() < static_cast<std::size_t>(a.k)) {
            throw ValidationError("group " + label + " has " + std::to_string(members.size()) +
                                  " simulations; k-fold cross-validation needs at least " + std::to_string(a.k));
        }
        std::vector<SimulationRecord> records(members.size());
        std::vector<std::optional<double>> umax(members.size());
        for (std::size_t m = 0; m < members.size(); ++m) umax[m] = u_max_of(sims[members[m]].second, umax_cache, exec);
        for_each_index(exec, members.size(), [&](std::size_t m) {
            const auto& [id, t] = sims[members[m]];
            std::vector<RoundFeatures> features;
            if (need_info) features = round_features(t, *embedder);
            std::optional<LabeledSimulation> acts;
            if (need_acts) {
                LabeledSimulation ls;
                ls.id = id;
                ls.rounds = static_cast<int>(t.rounds.size());
                ls.agents = static_cast<int>(t.agents.size());
                for (const auto& rec : t.rounds) {
                    std::vector<ActSet> row(static_cast<std::size_t>(ls.agents));
                    std::vector<bool> spoke(static_cast<std::size_t>(ls.agents), false);
                    for (const auto& msg : rec.messages) {
                        if (!msg.message) continue;
                        auto found = cache->find(id, rec.round, msg.agent);
                        if (!found) {
                            throw ValidationError("no dialogue-act label for " + id + " round " +
                                                  std::to_string(rec.round) + " agent " + std::to_string(msg.agent) +
                                                  ": rerun `roundtable analyze`");
                        }
                        row[static_cast<std::size_t>(msg.agent)] = *found;
                        spoke[static_cast<std::size_t>(msg.agent)] = true;
                    }
                    ls.acts.push_back(std::move(row));
                    ls.spoke.push_back(std::move(spoke));
                }
                acts = std::move(ls);
            }
            records[m] = simulation_record(t, id, performance_series(t, umax[m]), need_info ? &features : nullptr,
                                           std::move(acts));
        });
        reports.push_back(kfold_evaluate(records, cv, label));
    }
    write_file(out / "stopping.csv", cv_report_csv(reports));
    write_file(out / "stopping.json", cv_report_json(reports).dump(2) + "\n");
    std::cout << "evaluated " << reports.size() << " group(s) into " << out.string() << "\n";
    return 0;
}

// --------------------------------------------------------------------- umax

int cmd_umax(const std::string& preset, int agents, bool certify, int parallel) {
    const Execution exec = set_parallelism(parallel);
    UtilitySetPreset p;
    try {
        p = parse_preset(preset);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    if (agents < 2) throw ValidationError("--agents must be >= 2");
    UMaxOptions opts;
    opts.execution = exec;
    const UMaxResult r = u_max(p, agents, opts);
    Json out = {{"preset", std::string(to_string(p))}, {"agents", agents}, {"u_max", r.value},
                {"argmax", r.argmax.to_json()}, {"converged_starts", r.converged_starts}};
    if (certify) {
        if (agents > 3) throw ValidationError("--certify runs the exhaustive grid oracle and supports at most 3 agents");
        const Certification c = certify_u_max(make_utilities(p, agents), r.value, exec);
        out["oracle"] = c.oracle;
        out["relative_gap"] = c.relative_gap;
        out["certified"] = c.certified;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Round-based multi-agent collaboration lab"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a batch of simulations");
    run_cmd->add_option("--config", run.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out, "Output directory")->required();
    run_cmd->add_option("--sims", run.sims, "Number of simulations");
    run_cmd->add_option("--seed", run.seed, "Seed of simulation 0 (default: config seed)");
    run_cmd->add_option("--parallel", run.parallel, "Worker threads; 1 runs serially, 0 uses all cores");
    run_cmd->add_option("--mechanism", run.mechanism, "Override the configured mechanism");
    run_cmd->add_flag("--no-llm", run.no_llm, "Replace LLM agents with scripted concessive agents");

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Linguistic features, act ratios and the transition graph");
    analyze_cmd->add_option("--in", analyze.in, "Directory with transcript files")->required();
    analyze_cmd->add_option("--out", analyze.out, "Output directory (default: --in)");
    analyze_cmd->add_option("--labeler", analyze.labeler, "stub or llm");
    analyze_cmd->add_option("--embedder", analyze.embedder, "stub or http");
    analyze_cmd->add_option("--model", analyze.model, "Chat model for the llm labeler");
    analyze_cmd->add_option("--embedding-model", analyze.embedding_model, "Model for the http embedder");
    analyze_cmd->add_option("--parallel", analyze.parallel, "Worker threads");

    StoppingArgs stopping;
    auto* stopping_cmd = app.add_subcommand("stopping", "Cross-validate the early-stopping rules");
    stopping_cmd->add_option("--in", stopping.in, "Directory with transcripts (and labels.jsonl)")->required();
    stopping_cmd->add_option("--out", stopping.out, "Output directory (default: --in)");
    stopping_cmd->add_option("--k", stopping.k, "Number of folds");
    stopping_cmd->add_option("--seed", stopping.seed, "Fold shuffle seed");
    stopping_cmd->add_option("--rules", stopping.rules, "Subset of rules to evaluate");
    stopping_cmd->add_option("--dependent", stopping.dependent, "OLS response: round or final");
    stopping_cmd->add_option("--ranking", stopping.ranking, "Pair ranking: favorable or absolute");
    stopping_cmd->add_option("--embedder", stopping.embedder, "stub or http");
    stopping_cmd->add_option("--embedding-model", stopping.embedding_model, "Model for the http embedder");
    stopping_cmd->add_option("--parallel", stopping.parallel, "Worker threads");

    std::string preset = "AsymmetricLiteral";
    int agents = 3;
    bool certify = false;
    int umax_parallel = 0;
    auto* umax_cmd = app.add_subcommand("umax", "Solve the economy's maximal group utility");
    umax_cmd->add_option("--preset", preset, "Utility-set preset");
    umax_cmd->add_option("--agents", agents, "Number of agents");
    umax_cmd->add_flag("--certify", certify, "Check against the exhaustive grid oracle");
    umax_cmd->add_option("--parallel", umax_parallel, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    try {
        if (*run_cmd) return cmd_run(run);
        if (*analyze_cmd) return cmd_analyze(analyze);
        if (*stopping_cmd) return cmd_stopping(stopping);
        if (*umax_cmd) return cmd_umax(preset, agents, certify, umax_parallel);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
