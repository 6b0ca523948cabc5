#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roundtable/environment.hpp"

namespace roundtable {

struct MovieInfo {
    int movie_id = 0;
    std::string movie_title;
    int release_date = 0;  // YYYYMMDD
    std::vector<std::string> genre;
};

struct UserInfo {
    int user_id = 0;
    int age = 0;
    std::string gender;
    std::string occupation;
    std::string state;
};

/// One of the target user's ratings of another movie.
struct UserHistoryRow {
    int movie_id = 0;
    std::string movie_title;
    std::vector<std::string> genre;
    int release_date = 0;
    int rating = 0;
    int rated_date = 0;
};

/// Another user's rating of the target movie.
struct MovieHistoryRow {
    int user_id = 0;
    double user_pref_similarity = 0.0;
    double personal_average_score = 0.0;
    int age = 0;
    std::string gender;
    std::string occupation;
    std::string state;
    int rated_date = 0;
    int rating = 0;
};

struct RatingTask {
    std::string id;
    MovieInfo movie;
    UserInfo user;
    std::vector<UserHistoryRow> user_history;
    std::vector<MovieHistoryRow> movie_history;
    int gold_rating = 0;
};

/// Names the offending file, 1-based line and column.
class IngestError : public std::runtime_error {
public:
    IngestError(std::string file, int line, int column, std::string column_name, const std::string& reason);
    std::string file;
    int line;
    int column;
    std::string column_name;
};

/// Parses a python-style list literal: ['Action', "Children's"].
std::vector<std::string> parse_genre_list(std::string_view text);

/// Each task directory holds movie_info.csv, user_info.csv,
/// user_rating_history.csv, movie_rating_history.csv and gold.csv.
std::vector<RatingTask> ingest_tables(const std::vector<std::filesystem::path>& task_dirs);
RatingTask ingest_task(const std::filesystem::path& dir);

/// Schema line handed to agents for one table.
std::string table_schema(std::string_view table);

inline constexpr double kAlwaysGuess = 4.0;

enum RatingAgent : AgentIndex { kBasicInfoAgent = 0, kMovieHistoryAgent = 1, kUserHistoryAgent = 2 };

class RatingEnvironment final : public Environment {
public:
    explicit RatingEnvironment(RatingTask task);

    [[nodiscard]] std::string id() const override { return "rating"; }
    [[nodiscard]] int agent_count() const override { return 3; }
    [[nodiscard]] std::string agent_name(AgentIndex agent) const override;
    [[nodiscard]] std::string task_description() const override;
    [[nodiscard]] std::string agent_background(AgentIndex agent) const override;
    [[nodiscard]] std::string proposal_format_text() const override;
    [[nodiscard]] std::optional<ProposalBody> canonicalize(const Json& raw, std::string* why) const override;
    [[nodiscard]] std::string describe(const ProposalBody& body) const override;
    [[nodiscard]] std::optional<ProposalBody> initial_state() const override { return std::nullopt; }

    [[nodiscard]] double utility(AgentIndex agent, const ProposalBody& body) const override;
    [[nodiscard]] ProposalBody selfish_proposal(AgentIndex agent) const override;
    [[nodiscard]] ProposalBody neutral_proposal() const override;
    [[nodiscard]] ProposalBody blend(const ProposalBody& from, const std::vector<ProposalBody>& toward,
                                     double lambda) const override;
    [[nodiscard]] ProposalBody random_proposal(Rng& rng) const override;
    [[nodiscard]] std::string scripted_message(AgentIndex agent, const MessageHint& hint) const override;

    [[nodiscard]] const RatingTask& task() const { return task_; }
    /// What each agent's own table suggests the rating is.
    [[nodiscard]] double private_estimate(AgentIndex agent) const;
    [[nodiscard]] static double rating_of(const ProposalBody& body);
    [[nodiscard]] ProposalBody body_of(double rating) const;

private:
    RatingTask task_;
    double estimates_[3] = {kAlwaysGuess, kAlwaysGuess, kAlwaysGuess};
};

struct RatingMetrics {
    std::vector<double> mae;   // per round
    std::vector<double> rmse;  // per round
    /// Examples per round that had no accepted prediction and fell back to
    /// the always-guess-4 baseline.
    std::vector<int> imputed;
};

/// predictions[e][r] is example e's standing rating at the end of round r+1,
/// nullopt when nothing had been accepted. Throws on an empty example set.
RatingMetrics rating_metrics(const std::vector<std::vector<std::optional<double>>>& predictions,
                             const std::vector<int>& gold);

/// MAE and RMSE of predicting 4 for every example.
std::pair<double, double> always_guess_baseline(const std::vector<int>& gold);

}  // namespace roundtable
