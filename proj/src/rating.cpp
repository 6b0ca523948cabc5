#include "roundtable/rating.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "roundtable/csv.hpp"
#include "roundtable/prompts.hpp"

namespace roundtable {

IngestError::IngestError(std::string f, int l, int c, std::string name, const std::string& reason)
    : std::runtime_error(f + ":" + std::to_string(l) + ":" + std::to_string(c) +
                         (name.empty() ? "" : " (" + name + ")") + ": " + reason),
      file(std::move(f)),
      line(l),
      column(c),
      column_name(std::move(name)) {}

std::vector<std::string> parse_genre_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    auto skip_space = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip_space();
    if (i >= text.size() || text[i] != '[') throw std::invalid_argument("genre list must start with '['");
    ++i;
    skip_space();
    if (i < text.size() && text[i] == ']') return out;
    while (true) {
        skip_space();
        if (i >= text.size() || (text[i] != '\'' && text[i] != '"')) {
            throw std::invalid_argument("genre entries must be quoted");
        }
        const char quote = text[i++];
        const std::size_t end = text.find(quote, i);
        if (end == std::string_view::npos) throw std::invalid_argument("unterminated genre entry");
        out.emplace_back(text.substr(i, end - i));
        i = end + 1;
        skip_space();
        if (i < text.size() && text[i] == ',') {
            ++i;
            continue;
        }
        if (i < text.size() && text[i] == ']') {
            ++i;
            break;
        }
        throw std::invalid_argument("expected ',' or ']' in genre list");
    }
    skip_space();
    if (i != text.size()) throw std::invalid_argument("trailing text after genre list");
    return out;
}

namespace {

struct Table {
    std::string file;
    std::vector<std::string> header;
    std::vector<csv::Row> rows;

    [[noreturn]] void fail(const csv::Row& row, std::size_t col, const std::string& reason) const {
        throw IngestError(file, row.line, static_cast<int>(col) + 1, col < header.size() ? header[col] : "", reason);
    }
};

Table load(const std::filesystem::path& path, const std::vector<std::string>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(path.string(), 0, 0, "", "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    std::vector<csv::Row> rows;
    try {
        rows = csv::parse(ss.str());
    } catch (const std::invalid_argument& e) {
        throw IngestError(path.string(), 0, 0, "", e.what());
    }
    if (rows.empty()) throw IngestError(path.string(), 1, 1, "", "missing header row");
    Table t{path.string(), rows.front().fields, {}};
    if (t.header != expected) {
        std::size_t col = 0;
        while (col < t.header.size() && col < expected.size() && t.header[col] == expected[col]) ++col;
        const std::string want = col < expected.size() ? expected[col] : "<end of row>";
        throw IngestError(t.file, rows.front().line, static_cast<int>(col) + 1, "",
                          "header mismatch: expected column '" + want + "'");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].fields.size() != expected.size()) {
            throw IngestError(t.file, rows[r].line, static_cast<int>(std::min(rows[r].fields.size(), expected.size())) + 1,
                              "", "expected " + std::to_string(expected.size()) + " fields, found " +
                                      std::to_string(rows[r].fields.size()));
        }
        t.rows.push_back(std::move(rows[r]));
    }
    return t;
}

int to_int(const Table& t, const csv::Row& row, std::size_t col) {
    const std::string& s = row.fields[col];
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) t.fail(row, col, "not an integer: '" + s + "'");
    return v;
}

double to_real(const Table& t, const csv::Row& row, std::size_t col) {
    const std::string& s = row.fields[col];
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
        t.fail(row, col, "not a number: '" + s + "'");
    }
    return v;
}

int to_rating(const Table& t, const csv::Row& row, std::size_t col) {
    const int v = to_int(t, row, col);
    if (v < 1 || v > 5) t.fail(row, col, "rating " + std::to_string(v) + " outside 1..5");
    return v;
}

int to_date(const Table& t, const csv::Row& row, std::size_t col) {
    const std::string& s = row.fields[col];
    if (s.size() != 8) t.fail(row, col, "date must be 8 digits YYYYMMDD: '" + s + "'");
    const int v = to_int(t, row, col);
    const int month = v / 100 % 100, day = v % 100;
    if (month < 1 || month > 12 || day < 1 || day > 31) t.fail(row, col, "invalid calendar date '" + s + "'");
    return v;
}

std::vector<std::string> to_genres(const Table& t, const csv::Row& row, std::size_t col) {
    try {
        return parse_genre_list(row.fields[col]);
    } catch (const std::invalid_argument& e) {
        t.fail(row, col, e.what());
    }
}

std::string nonempty(const Table& t, const csv::Row& row, std::size_t col) {
    if (row.fields[col].empty()) t.fail(row, col, "empty value");
    return row.fields[col];
}

const std::vector<std::string> kMovieInfoCols = {"movie_id", "movie_title", "release_date", "genre"};
const std::vector<std::string> kUserInfoCols = {"user_id", "age", "gender", "occupation", "state"};
const std::vector<std::string> kUserHistoryCols = {"movie_id", "movie_title", "genre",
                                                   "release_date", "rating", "rated_date"};
const std::vector<std::string> kMovieHistoryCols = {"user_id", "user_pref_similarity", "personal_average_score",
                                                    "age", "gender", "occupation", "state", "rated_date", "rating"};
const std::vector<std::string> kGoldCols = {"rating"};

const csv::Row& single_row(const Table& t) {
    if (t.rows.size() != 1) {
        throw IngestError(t.file, t.rows.empty() ? 1 : t.rows[1].line, 1, "",
                          "expected exactly one data row, found " + std::to_string(t.rows.size()));
    }
    return t.rows.front();
}

std::string render_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += (items[i].find('\'') == std::string::npos ? "'" + items[i] + "'" : "\"" + items[i] + "\"");
    }
    return out + "]";
}

std::string fmt2(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

RatingTask ingest_task(const std::filesystem::path& dir) {
    RatingTask task;
    task.id = dir.filename().string();
    {
        const Table t = load(dir / "movie_info.csv", kMovieInfoCols);
        const auto& r = single_row(t);
        task.movie = {to_int(t, r, 0), nonempty(t, r, 1), to_date(t, r, 2), to_genres(t, r, 3)};
    }
    {
        const Table t = load(dir / "user_info.csv", kUserInfoCols);
        const auto& r = single_row(t);
        task.user = {to_int(t, r, 0), to_int(t, r, 1), nonempty(t, r, 2), nonempty(t, r, 3), nonempty(t, r, 4)};
    }
    {
        const Table t = load(dir / "user_rating_history.csv", kUserHistoryCols);
        for (const auto& r : t.rows) {
            task.user_history.push_back({to_int(t, r, 0), nonempty(t, r, 1), to_genres(t, r, 2), to_date(t, r, 3),
                                         to_rating(t, r, 4), to_date(t, r, 5)});
        }
    }
    {
        const Table t = load(dir / "movie_rating_history.csv", kMovieHistoryCols);
        for (const auto& r : t.rows) {
            task.movie_history.push_back({to_int(t, r, 0), to_real(t, r, 1), to_real(t, r, 2), to_int(t, r, 3),
                                          nonempty(t, r, 4), nonempty(t, r, 5), nonempty(t, r, 6), to_date(t, r, 7),
                                          to_rating(t, r, 8)});
        }
    }
    {
        const Table t = load(dir / "gold.csv", kGoldCols);
        task.gold_rating = to_rating(t, single_row(t), 0);
    }
    return task;
}

std::vector<RatingTask> ingest_tables(const std::vector<std::filesystem::path>& task_dirs) {
    std::vector<RatingTask> tasks;
    tasks.reserve(task_dirs.size());
    for (const auto& d : task_dirs) tasks.push_back(ingest_task(d));
    return tasks;
}

std::string table_schema(std::string_view table) {
    if (table == "movie_info") {
        return "movie_info(movie_id: int, movie_title: str, release_date: int YYYYMMDD, genre: list of str)";
    }
    if (table == "user_info") return "user_info(user_id: int, age: int, gender: str, occupation: str, state: str)";
    if (table == "user_rating_history") {
        return "user_rating_history(movie_id: int, movie_title: str, genre: list of str, release_date: int "
               "YYYYMMDD, rating: int 1-5, rated_date: int YYYYMMDD)";
    }
    if (table == "movie_rating_history") {
        return "movie_rating_history(user_id: int, user_pref_similarity: float, personal_average_score: float, "
               "age: int, gender: str, occupation: str, state: str, rated_date: int YYYYMMDD, rating: int 1-5)";
    }
    throw std::invalid_argument("unknown table '" + std::string(table) + "'");
}

// --------------------------------------------------------------- environment

RatingEnvironment::RatingEnvironment(RatingTask task) : task_(std::move(task)) {
    double weight = 0.0, weighted = 0.0, plain = 0.0;
    for (const auto& r : task_.movie_history) {
        weight += r.user_pref_similarity;
        weighted += r.user_pref_similarity * r.rating;
        plain += r.rating;
    }
    if (!task_.movie_history.empty()) {
        estimates_[kMovieHistoryAgent] =
            round2(weight > 0.0 ? weighted / weight : plain / static_cast<double>(task_.movie_history.size()));
    }
    if (!task_.user_history.empty()) {
        double sum = 0.0;
        for (const auto& r : task_.user_history) sum += r.rating;
        estimates_[kUserHistoryAgent] = round2(sum / static_cast<double>(task_.user_history.size()));
    }
}

std::string RatingEnvironment::agent_name(AgentIndex agent) const {
    switch (agent) {
        case kBasicInfoAgent: return "BasicInfo Agent";
        case kMovieHistoryAgent: return "MovieHistory Agent";
        case kUserHistoryAgent: return "UserHistory Agent";
    }
    throw std::out_of_range("rating task has three agents");
}

std::string RatingEnvironment::task_description() const {
    return render_template(TemplateId::RatingTask,
                           {{"target_movie_title", task_.movie.movie_title},
                            {"movie_info_schema", table_schema("movie_info")},
                            {"user_info_schema", table_schema("user_info")},
                            {"movie_rating_history_schema", table_schema("movie_rating_history")},
                            {"user_rating_history_schema", table_schema("user_rating_history")}});
}

std::string RatingEnvironment::agent_background(AgentIndex agent) const {
    std::string access, data;
    switch (agent) {
        case kBasicInfoAgent: {
            access = "the basic information of the target movie and target user";
            data = csv::join_row(kMovieInfoCols) + "\n" +
                   csv::join_row({std::to_string(task_.movie.movie_id), task_.movie.movie_title,
                                  std::to_string(task_.movie.release_date), render_list(task_.movie.genre)}) +
                   "\n\n" + csv::join_row(kUserInfoCols) + "\n" +
                   csv::join_row({std::to_string(task_.user.user_id), std::to_string(task_.user.age),
                                  task_.user.gender, task_.user.occupation, task_.user.state});
            break;
        }
        case kMovieHistoryAgent: {
            access = "the rating history of the target movie from other people";
            data = csv::join_row(kMovieHistoryCols);
            for (const auto& r : task_.movie_history) {
                data += "\n" + csv::join_row({std::to_string(r.user_id), fmt2(r.user_pref_similarity),
                                              fmt2(r.personal_average_score), std::to_string(r.age), r.gender,
                                              r.occupation, r.state, std::to_string(r.rated_date),
                                              std::to_string(r.rating)});
            }
            break;
        }
        case kUserHistoryAgent: {
            access = "the rating history of the target user to other movies";
            data = csv::join_row(kUserHistoryCols);
            for (const auto& r : task_.user_history) {
                data += "\n" + csv::join_row({std::to_string(r.movie_id), r.movie_title, render_list(r.genre),
                                              std::to_string(r.release_date), std::to_string(r.rating),
                                              std::to_string(r.rated_date)});
            }
            break;
        }
        default: throw std::out_of_range("rating task has three agents");
    }
    return render_template(TemplateId::RatingGoal, {{"data_access", access}, {"agent_dataset", data}});
}

std::string RatingEnvironment::proposal_format_text() const { return "<float, predicted rating from 1 to 5>"; }

std::optional<ProposalBody> RatingEnvironment::canonicalize(const Json& raw, std::string* why) const {
    auto fail = [&](std::string reason) -> std::optional<ProposalBody> {
        if (why) *why = std::move(reason);
        return std::nullopt;
    };
    double value = 0.0;
    const Json* v = &raw;
    if (raw.is_object()) {
        auto it = raw.find("rating");
        if (it == raw.end()) return fail("rating proposal object lacks 'rating'");
        v = &*it;
    }
    if (v->is_number()) {
        value = v->get<double>();
    } else if (v->is_string()) {
        const std::string s = v->get<std::string>();
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size()) return fail("rating is not a number");
    } else {
        return fail("rating is not a number");
    }
    if (!std::isfinite(value) || value < 1.0 || value > 5.0) return fail("rating outside [1, 5]");
    return body_of(value);
}

ProposalBody RatingEnvironment::body_of(double rating) const {
    return ProposalBody::from_payload(Json{{"rating", round2(rating)}});
}

double RatingEnvironment::rating_of(const ProposalBody& body) { return body.payload.at("rating").get<double>(); }

std::string RatingEnvironment::describe(const ProposalBody& body) const { return fmt2(rating_of(body)); }

double RatingEnvironment::private_estimate(AgentIndex agent) const {
    if (agent < 0 || agent > 2) throw std::out_of_range("rating task has three agents");
    return estimates_[agent];
}

double RatingEnvironment::utility(AgentIndex agent, const ProposalBody& body) const {
    return -std::fabs(rating_of(body) - private_estimate(agent));
}

ProposalBody RatingEnvironment::selfish_proposal(AgentIndex agent) const { return body_of(private_estimate(agent)); }

ProposalBody RatingEnvironment::neutral_proposal() const { return body_of(kAlwaysGuess); }

ProposalBody RatingEnvironment::blend(const ProposalBody& from, const std::vector<ProposalBody>& toward,
                                      double lambda) const {
    if (toward.empty()) return from;
    double mean = 0.0;
    for (const auto& t : toward) mean += rating_of(t) / static_cast<double>(toward.size());
    const double x = rating_of(from);
    return body_of(x + lambda * (mean - x));
}

ProposalBody RatingEnvironment::random_proposal(Rng& rng) const { return body_of(rng.uniform(1.0, 5.0)); }

std::string RatingEnvironment::scripted_message(AgentIndex agent, const MessageHint& hint) const {
    std::ostringstream out;
    out << "This is " << agent_name(agent) << " in round " << hint.round << ". ";
    switch (agent) {
        case kBasicInfoAgent:
            out << "The target movie is " << task_.movie.movie_title << " and the user is a " << task_.user.age
                << " year old " << task_.user.occupation << ".";
            break;
        case kMovieHistoryAgent:
            out << "Similar users rated this movie " << fmt2(private_estimate(agent)) << " on average.";
            break;
        default: out << "The target user rates movies " << fmt2(private_estimate(agent)) << " on average."; break;
    }
    if (hint.own_latest) {
        out << " I propose a rating of " << describe(*hint.own_latest) << ".";
    } else {
        out << " What does your data show?";
    }
    if (hint.standing) out << " We currently agree on " << describe(*hint.standing) << ".";
    return out.str();
}

// ------------------------------------------------------------------- metrics

RatingMetrics rating_metrics(const std::vector<std::vector<std::optional<double>>>& predictions,
                             const std::vector<int>& gold) {
    if (predictions.empty()) throw std::invalid_argument("rating metrics need at least one example");
    if (predictions.size() != gold.size()) throw std::invalid_argument("prediction/gold count mismatch");
    const std::size_t rounds = predictions.front().size();
    RatingMetrics m;
    m.mae.assign(rounds, 0.0);
    m.rmse.assign(rounds, 0.0);
    m.imputed.assign(rounds, 0);
    const double n = static_cast<double>(predictions.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        double abs_sum = 0.0, sq_sum = 0.0;
        for (std::size_t e = 0; e < predictions.size(); ++e) {
            if (predictions[e].size() != rounds) throw std::invalid_argument("ragged prediction series");
            double p = kAlwaysGuess;
            if (predictions[e][r]) {
                p = *predictions[e][r];
            } else {
                ++m.imputed[r];
            }
            const double err = p - gold[e];
            abs_sum += std::fabs(err);
            sq_sum += err * err;
        }
        m.mae[r] = abs_sum / n;
        m.rmse[r] = std::sqrt(sq_sum / n);
    }
    return m;
}

std::pair<double, double> always_guess_baseline(const std::vector<int>& gold) {
    std::vector<std::vector<std::optional<double>>> preds(gold.size(), {std::optional<double>(kAlwaysGuess)});
    auto m = rating_metrics(preds, gold);
    return {m.mae.front(), m.rmse.front()};
}

}  // namespace roundtable
