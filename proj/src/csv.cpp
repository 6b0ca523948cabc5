#include "roundtable/csv.hpp"

#include <stdexcept>

namespace roundtable::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    int line = 1;
    row.line = 1;
    bool in_quotes = false;
    bool field_started = false;
    bool any_content = false;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        if (any_content || !row.fields.empty()) {
            end_field();
            rows.push_back(std::move(row));
        }
        row = Row{};
        field.clear();
        field_started = false;
        any_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                any_content = true;
                break;
            case ',':
                end_field();
                any_content = true;
                break;
            case '\r': break;
            case '\n':
                end_row();
                ++line;
                row.line = line;
                break;
            default:
                field.push_back(c);
                field_started = true;
                any_content = true;
        }
    }
    if (in_quotes) throw std::invalid_argument("unterminated quoted field starting on line " + std::to_string(row.line));
    if (field_started || any_content) end_row();
    return rows;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace roundtable::csv
