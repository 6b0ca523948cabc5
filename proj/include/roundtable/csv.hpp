#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace roundtable::csv {

struct Row {
    int line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

/// RFC 4180: comma separated, double-quoted fields may contain commas,
/// newlines and doubled quotes. Throws std::invalid_argument on an
/// unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace roundtable::csv
