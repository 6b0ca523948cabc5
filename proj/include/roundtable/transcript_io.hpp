#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roundtable/transcript.hpp"

namespace roundtable {

/// One JSON object, fields in a fixed order, "v": 1 first, no trailing
/// newline. Exact tally totals are "num/den" strings.
std::string serialize_transcript(const Transcript& t);
/// Throws std::invalid_argument on a malformed record or unknown version.
Transcript parse_transcript(std::string_view line);

Json ballot_to_json(const Ballot& b);
Ballot ballot_from_json(const Json& j);

/// Reads every nonblank line. Throws std::runtime_error naming the line.
std::vector<Transcript> read_transcripts(const std::filesystem::path& path);
/// Writes one record per line, replacing the file.
void write_transcripts(const std::filesystem::path& path, const std::vector<Transcript>& transcripts);

}  // namespace roundtable
