#pragma once

#include <string>

#include "json.hpp"

namespace roundtable {

using Json = nlohmann::json;

/// Serializes `value` with object keys sorted, integers verbatim and every
/// other number printed with exactly six decimals. Two values encode to the
/// same bytes exactly when they are the same proposal.
std::string canonical_json(const Json& value);

/// Environment-specific decision payload plus its canonical encoding.
/// Construct through an environment's canonicalizer so the payload is already
/// normalized; equality is on the canonical bytes only.
struct ProposalBody {
    Json payload;
    std::string canonical;

    static ProposalBody from_payload(Json payload) {
        ProposalBody body;
        body.canonical = canonical_json(payload);
        body.payload = std::move(payload);
        return body;
    }

    friend bool operator==(const ProposalBody& a, const ProposalBody& b) {
        return a.canonical == b.canonical;
    }
};

}  // namespace roundtable
