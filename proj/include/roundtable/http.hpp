#pragma once

#include <stdexcept>
#include <string>

#include "roundtable/proposal.hpp"

namespace roundtable {

/// Transport failure, non-success status after retries, or an unreadable
/// response body.
class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HttpOptions {
    /// scheme://host[:port][/prefix]
    std::string base_url = "http://127.0.0.1:8000";
    std::string api_key;
    int timeout_seconds = 60;
    /// Extra attempts after the first on connection errors, 429 and 5xx.
    int retries = 3;
};

/// Fills base_url and api_key from ROUNDTABLE_BASE_URL and ROUNDTABLE_API_KEY
/// when those are set.
HttpOptions http_options_from_env(HttpOptions defaults = {});

/// POSTs a JSON body to base_url + path with bearer auth and returns the
/// parsed JSON reply. Safe to call concurrently.
Json post_json(const HttpOptions& options, const std::string& path, const Json& body);

}  // namespace roundtable
