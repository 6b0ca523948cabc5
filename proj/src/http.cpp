#include "roundtable/http.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#ifdef ROUNDTABLE_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace roundtable {

HttpOptions http_options_from_env(HttpOptions defaults) {
    if (const char* url = std::getenv("ROUNDTABLE_BASE_URL"); url && *url) defaults.base_url = url;
    if (const char* key = std::getenv("ROUNDTABLE_API_KEY"); key && *key) defaults.api_key = key;
    return defaults;
}

namespace {

struct Endpoint {
    std::string origin;  // scheme://host:port
    std::string prefix;  // path without trailing slash
};

Endpoint split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ProviderError("base URL '" + url + "' lacks a scheme");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ProviderError("unsupported URL scheme '" + scheme + "'");
#ifndef ROUNDTABLE_HAVE_OPENSSL
    if (scheme == "https") throw ProviderError("this build has no TLS support");
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) {
        e.prefix = url.substr(path_start);
        while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    }
    return e;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

Json post_json(const HttpOptions& options, const std::string& path, const Json& body) {
    const Endpoint endpoint = split_url(options.base_url);
    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!options.api_key.empty()) headers.emplace("Authorization", "Bearer " + options.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 << std::min(attempt, 5)));
        httplib::Client client(endpoint.origin);
        client.set_connection_timeout(options.timeout_seconds, 0);
        client.set_read_timeout(options.timeout_seconds, 0);
        client.set_write_timeout(options.timeout_seconds, 0);
        auto res = client.Post(endpoint.prefix + path, headers, payload, "application/json");
        if (!res) {
            last_error = "request to " + endpoint.origin + endpoint.prefix + path +
                         " failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status) + " from " + endpoint.prefix + path;
            if (retryable(res->status)) continue;
            throw ProviderError(last_error);
        }
        try {
            return Json::parse(res->body);
        } catch (const Json::parse_error& e) {
            throw ProviderError(std::string("provider returned invalid JSON: ") + e.what());
        }
    }
    throw ProviderError(last_error);
}

}  // namespace roundtable
