#include "fairrag/chat_client.hpp"

#include <chrono>
#include <memory>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace fairrag {
namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw NetworkError("endpoint url missing scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string call_chat_endpoint(const std::string& prompt, const EndpointConfig& config) {
    if (config.url.empty()) {
        throw NetworkError("no endpoint url configured");
    }
    const auto [origin, path] = split_url(config.url);

    httplib::Client client(origin);
    client.set_connection_timeout(config.timeout_seconds, 0);
    client.set_read_timeout(config.timeout_seconds, 0);

    nlohmann::json body = {
        {"model", config.model},
        {"temperature", config.temperature},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    httplib::Headers headers;
    if (!config.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config.api_key);
    }

    const int attempts = std::max(1, config.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            throw NetworkError("endpoint transport failure: " + httplib::to_string(res.error()));
        }
        if (res->status == 429) {
            if (attempt == attempts) {
                throw RateLimitedError("rate limited after " + std::to_string(attempts) +
                                       " attempts");
            }
            const auto backoff =
                std::chrono::milliseconds(config.backoff_base_ms) * (1 << (attempt - 1));
            std::this_thread::sleep_for(backoff);
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("endpoint rejected credentials (HTTP " +
                            std::to_string(res->status) + ")");
        }
        if (res->status < 200 || res->status >= 300) {
            throw NetworkError("endpoint returned HTTP " + std::to_string(res->status));
        }
        try {
            const auto parsed = nlohmann::json::parse(res->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponseError(std::string("unexpected response shape: ") + e.what());
        }
    }
    throw RateLimitedError("rate limited");  // unreachable
}

}  // namespace fairrag
