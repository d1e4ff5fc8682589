#pragma once

#include <stdexcept>
#include <string>

namespace fairrag {

struct ChatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NetworkError : ChatError {
    using ChatError::ChatError;
};
struct AuthError : ChatError {
    using ChatError::ChatError;
};
struct RateLimitedError : ChatError {
    using ChatError::ChatError;
};
struct MalformedResponseError : ChatError {
    using ChatError::ChatError;
};

struct EndpointConfig {
    std::string url;      // e.g. https://host/v1/chat/completions
    std::string api_key;  // taken from an environment variable by the CLI
    std::string model;
    double temperature = 0.1;
    int max_attempts = 5;      // retries on HTTP 429 with exponential backoff
    int backoff_base_ms = 500;
    int timeout_seconds = 60;
};

/// POSTs a standard chat-completion JSON body
/// {model, temperature, messages:[{role:"user", content:prompt}]} and returns
/// the first choice's message content. HTTP 429 is retried with exponential
/// backoff up to max_attempts; 401/403 raise AuthError; transport failures and
/// other statuses raise NetworkError; unexpected bodies raise
/// MalformedResponseError.
std::string call_chat_endpoint(const std::string& prompt, const EndpointConfig& config);

}  // namespace fairrag
