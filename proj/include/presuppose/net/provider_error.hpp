#pragma once

#include "presuppose/errors.hpp"

#include <chrono>
#include <optional>

namespace presuppose::net {

// Failure talking to an external provider (LLM, search, embedder, verifier).
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, bool retriable,
                  std::optional<std::chrono::milliseconds> retry_after = std::nullopt)
        : Error(what), retriable_(retriable), retry_after_(retry_after)
    {
    }

    bool retriable() const { return retriable_; }
    // Server-provided hint (Retry-After), if any.
    std::optional<std::chrono::milliseconds> retry_after() const { return retry_after_; }
    // Number of attempts made before this error was surfaced.
    int attempts() const { return attempts_; }
    void set_attempts(int attempts) { attempts_ = attempts; }

private:
    bool retriable_;
    std::optional<std::chrono::milliseconds> retry_after_;
    int attempts_ = 1;
};

// Connection refused, timeout, TLS failure, 5xx.
class NetworkError : public ProviderError {
public:
    explicit NetworkError(const std::string& what) : ProviderError(what, true) {}
};

// 401/403 or a missing key. Retrying will not help.
class AuthError : public ProviderError {
public:
    explicit AuthError(const std::string& what) : ProviderError(what, false) {}
};

// 429.
class RateLimitError : public ProviderError {
public:
    RateLimitError(const std::string& what, std::optional<std::chrono::milliseconds> retry_after)
        : ProviderError(what, true, retry_after)
    {
    }
};

// Any other rejected request or malformed provider payload.
class BadResponseError : public ProviderError {
public:
    explicit BadResponseError(const std::string& what) : ProviderError(what, false) {}
};

}  // namespace presuppose::net
