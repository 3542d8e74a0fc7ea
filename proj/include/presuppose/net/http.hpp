#pragma once

#include <chrono>
#include <map>
#include <string>

namespace presuppose::net {

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
};

struct HttpOptions {
    std::chrono::seconds timeout{60};
    std::map<std::string, std::string> headers;
};

// One-shot requests over http:// or https://. Transport failures raise
// NetworkError; 401/403 raise AuthError; 429 raises RateLimitError (with the
// Retry-After hint); 5xx raise NetworkError; other non-2xx raise
// BadResponseError. Safe to call concurrently.
HttpResponse http_get(const std::string& url, const HttpOptions& options = {});
HttpResponse http_post_json(const std::string& url, const std::string& json_body,
                            const HttpOptions& options = {});

// Percent-encodes a query-string component.
std::string url_encode(const std::string& text);

// Lower-cased host of an absolute URL ("" when there is none).
std::string url_host(const std::string& url);

}  // namespace presuppose::net
