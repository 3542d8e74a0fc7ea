#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "presuppose/net/http.hpp"
#include "presuppose/net/provider_error.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace presuppose::net {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw BadResponseError("not an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::optional<std::chrono::milliseconds> parse_retry_after(const httplib::Result& res)
{
    if (!res->has_header("Retry-After"))
        return std::nullopt;
    const auto value = res->get_header_value("Retry-After");
    double seconds = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    if (std::from_chars(first, last, seconds).ec != std::errc())
        return std::nullopt;
    return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0));
}

HttpResponse finish(const httplib::Result& res, const std::string& url)
{
    if (!res)
        throw NetworkError("request to " + url + " failed: " + httplib::to_string(res.error()));
    const int status = res->status;
    if (status == 401 || status == 403)
        throw AuthError("request to " + url + " rejected with HTTP " + std::to_string(status));
    if (status == 429)
        throw RateLimitError("request to " + url + " rate-limited", parse_retry_after(res));
    if (status >= 500)
        throw NetworkError("request to " + url + " failed with HTTP " + std::to_string(status));
    if (status < 200 || status >= 300)
        throw BadResponseError("request to " + url + " failed with HTTP " +
                               std::to_string(status) + ": " + res->body.substr(0, 200));
    HttpResponse out;
    out.status = status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers)
        out.headers.emplace(k, v);
    return out;
}

httplib::Client make_client(const SplitUrl& split, const HttpOptions& options)
{
    httplib::Client client(split.origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);
    client.set_follow_location(true);
    return client;
}

httplib::Headers to_headers(const HttpOptions& options)
{
    httplib::Headers headers;
    for (const auto& [k, v] : options.headers)
        headers.emplace(k, v);
    return headers;
}

}  // namespace

HttpResponse http_get(const std::string& url, const HttpOptions& options)
{
    const auto split = split_url(url);
    auto client = make_client(split, options);
    return finish(client.Get(split.target, to_headers(options)), url);
}

HttpResponse http_post_json(const std::string& url, const std::string& json_body,
                            const HttpOptions& options)
{
    const auto split = split_url(url);
    auto client = make_client(split, options);
    return finish(client.Post(split.target, to_headers(options), json_body, "application/json"),
                  url);
}

std::string url_encode(const std::string& text)
{
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

std::string url_host(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        return {};
    auto rest = url.substr(scheme_end + 3);
    rest = rest.substr(0, rest.find_first_of("/?#"));
    if (const auto at = rest.rfind('@'); at != std::string::npos)
        rest = rest.substr(at + 1);
    rest = rest.substr(0, rest.find(':'));
    for (auto& c : rest)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return rest;
}

}  // namespace presuppose::net
