#include "presuppose/net/http.hpp"
#include "presuppose/retrieval/retrieval.hpp"

#include <fstream>
#include <sstream>

namespace presuppose::retrieval {

using nlohmann::json;

bool is_wikipedia_url(const std::string& url)
{
    if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0)
        return false;
    const auto host = net::url_host(url);
    static constexpr std::string_view kDomain = "wikipedia.org";
    if (host == kDomain)
        return true;
    return host.size() > kDomain.size() + 1 &&
           host.compare(host.size() - kDomain.size(), kDomain.size(), kDomain) == 0 &&
           host[host.size() - kDomain.size() - 1] == '.';
}

std::vector<Document> fetch_documents(const std::string& query, SearchProvider& search,
                                      PageFetcher& fetcher)
{
    std::vector<Document> out;
    for (const auto& hit : search.search(query)) {
        if (out.size() == kMaxDocuments)
            break;
        if (!is_wikipedia_url(hit.url))
            continue;
        out.push_back(Document{hit.url, fetcher.fetch(hit.url)});
    }
    return out;
}

FixtureWeb FixtureWeb::from_json(const json& doc, const std::filesystem::path& base_dir)
{
    FixtureWeb web;
    if (doc.contains("search")) {
        for (const auto& [query, urls] : doc.at("search").items())
            web.add_results(query, urls.get<std::vector<std::string>>());
    }
    if (doc.contains("pages")) {
        for (const auto& [url, page] : doc.at("pages").items()) {
            if (page.is_string()) {
                web.add_page(url, page.get<std::string>());
                continue;
            }
            const auto path = base_dir / page.at("file").get<std::string>();
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw ContractError("fixture page file " + path.string() + " not found");
            std::ostringstream buffer;
            buffer << in.rdbuf();
            web.add_page(url, buffer.str());
        }
    }
    return web;
}

FixtureWeb FixtureWeb::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractError("cannot open fixture web file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ContractError("fixture web file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc, path.parent_path());
}

void FixtureWeb::add_results(std::string query, std::vector<std::string> urls)
{
    results_.insert_or_assign(std::move(query), std::move(urls));
}

void FixtureWeb::add_page(std::string url, std::string html)
{
    pages_.insert_or_assign(std::move(url), std::move(html));
}

std::vector<SearchHit> FixtureWeb::search(const std::string& query)
{
    std::vector<SearchHit> hits;
    if (const auto it = results_.find(query); it != results_.end()) {
        for (const auto& url : it->second)
            hits.push_back(SearchHit{url, {}});
    }
    return hits;
}

std::string FixtureWeb::fetch(const std::string& url)
{
    const auto it = pages_.find(url);
    if (it == pages_.end())
        throw net::BadResponseError("fixture web has no page for " + url);
    return it->second;
}

HttpSearchProvider::HttpSearchProvider(HttpSearchConfig config, net::Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper))
{
}

std::string HttpSearchProvider::request_url(const std::string& query) const
{
    std::string url = config_.url_template;
    auto substitute = [&url](std::string_view slot, const std::string& value) {
        for (auto pos = url.find(slot); pos != std::string::npos; pos = url.find(slot, pos)) {
            const auto encoded = net::url_encode(value);
            url.replace(pos, slot.size(), encoded);
            pos += encoded.size();
        }
    };
    substitute("{query}", query);
    substitute("{key}", config_.api_key);
    substitute("{cx}", config_.engine_id);
    return url;
}

std::vector<SearchHit> HttpSearchProvider::parse_results(const json& payload)
{
    std::vector<SearchHit> hits;
    auto read = [&hits](const json& items, const char* url_key) {
        for (const auto& item : items) {
            if (!item.contains(url_key) || !item.at(url_key).is_string())
                continue;
            hits.push_back(SearchHit{item.at(url_key).get<std::string>(),
                                     item.value("title", std::string())});
        }
    };
    if (payload.contains("items") && payload["items"].is_array())
        read(payload["items"], "link");
    else if (payload.contains("results") && payload["results"].is_array())
        read(payload["results"], "url");
    return hits;
}

std::vector<SearchHit> HttpSearchProvider::search(const std::string& query)
{
    const auto url = request_url(query);
    net::HttpOptions options;
    options.timeout = config_.timeout;
    return net::with_retry(
        [&] {
            const auto raw = net::http_get(url, options);
            try {
                return parse_results(json::parse(raw.body));
            } catch (const json::exception& e) {
                throw net::BadResponseError("malformed search payload: " + std::string(e.what()));
            }
        },
        config_.retry, sleeper_);
}

HttpPageFetcher::HttpPageFetcher(int per_host_limit, std::chrono::seconds timeout,
                                 net::RetryPolicy retry, net::Sleeper sleeper)
    : per_host_limit_(per_host_limit < 1 ? 1 : per_host_limit),
      timeout_(timeout),
      retry_(retry),
      sleeper_(std::move(sleeper))
{
}

std::string HttpPageFetcher::fetch(const std::string& url)
{
    const auto host = net::url_host(url);
    {
        std::unique_lock lock(mutex_);
        released_.wait(lock, [&] { return in_flight_[host] < per_host_limit_; });
        ++in_flight_[host];
    }
    struct Release {
        HttpPageFetcher& self;
        const std::string& host;
        ~Release()
        {
            {
                std::lock_guard lock(self.mutex_);
                --self.in_flight_[host];
            }
            self.released_.notify_all();
        }
    } release{*this, host};

    net::HttpOptions options;
    options.timeout = timeout_;
    options.headers["User-Agent"] = "presuppose/1.0 (research harness)";
    return net::with_retry([&] { return net::http_get(url, options).body; }, retry_, sleeper_);
}

}  // namespace presuppose::retrieval
