#include "presuppose/llm/llm.hpp"
#include "presuppose/net/http.hpp"

#include "local_server.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <mutex>

using namespace presuppose;
using namespace presuppose::llm;
using nlohmann::json;

namespace {

CompletionRequest request(std::string user, std::string model = "m")
{
    CompletionRequest r;
    r.user_text = std::move(user);
    r.model_id = std::move(model);
    r.params = GenerationParams::for_label();
    return r;
}

std::vector<std::chrono::milliseconds> g_sleeps;
void record_sleep(std::chrono::milliseconds d) { g_sleeps.push_back(d); }

}  // namespace

TEST(GenerationParams, Defaults)
{
    const auto label = GenerationParams::for_label();
    EXPECT_DOUBLE_EQ(label.temperature, 0.1);
    EXPECT_DOUBLE_EQ(label.top_p, 0.1);
    EXPECT_DOUBLE_EQ(label.frequency_penalty, 0.0);
    EXPECT_EQ(label.max_tokens, 4);
    EXPECT_EQ(GenerationParams::for_generation().max_tokens, 512);
    GenerationParams bad;
    bad.temperature = -1;
    EXPECT_THROW(bad.validate(), ContractError);
    bad = {};
    bad.max_tokens = 0;
    EXPECT_THROW(bad.validate(), ContractError);
}

TEST(Fingerprint, NormalizesLineEndings)
{
    EXPECT_EQ(fingerprint(request("a\r\nb")), fingerprint(request("a\nb")));
    EXPECT_EQ(fingerprint(request("a\rb")), fingerprint(request("a\nb")));
    EXPECT_NE(fingerprint(request("a b")), fingerprint(request("a\nb")));
}

TEST(Fingerprint, SensitiveToEveryField)
{
    const auto base = request("hello");
    const auto fp = fingerprint(base);
    EXPECT_EQ(fp.size(), 64U);
    auto r = base;
    r.model_id = "other";
    EXPECT_NE(fingerprint(r), fp);
    r = base;
    r.params.max_tokens = 5;
    EXPECT_NE(fingerprint(r), fp);
    r = base;
    r.params.temperature = 0.2;
    EXPECT_NE(fingerprint(r), fp);
    r = base;
    r.system_text = "sys";
    EXPECT_NE(fingerprint(r), fp);
    // system/user boundary is not ambiguous
    auto a = request("bc");
    a.system_text = "a";
    auto b = request("c");
    b.system_text = "ab";
    EXPECT_NE(fingerprint(a), fingerprint(b));
}

TEST(EstimateTokens, CeilOfCodePointsOverFour)
{
    EXPECT_EQ(estimate_tokens(""), 0);
    EXPECT_EQ(estimate_tokens("a"), 1);
    EXPECT_EQ(estimate_tokens("abcd"), 1);
    EXPECT_EQ(estimate_tokens("abcde"), 2);
    // four two-byte code points
    EXPECT_EQ(estimate_tokens("\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9"), 1);
}

TEST(ScriptedProvider, AnswersByFingerprint)
{
    const auto r = request("Is it?");
    json script = {{fingerprint(r), "Yes"},
                   {"deadbeef", {{"text", "No"}, {"prompt_tokens", 151}, {"completion_tokens", 1}}}};
    auto p = ScriptedProvider::from_json(script);
    const auto out = p.complete(r);
    EXPECT_EQ(out.text, "Yes");
    EXPECT_EQ(out.usage.llm_calls, 1);
    EXPECT_TRUE(out.usage.estimated);
    EXPECT_EQ(out.usage.prompt_tokens, estimate_tokens("Is it?"));
    try {
        p.complete(request("unknown"));
        FAIL();
    } catch (const MissingScriptError& e) {
        EXPECT_EQ(e.fingerprint(), fingerprint(request("unknown")));
        EXPECT_FALSE(e.retriable());
    }
}

TEST(RecordingProvider, ReplaysIdentically)
{
    CallbackProvider author([](const CompletionRequest& r) {
        return ScriptEntry{"echo:" + r.user_text, 151, 3};
    });
    RecordingProvider rec(author);
    const auto first = rec.complete(request("one"));
    rec.complete(request("two"));
    ScriptedProvider replay(rec.script());
    const auto again = replay.complete(request("one"));
    EXPECT_EQ(again.text, first.text);
    EXPECT_EQ(again.usage, first.usage);
    EXPECT_EQ(again.usage.prompt_tokens, 151);
    EXPECT_FALSE(again.usage.estimated);
    // through JSON as well
    auto from_json = ScriptedProvider::from_json(script_to_json(rec.script()));
    EXPECT_EQ(from_json.complete(request("two")).text, "echo:two");
}

TEST(MeteredProvider, SumsUsage)
{
    CallbackProvider author([](const CompletionRequest&) { return ScriptEntry{"x", 10, 2}; });
    MeteredProvider meter(author);
    meter.complete(request("a"));
    meter.complete(request("b"));
    EXPECT_EQ(meter.totals(), (UsageRecord{20, 4, 2, false}));
}

TEST(HttpChat, RequestBody)
{
    auto r = request("u");
    r.system_text = "s";
    const auto body = HttpChatProvider::request_body(r);
    EXPECT_EQ(body["model"], "m");
    EXPECT_EQ(body["messages"].size(), 2U);
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][1]["content"], "u");
    EXPECT_EQ(body["max_tokens"], 4);
    EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 0.1);
}

TEST(HttpChat, RetriesServerErrorsThenSucceeds)
{
    std::atomic<int> calls{0};
    std::string auth;
    std::mutex m;
    testkit::LocalServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            {
                std::lock_guard lock(m);
                auth = req.get_header_value("Authorization");
            }
            if (++calls < 3) {
                res.status = 503;
                return;
            }
            res.set_content(R"({"choices":[{"message":{"content":"No"}}],"usage":{"prompt_tokens":151,"completion_tokens":1}})",
                            "application/json");
        });
    });
    g_sleeps.clear();
    HttpChatProvider p(HttpChatConfig{server.url() + "/v1/", "k", std::chrono::seconds(5), {}}, record_sleep);
    const auto out = p.complete(request("q"));
    EXPECT_EQ(out.text, "No");
    EXPECT_EQ(out.usage, (UsageRecord{151, 1, 1, false}));
    EXPECT_EQ(calls.load(), 3);
    EXPECT_EQ(auth, "Bearer k");
    ASSERT_EQ(g_sleeps.size(), 2U);
    EXPECT_EQ(g_sleeps[0], std::chrono::milliseconds(500));
    EXPECT_EQ(g_sleeps[1], std::chrono::milliseconds(1000));
}

TEST(HttpChat, RateLimitHonorsRetryAfter)
{
    std::atomic<int> calls{0};
    testkit::LocalServer server([&](httplib::Server& s) {
        s.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
            if (++calls == 1) {
                res.status = 429;
                res.set_header("Retry-After", "7");
                return;
            }
            res.set_content(R"({"choices":[{"message":{"content":"Yes"}}]})", "application/json");
        });
    });
    g_sleeps.clear();
    HttpChatProvider p(HttpChatConfig{server.url(), "k", std::chrono::seconds(5), {}}, record_sleep);
    const auto out = p.complete(request("q"));
    EXPECT_EQ(out.text, "Yes");
    EXPECT_TRUE(out.usage.estimated);
    ASSERT_EQ(g_sleeps.size(), 1U);
    EXPECT_EQ(g_sleeps[0], std::chrono::milliseconds(7000));
}

TEST(HttpChat, AuthAndBadPayloadAreNotRetried)
{
    std::atomic<int> calls{0};
    testkit::LocalServer server([&](httplib::Server& s) {
        s.Post("/auth/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.status = 401;
        });
        s.Post("/bad/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.set_content("{not json", "application/json");
        });
    });
    g_sleeps.clear();
    HttpChatProvider auth(HttpChatConfig{server.url() + "/auth", "k", std::chrono::seconds(5), {}}, record_sleep);
    EXPECT_THROW(auth.complete(request("q")), net::AuthError);
    EXPECT_EQ(calls.load(), 1);
    HttpChatProvider bad(HttpChatConfig{server.url() + "/bad", "k", std::chrono::seconds(5), {}}, record_sleep);
    EXPECT_THROW(bad.complete(request("q")), net::BadResponseError);
    EXPECT_EQ(calls.load(), 2);
    EXPECT_TRUE(g_sleeps.empty());
    HttpChatProvider nokey(HttpChatConfig{server.url(), "", std::chrono::seconds(5), {}}, record_sleep);
    EXPECT_THROW(nokey.complete(request("q")), net::AuthError);
}

TEST(HttpChat, GivesUpAfterFiveAttempts)
{
    std::atomic<int> calls{0};
    testkit::LocalServer server([&](httplib::Server& s) {
        s.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.status = 500;
        });
    });
    g_sleeps.clear();
    HttpChatProvider p(HttpChatConfig{server.url(), "k", std::chrono::seconds(5), {}}, record_sleep);
    try {
        p.complete(request("q"));
        FAIL();
    } catch (const net::NetworkError& e) {
        EXPECT_EQ(e.attempts(), 5);
    }
    EXPECT_EQ(calls.load(), 5);
    EXPECT_EQ(g_sleeps.size(), 4U);
}

TEST(Retry, DelayScheduleIsCapped)
{
    net::RetryPolicy p;
    EXPECT_EQ(p.delay_after(1), std::chrono::milliseconds(500));
    EXPECT_EQ(p.delay_after(2), std::chrono::milliseconds(1000));
    EXPECT_EQ(p.delay_after(7), std::chrono::milliseconds(30000));
    EXPECT_EQ(p.delay_after(20), std::chrono::milliseconds(30000));
}

TEST(Http, UrlHelpers)
{
    EXPECT_EQ(net::url_encode("a b&c=d/é"), "a%20b%26c%3Dd%2F%C3%A9");
    EXPECT_EQ(net::url_host("https://EN.Wikipedia.org:443/wiki/X"), "en.wikipedia.org");
    EXPECT_EQ(net::url_host("not a url"), "");
}

TEST(Http, ConnectionRefusedIsNetworkError)
{
    int port;
    {
        testkit::LocalServer s([](httplib::Server&) {});
        port = std::stoi(s.url().substr(s.url().rfind(':') + 1));
    }
    net::HttpOptions o;
    o.timeout = std::chrono::seconds(2);
    EXPECT_THROW(net::http_get("http://127.0.0.1:" + std::to_string(port) + "/", o), net::NetworkError);
}
