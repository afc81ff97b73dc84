#include <doctest.h>

#include <thread>

#include "support/fixtures.hpp"
#include "vapt/error.hpp"
#include "vapt/http/callback.hpp"
#include "vapt/http/cookies.hpp"
#include "vapt/http/engine.hpp"
#include "vapt/http/replay.hpp"
#include "vapt/http/tls_probe.hpp"
#include "vapt/http/url.hpp"
#include "vapt/testbed/server.hpp"

using namespace vapt;
using namespace std::chrono_literals;

namespace {

// Notes the virtual time at which each exchange starts.
class StampingTransport final : public http::Transport {
public:
    explicit StampingTransport(std::shared_ptr<http::ManualClock> clock) : clock_(std::move(clock)) {}

    http::ExchangeResult exchange(const http::HttpRequest&, std::chrono::milliseconds, std::size_t) override
    {
        std::lock_guard lock(mutex_);
        starts.push_back(clock_->now());
        http::HttpResponse r;
        r.status = 200;
        return r;
    }
    http::TlsHandshake handshake(const std::string&, int, std::chrono::milliseconds) override { return {}; }

    std::mutex mutex_;
    std::vector<http::Clock::time_point> starts;

private:
    std::shared_ptr<http::ManualClock> clock_;
};

class FailingTransport final : public http::Transport {
public:
    http::ExchangeResult exchange(const http::HttpRequest&, std::chrono::milliseconds, std::size_t) override
    {
        ++calls;
        return http::TransportError{"connection reset"};
    }
    http::TlsHandshake handshake(const std::string&, int, std::chrono::milliseconds) override { return {}; }
    std::atomic<int> calls{0};
};

http::HttpRequest get(std::string url)
{
    http::HttpRequest r;
    r.url = std::move(url);
    return r;
}

testbed::TestbedConfig live_config(bool tls)
{
    testbed::TestbedConfig cfg;
    cfg.port = 0;
    cfg.tls = tls;
    cfg.tls_port = 0;
    return cfg;
}

} // namespace

TEST_CASE("request starts on one host are spaced by min_delay")
{
    auto clock = std::make_shared<http::ManualClock>();
    auto transport = std::make_shared<StampingTransport>(clock);
    http::RequestPolicy policy;
    policy.min_delay = 250ms;
    policy.max_concurrent = 4;
    http::HttpEngine engine(policy, transport, clock);

    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 5; ++i)
                engine.send(get("http://example.test/p" + std::to_string(t * 10 + i)));
        });
    }
    for (auto& t : threads)
        t.join();

    auto starts = transport->starts;
    REQUIRE(starts.size() == 20);
    std::sort(starts.begin(), starts.end());
    for (std::size_t i = 1; i < starts.size(); ++i)
        CHECK(starts[i] - starts[i - 1] >= 250ms);
}

TEST_CASE("different hosts are paced independently")
{
    auto clock = std::make_shared<http::ManualClock>();
    auto transport = std::make_shared<StampingTransport>(clock);
    http::RequestPolicy policy;
    policy.min_delay = 1000ms;
    http::HttpEngine engine(policy, transport, clock);
    engine.send(get("http://a.test/"));
    engine.send(get("http://b.test/"));
    REQUIRE(transport->starts.size() == 2);
    CHECK(transport->starts[1] - transport->starts[0] < 1000ms);
}

TEST_CASE("at most max_concurrent exchanges are in flight")
{
    auto transport = std::make_shared<testing::ScriptedTransport>();
    transport->set_delay(15ms);
    http::RequestPolicy policy;
    policy.max_concurrent = 3;
    http::HttpEngine engine(policy, transport);

    std::vector<std::thread> threads;
    for (int t = 0; t < 10; ++t)
        threads.emplace_back([&, t] { engine.send(get("http://x.test/" + std::to_string(t))); });
    for (auto& t : threads)
        t.join();
    CHECK(transport->max_in_flight() <= 3);
    CHECK(transport->max_in_flight() >= 2);
    CHECK(engine.log().size() == 10);
}

TEST_CASE("send is total and numbers every transaction")
{
    auto failing = std::make_shared<FailingTransport>();
    http::RequestPolicy policy;
    policy.max_retries = 2;
    http::HttpEngine engine(policy, failing);
    auto tx = engine.send(get("http://down.test/"));
    CHECK_FALSE(tx.ok());
    REQUIRE(tx.error() != nullptr);
    CHECK(tx.error()->message == "connection reset");
    CHECK(tx.attempts == 3);
    CHECK(failing->calls == 3);

    auto tx2 = engine.send(get("http://down.test/again"));
    CHECK(tx2.sequence_no > tx.sequence_no);
    CHECK(engine.log().size() == 2);
}

TEST_CASE("http error statuses are data and redirects log every hop")
{
    auto transport = std::make_shared<testing::ScriptedTransport>();
    transport->add("http://t.test/old", 302, "", {{"Location", "/new"}});
    transport->add_html("http://t.test/new", "<p>moved here</p>");
    http::HttpEngine engine({}, transport);

    auto missing = engine.send(get("http://t.test/missing"));
    CHECK(missing.ok());
    CHECK(missing.status() == 404);

    auto moved = engine.send(get("http://t.test/old"));
    CHECK(moved.status() == 200);
    CHECK(moved.request.url == "http://t.test/new");
    auto log = engine.log().snapshot();
    REQUIRE(log.size() == 3);
    CHECK(log[1].status() == 302);

    auto no_follow = get("http://t.test/old");
    no_follow.follow_redirects = false;
    CHECK(engine.send(no_follow).status() == 302);
}

TEST_CASE("redirect chains stop after max_redirects hops")
{
    auto transport = std::make_shared<testing::ScriptedTransport>();
    transport->add("http://loop.test/a", 302, "", {{"Location", "/b"}});
    transport->add("http://loop.test/b", 302, "", {{"Location", "/a"}});
    http::RequestPolicy policy;
    policy.max_redirects = 3;
    http::HttpEngine engine(policy, transport);
    auto tx = engine.send(get("http://loop.test/a"));
    CHECK(tx.status() == 302);
    CHECK(engine.log().size() == 4);
}

TEST_CASE("the scan-wide cookie jar carries sessions between requests")
{
    auto transport = std::make_shared<testing::ScriptedTransport>();
    transport->add("http://c.test/login", 200, "ok", {{"Set-Cookie", "sid=abc; Path=/; HttpOnly"}});
    http::HttpEngine engine({}, transport);
    engine.send(get("http://c.test/login"));
    auto jar = engine.cookies().all();
    REQUIRE(jar.size() == 1);
    CHECK(jar[0].name == "sid");
    CHECK(jar[0].http_only);
    CHECK(engine.cookies().header_for(*http::Url::parse("http://c.test/x")) == "sid=abc");
}

TEST_CASE("policy invariants are enforced")
{
    http::RequestPolicy p;
    CHECK_NOTHROW(p.validate());
    p.max_concurrent = 0;
    CHECK_THROWS_AS(p.validate(), UsageError);
    p = {};
    p.timeout = 0ms;
    CHECK_THROWS_AS(p.validate(), UsageError);
    CHECK(http::kDefaultPolicy.max_concurrent == 8);
    CHECK(http::kDefaultPolicy.timeout == 10'000ms);
    CHECK(http::kDefaultPolicy.max_retries == 1);
    CHECK(http::kDefaultPolicy.min_delay == 0ms);
}

TEST_CASE("url canonicalization")
{
    CHECK(http::canonicalize("HTTP://Example.COM:80/a/./b/../c?z=1&a=2#frag") == "http://example.com/a/c?a=2&z=1");
    CHECK(http::remove_dot_segments("/a/b/c/./../../g") == "/a/g");
    CHECK(http::remove_dot_segments("mid/content=5/../6") == "mid/6");
    auto base = http::Url::parse("http://h.test/dir/page?q=1");
    REQUIRE(base);
    CHECK(base->resolve("other")->str() == "http://h.test/dir/other");
    CHECK(base->resolve("/root")->str() == "http://h.test/root");
    CHECK(base->resolve("//x.test/y")->str() == "http://x.test/y");
    CHECK(http::percent_decode("a+b%20c") == "a b c");
    CHECK(http::parse_query("q=%3Csvg+x%3E&n") == http::QueryParams{{"q", "<svg x>"}, {"n", ""}});
}

TEST_CASE("callback tokens match whole words only")
{
    CHECK(http::has_token("/vxab-1", "vxab-1"));
    CHECK(http::has_token("/vxab-1?x", "vxab-1"));
    CHECK_FALSE(http::has_token("/vxab-12", "vxab-1"));
    CHECK_FALSE(http::has_token("/zvxab-1", "vxab-1"));
    CHECK_FALSE(http::has_token("/anything", ""));
}

TEST_CASE("replaying a log reproduces the recorded responses")
{
    auto transport = std::make_shared<testing::ScriptedTransport>();
    transport->add_html("http://r.test/", "<p>one</p>");
    auto path = std::filesystem::temp_directory_path() / "vapt_replay_test.jsonl";
    {
        auto log = std::make_shared<http::TransactionLog>(path);
        log->write_header({{"marker", "vxreplay1"}});
        http::HttpEngine engine({}, transport, http::steady_clock(), log);
        engine.send(get("http://r.test/"));
        engine.send(get("http://r.test/gone"));
        log->record_callback("/vxreplay1-1");
    }
    auto contents = http::read_transaction_log(path);
    CHECK(contents.header["marker"] == "vxreplay1");
    REQUIRE(contents.transactions.size() == 2);
    CHECK(contents.callbacks == std::vector<std::string>{"/vxreplay1-1"});

    http::HttpEngine replay({}, std::make_shared<http::ReplayTransport>(contents));
    CHECK(replay.send(get("http://r.test/")).body() == "<p>one</p>");
    CHECK(replay.send(get("http://r.test/gone")).status() == 404);
    CHECK_FALSE(replay.send(get("http://r.test/never")).ok());
    std::filesystem::remove(path);
}

TEST_CASE("live testbed: landing page, 404 and closed port")
{
    testbed::Server server(live_config(false));
    server.start();
    http::HttpEngine engine({}, http::make_network_transport());
    auto origin = server.config().origin();

    auto root = engine.send(get(origin + "/"));
    CHECK(root.status() == 200);
    CHECK_FALSE(root.body().empty());
    CHECK(engine.send(get(origin + "/missing")).status() == 404);

    // Port 1 on loopback has no listener.
    http::RequestPolicy quick;
    quick.max_retries = 0;
    http::HttpEngine closed(quick, http::make_network_transport());
    auto tx = closed.send(get("http://127.0.0.1:1/"));
    CHECK_FALSE(tx.ok());
    CHECK(tx.error() != nullptr);
    server.stop();
}

TEST_CASE("tls probe against the live testbed")
{
    testbed::Server server(live_config(true));
    server.start();
    const auto& cfg = server.config();
    http::HttpEngine engine({}, http::make_network_transport());

    auto plain = http::tls_probe(engine, cfg.host, cfg.port);
    CHECK_FALSE(plain.info.https_available);
    CHECK_FALSE(plain.info.certificate_valid);
    CHECK_FALSE(plain.info.protocol_version);

    auto secure = http::tls_probe(engine, cfg.host, cfg.tls_port);
    CHECK(secure.info.https_available);
    CHECK_FALSE(secure.info.certificate_valid);
    CHECK(secure.info.hsts_present);
    REQUIRE(secure.info.protocol_version);
    CHECK_FALSE(http::is_legacy_protocol(*secure.info.protocol_version));
    CHECK(secure.sequence_no);
    server.stop();
}

TEST_CASE("callback listener records hits in the log")
{
    auto log = std::make_shared<http::TransactionLog>();
    http::CallbackListener listener("127.0.0.1", 0, log);
    CHECK(listener.port() > 0);
    http::HttpEngine engine({}, http::make_network_transport());
    engine.send(get(listener.base_url() + "/vxcb00001-3"));
    CHECK(listener.wait_for("vxcb00001-3", 2000ms));
    CHECK_FALSE(listener.wait_for("vxcb00001-30", 50ms));
    CHECK(log->callbacks().size() == 1);
}
