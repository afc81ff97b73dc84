#include "support/fixtures.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <stdexcept>
#include <thread>

#include "vapt/http/url.hpp"

namespace vapt::testing {

testbed::TestbedConfig only(model::VulnCode cls, int positives, int negatives, int traps)
{
    testbed::TestbedConfig cfg;
    for (auto code : model::kAllCodes)
        cfg.counts[code] = 0;
    cfg.counts[cls] = positives;
    cfg.negatives = negatives;
    cfg.fp_traps = traps;
    return cfg;
}

Lab::Lab(testbed::TestbedConfig config, http::RequestPolicy policy)
    : site(std::make_shared<testbed::Site>(std::move(config))),
      transport(std::make_shared<SiteTransport>(site)),
      log(std::make_shared<http::TransactionLog>()),
      engine(std::make_unique<http::HttpEngine>(policy, transport, http::steady_clock(), log)),
      catalog(va::PayloadCatalog::bundled())
{
    catalog.marker = va::make_marker(7);
}

va::ScanContext Lab::ctx()
{
    va::ScanContext c;
    c.engine = engine.get();
    c.catalog = &catalog;
    c.allow_state_change = allow_state_change;
    return c;
}

crawl::AttackSurface Lab::crawl(int max_pages, int max_depth)
{
    crawl::Target target;
    target.base_url = site->config().origin() + "/";
    target.max_pages = max_pages;
    target.max_depth = max_depth;
    return crawl::crawl(target, *engine);
}

std::string Lab::url(const std::string& path) const { return site->config().origin() + path; }

void ScriptedTransport::add(const std::string& url, int status, std::string body, http::Headers headers)
{
    http::HttpResponse r;
    r.status = status;
    r.body = std::move(body);
    r.headers = std::move(headers);
    std::lock_guard lock(mutex_);
    responses_[url] = std::move(r);
}

http::ExchangeResult ScriptedTransport::exchange(const http::HttpRequest& request, std::chrono::milliseconds,
                                                 std::size_t)
{
    int now = ++in_flight_;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    if (delay_.count() > 0)
        std::this_thread::sleep_for(delay_);
    http::ExchangeResult result;
    {
        std::lock_guard lock(mutex_);
        requested_.push_back(request.url);
        auto it = responses_.find(request.url);
        if (it != responses_.end()) {
            result = it->second;
        } else {
            http::HttpResponse missing;
            missing.status = 404;
            missing.body = "not found";
            result = missing;
        }
    }
    --in_flight_;
    return result;
}

http::TlsHandshake ScriptedTransport::handshake(const std::string&, int, std::chrono::milliseconds)
{
    http::TlsHandshake hs;
    hs.error = "connection refused";
    return hs;
}

std::vector<std::string> ScriptedTransport::requested() const
{
    std::lock_guard lock(mutex_);
    return requested_;
}

std::vector<std::string> tags_of(const http::TransactionLog& log)
{
    std::vector<std::string> tags;
    for (const auto& tx : log.snapshot())
        tags.push_back(tx.tag);
    return tags;
}

int free_port()
{
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        throw std::runtime_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    socklen_t len = sizeof(addr);
    bool ok = ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0 &&
              ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0;
    ::close(fd);
    if (!ok)
        throw std::runtime_error("cannot bind an ephemeral port");
    return ntohs(addr.sin_port);
}

} // namespace vapt::testing
