#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "support/site_transport.hpp"
#include "vapt/crawl/crawler.hpp"
#include "vapt/http/engine.hpp"
#include "vapt/testbed/config.hpp"
#include "vapt/va/catalog.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::testing {

/// Config with positives only for cls; negatives and traps are dealt to cls as well.
testbed::TestbedConfig only(model::VulnCode cls, int positives, int negatives = 0, int traps = 0);

/// A Site wired to an engine through SiteTransport, plus a catalog with a fixed marker.
struct Lab {
    explicit Lab(testbed::TestbedConfig config, http::RequestPolicy policy = {});

    std::shared_ptr<testbed::Site> site;
    std::shared_ptr<SiteTransport> transport;
    std::shared_ptr<http::TransactionLog> log;
    std::unique_ptr<http::HttpEngine> engine;
    va::PayloadCatalog catalog;
    bool allow_state_change = true;

    [[nodiscard]] va::ScanContext ctx();
    crawl::AttackSurface crawl(int max_pages = 500, int max_depth = 3);
    [[nodiscard]] std::string url(const std::string& path) const;
    [[nodiscard]] const metrics::GroundTruthManifest& manifest() const { return site->manifest(); }
};

/// Serves canned responses by URL (404 otherwise) and records what was asked.
class ScriptedTransport final : public http::Transport {
public:
    void add(const std::string& url, int status, std::string body, http::Headers headers = {});
    void add_html(const std::string& url, std::string body) { add(url, 200, std::move(body), {{"Content-Type", "text/html"}}); }
    /// Every exchange blocks this long in real time (to make overlap observable).
    void set_delay(std::chrono::milliseconds d) { delay_ = d; }

    http::ExchangeResult exchange(const http::HttpRequest& request, std::chrono::milliseconds timeout,
                                  std::size_t max_body_bytes) override;
    http::TlsHandshake handshake(const std::string& host, int port, std::chrono::milliseconds timeout) override;

    [[nodiscard]] std::vector<std::string> requested() const;
    [[nodiscard]] int max_in_flight() const { return max_in_flight_; }

private:
    mutable std::mutex mutex_;
    std::map<std::string, http::HttpResponse> responses_;
    std::vector<std::string> requested_;
    std::chrono::milliseconds delay_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

/// Every transaction tag in the log.
std::vector<std::string> tags_of(const http::TransactionLog& log);

/// A loopback port that was free a moment ago.
int free_port();

} // namespace vapt::testing
