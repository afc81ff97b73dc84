#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "vapt/http/clock.hpp"
#include "vapt/http/cookies.hpp"
#include "vapt/http/policy.hpp"
#include "vapt/http/transaction_log.hpp"
#include "vapt/http/transport.hpp"
#include "vapt/http/types.hpp"

namespace vapt::http {

struct SendOptions {
    std::string tag;
    /// Cookie jar for this request; nullptr uses the engine's scan-wide jar.
    CookieJar* jar = nullptr;
    bool use_cookies = true;
    /// Attached verbatim to the recorded transaction (used by the TLS probe).
    std::optional<TlsInfo> tls;
    /// Runs on each hop's transaction just before it is logged.
    std::function<void(HttpTransaction&)> finalize;
};

inline SendOptions tagged(std::string tag, CookieJar* jar = nullptr)
{
    SendOptions options;
    options.tag = std::move(tag);
    options.jar = jar;
    return options;
}

/// Issues requests under a RequestPolicy and records every hop in the transaction log.
///
/// Safe to call from many threads. At most policy.max_concurrent exchanges are in
/// flight at once, and request starts on one host are spaced by at least
/// policy.min_delay. HTTP error statuses are data; transport failures (after
/// retries) come back as a transaction holding a TransportError.
class HttpEngine {
public:
    HttpEngine(RequestPolicy policy, std::shared_ptr<Transport> transport,
               std::shared_ptr<Clock> clock = steady_clock(),
               std::shared_ptr<TransactionLog> log = std::make_shared<TransactionLog>());

    /// Sends the request, following redirects when asked; each hop is logged as its own
    /// transaction and the last one is returned.
    HttpTransaction send(HttpRequest request, const SendOptions& options = {});

    [[nodiscard]] const RequestPolicy& policy() const { return policy_; }
    [[nodiscard]] TransactionLog& log() { return *log_; }
    [[nodiscard]] std::shared_ptr<TransactionLog> shared_log() const { return log_; }
    [[nodiscard]] CookieJar& cookies() { return jar_; }
    [[nodiscard]] Transport& transport() { return *transport_; }
    [[nodiscard]] Clock& clock() { return *clock_; }

private:
    HttpTransaction send_once(const HttpRequest& request, const SendOptions& options, CookieJar* jar);
    void acquire_slot();
    void release_slot();
    void wait_politeness(const std::string& host_key);

    RequestPolicy policy_;
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<Clock> clock_;
    std::shared_ptr<TransactionLog> log_;
    CookieJar jar_;

    std::mutex slot_mutex_;
    std::condition_variable slot_cv_;
    int in_flight_ = 0;

    std::mutex pace_mutex_;
    std::map<std::string, Clock::time_point> last_start_;
};

} // namespace vapt::http
