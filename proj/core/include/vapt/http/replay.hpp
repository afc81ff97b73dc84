#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "vapt/http/transaction_log.hpp"
#include "vapt/http/transport.hpp"

namespace vapt::http {

/// Serves recorded responses instead of touching the network.
///
/// Requests are matched on (method, url, body); repeated requests consume recorded
/// responses in log order and the last one is reused once they run out. TLS
/// handshakes are reconstructed from the tls metadata of recorded HTTPS transactions.
class ReplayTransport final : public Transport {
public:
    explicit ReplayTransport(const LogContents& log);

    ExchangeResult exchange(const HttpRequest& request, std::chrono::milliseconds timeout,
                            std::size_t max_body_bytes) override;
    TlsHandshake handshake(const std::string& host, int port, std::chrono::milliseconds timeout) override;

private:
    using Key = std::tuple<std::string, std::string, std::string>;
    struct Queue {
        std::deque<ExchangeResult> pending;
        ExchangeResult last = TransportError{"empty"};
    };

    std::mutex mutex_;
    std::map<Key, Queue> recorded_;
    std::map<std::string, TlsInfo> tls_;   // "host:port" -> facts
};

} // namespace vapt::http
