#include "vapt/http/replay.hpp"

#include "vapt/http/url.hpp"

namespace vapt::http {

ReplayTransport::ReplayTransport(const LogContents& log)
{
    auto txs = log.transactions;
    std::sort(txs.begin(), txs.end(), [](const auto& a, const auto& b) { return a.sequence_no < b.sequence_no; });
    for (const auto& tx : txs) {
        auto& q = recorded_[Key{tx.request.method, tx.request.url, tx.request.body}];
        q.pending.push_back(tx.outcome);
        if (tx.tls) {
            if (auto url = Url::parse(tx.request.url))
                tls_[url->host + ":" + std::to_string(url->port)] = *tx.tls;
        }
    }
}

ExchangeResult ReplayTransport::exchange(const HttpRequest& request, std::chrono::milliseconds, std::size_t)
{
    std::lock_guard lock(mutex_);
    auto it = recorded_.find(Key{request.method, request.url, request.body});
    if (it == recorded_.end())
        return TransportError{"replay: no recorded exchange for " + request.method + " " + request.url};
    auto& q = it->second;
    if (!q.pending.empty()) {
        q.last = std::move(q.pending.front());
        q.pending.pop_front();
    }
    return q.last;
}

TlsHandshake ReplayTransport::handshake(const std::string& host, int port, std::chrono::milliseconds)
{
    std::lock_guard lock(mutex_);
    TlsHandshake hs;
    auto it = tls_.find(host + ":" + std::to_string(port));
    if (it == tls_.end() || !it->second.https_available) {
        hs.error = "replay: no recorded handshake";
        return hs;
    }
    hs.connected = true;
    hs.protocol = it->second.protocol_version;
    hs.certificate_valid = it->second.certificate_valid;
    hs.host_match = it->second.certificate_host_match;
    return hs;
}

} // namespace vapt::http
