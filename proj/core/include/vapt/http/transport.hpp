#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "vapt/http/types.hpp"

namespace vapt::http {

using ExchangeResult = std::variant<HttpResponse, TransportError>;

struct TlsHandshake {
    bool connected = false;
    std::optional<std::string> protocol;
    bool certificate_valid = false;
    bool host_match = false;
    std::string error;
};

/// A single request/response exchange with no redirect following, retries or cookies;
/// HttpEngine layers those on top.
class Transport {
public:
    virtual ~Transport() = default;

    virtual ExchangeResult exchange(const HttpRequest& request, std::chrono::milliseconds timeout,
                                    std::size_t max_body_bytes) = 0;

    virtual TlsHandshake handshake(const std::string& host, int port, std::chrono::milliseconds timeout) = 0;
};

/// Real sockets (cpp-httplib for HTTP, OpenSSL for the TLS handshake probe).
std::shared_ptr<Transport> make_network_transport();

} // namespace vapt::http
