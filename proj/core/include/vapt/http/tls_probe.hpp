#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vapt/http/engine.hpp"

namespace vapt::http {

struct TlsProbeResult {
    TlsInfo info;
    /// The follow-up HTTPS request that carried the HSTS check, when the handshake succeeded.
    std::optional<std::uint64_t> sequence_no;
};

/// Handshakes with host:port, then fetches "/" over HTTPS to look for Strict-Transport-Security.
/// A failed handshake yields https_available=false with every other field cleared.
TlsProbeResult tls_probe(HttpEngine& engine, const std::string& host, int port, const std::string& tag = "tls");

/// Protocol labels considered obsolete ("SSLv3", "TLSv1", "TLSv1.1").
bool is_legacy_protocol(const std::string& label);

} // namespace vapt::http
