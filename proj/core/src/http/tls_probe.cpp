#include "vapt/http/tls_probe.hpp"

#include "vapt/http/url.hpp"

namespace vapt::http {

TlsProbeResult tls_probe(HttpEngine& engine, const std::string& host, int port, const std::string& tag)
{
    TlsProbeResult result;
    auto hs = engine.transport().handshake(host, port, engine.policy().timeout);
    if (!hs.connected)
        return result;

    result.info.https_available = true;
    result.info.protocol_version = hs.protocol;
    result.info.certificate_valid = hs.certificate_valid;
    result.info.certificate_host_match = hs.host_match;

    Url url;
    url.scheme = "https";
    url.host = host;
    url.port = port;
    url.path = "/";

    HttpRequest request;
    request.url = url.str();
    request.follow_redirects = false;
    SendOptions options;
    options.tag = tag;
    options.use_cookies = false;
    options.tls = result.info;
    options.finalize = [](HttpTransaction& tx) {
        if (const auto* response = tx.response(); response != nullptr && tx.tls)
            tx.tls->hsts_present = header_value(response->headers, "Strict-Transport-Security").has_value();
    };
    auto probe = engine.send(request, options);
    if (probe.tls)
        result.info = *probe.tls;
    result.sequence_no = probe.sequence_no;
    return result;
}

bool is_legacy_protocol(const std::string& label)
{
    return label == "SSLv2" || label == "SSLv3" || label == "TLSv1" || label == "TLSv1.1";
}

} // namespace vapt::http
