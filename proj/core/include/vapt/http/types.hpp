#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vapt::http {

/// Ordered header list; repeated names are allowed where HTTP permits them (Set-Cookie).
using Headers = std::vector<std::pair<std::string, std::string>>;

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);

/// First value of a header, case-insensitive.
std::optional<std::string> header_value(const Headers& headers, std::string_view name);
std::vector<std::string> header_values(const Headers& headers, std::string_view name);
/// Replaces every existing header of that name.
void set_header(Headers& headers, std::string_view name, std::string value);

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    Headers headers;
    std::string body;
    bool follow_redirects = true;

    bool operator==(const HttpRequest&) const = default;
};

struct HttpResponse {
    int status = 0;
    Headers headers;
    std::string body;
    double elapsed_ms = 0.0;
    bool truncated = false;

    bool operator==(const HttpResponse&) const = default;
};

struct TransportError {
    std::string message;

    bool operator==(const TransportError&) const = default;
};

/// TLS channel facts gathered from a real handshake plus a follow-up HTTPS response.
struct TlsInfo {
    bool https_available = false;
    std::optional<std::string> protocol_version;
    bool certificate_valid = false;
    bool certificate_host_match = false;
    bool hsts_present = false;

    bool operator==(const TlsInfo&) const = default;
};

/// One request/response pair; the unit of evidence findings point at.
struct HttpTransaction {
    std::uint64_t sequence_no = 0;
    std::string tag;   // which stage issued it: "crawl", "va:V1", "pt:V2", ...
    HttpRequest request;
    std::variant<HttpResponse, TransportError> outcome;
    std::optional<TlsInfo> tls;
    int attempts = 1;

    [[nodiscard]] bool ok() const { return std::holds_alternative<HttpResponse>(outcome); }
    [[nodiscard]] const HttpResponse* response() const { return std::get_if<HttpResponse>(&outcome); }
    [[nodiscard]] const TransportError* error() const { return std::get_if<TransportError>(&outcome); }
    [[nodiscard]] int status() const { return ok() ? response()->status : 0; }
    [[nodiscard]] std::string_view body() const
    {
        return ok() ? std::string_view(response()->body) : std::string_view{};
    }

    bool operator==(const HttpTransaction&) const = default;
};

} // namespace vapt::http
