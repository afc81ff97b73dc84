#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vapt::http {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// Absolute http/https URL split into its RFC 3986 components.
struct Url {
    std::string scheme;   // lowercase
    std::string host;     // lowercase
    int port = 0;         // always populated; default port when absent in the text
    std::string path = "/";
    std::string query;    // without '?'
    bool has_query = false;

    [[nodiscard]] static std::optional<Url> parse(std::string_view text);

    [[nodiscard]] int default_port() const { return scheme == "https" ? 443 : 80; }
    [[nodiscard]] std::string authority() const;
    [[nodiscard]] std::string origin() const;   // scheme://host[:port]
    [[nodiscard]] std::string str() const;      // full URL, default port elided, no fragment
    [[nodiscard]] std::string without_query() const;
    [[nodiscard]] std::string path_and_query() const;

    /// Resolves a reference (absolute, scheme-relative, absolute-path or relative) against this URL.
    [[nodiscard]] std::optional<Url> resolve(std::string_view reference) const;

    bool operator==(const Url&) const = default;
};

/// RFC 3986 section 5.2.4.
std::string remove_dot_segments(std::string_view path);

/// Canonical form used for scope checks and dedup: lowercase scheme/host, default port
/// elided, dot-segments resolved, fragment dropped, query keys sorted.
std::string canonicalize(const Url& url);
std::optional<std::string> canonicalize(std::string_view url);

/// Canonical form without the query component; used as a location key.
std::string location_key(std::string_view url);

std::string percent_encode(std::string_view text);   // application/x-www-form-urlencoded
std::string percent_decode(std::string_view text, bool plus_as_space = true);

QueryParams parse_query(std::string_view query);
std::string build_query(const QueryParams& params);

} // namespace vapt::http
