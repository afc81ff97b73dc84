#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vapt/http/types.hpp"
#include "vapt/http/url.hpp"

namespace vapt::http {

struct Cookie {
    std::string name;
    std::string value;
    std::string domain;        // host the cookie is bound to
    std::string path = "/";
    bool secure = false;
    bool http_only = false;
    std::optional<std::string> same_site;   // "Strict", "Lax", "None" as sent

    /// True when the SameSite attribute blocks cross-site POSTs (Lax or Strict).
    [[nodiscard]] bool blocks_cross_site_post() const;
    bool operator==(const Cookie&) const = default;
};

/// Parses one Set-Cookie header value; the request URL supplies default domain/path.
std::optional<Cookie> parse_set_cookie(std::string_view header, const Url& request_url);

/// RFC 6265 path-match.
bool cookie_path_matches(std::string_view cookie_path, std::string_view request_path);

/// Thread-safe per-target cookie store.
class CookieJar {
public:
    CookieJar() = default;
    CookieJar(const CookieJar& other);
    CookieJar& operator=(const CookieJar& other);

    void store(const Url& request_url, const Headers& response_headers);
    void set(Cookie cookie);
    /// Value for a Cookie request header, or empty when nothing applies.
    [[nodiscard]] std::string header_for(const Url& url) const;
    [[nodiscard]] std::vector<Cookie> applicable(const Url& url) const;
    [[nodiscard]] std::vector<Cookie> all() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::vector<Cookie> cookies_;
};

} // namespace vapt::http
