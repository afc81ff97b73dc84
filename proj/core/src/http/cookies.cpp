#include "vapt/http/cookies.hpp"

#include <algorithm>

namespace vapt::http {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

std::string default_path(const Url& url)
{
    auto slash = url.path.rfind('/');
    if (slash == std::string::npos || slash == 0)
        return "/";
    return url.path.substr(0, slash);
}

bool domain_matches(std::string_view cookie_domain, std::string_view host)
{
    if (iequals(cookie_domain, host))
        return true;
    if (host.size() > cookie_domain.size() && host.ends_with(cookie_domain))
        return host[host.size() - cookie_domain.size() - 1] == '.';
    return false;
}

} // namespace

bool Cookie::blocks_cross_site_post() const
{
    return same_site && (iequals(*same_site, "lax") || iequals(*same_site, "strict"));
}

std::optional<Cookie> parse_set_cookie(std::string_view header, const Url& request_url)
{
    Cookie cookie;
    bool first = true;
    bool has_path = false;
    while (!header.empty()) {
        auto semi = header.find(';');
        std::string_view part = trim(header.substr(0, semi));
        header = semi == std::string_view::npos ? std::string_view{} : header.substr(semi + 1);
        auto eq = part.find('=');
        std::string_view key = trim(part.substr(0, eq));
        std::string_view value = eq == std::string_view::npos ? std::string_view{} : trim(part.substr(eq + 1));
        if (first) {
            if (eq == std::string_view::npos || key.empty())
                return std::nullopt;
            cookie.name = std::string(key);
            cookie.value = std::string(value);
            first = false;
            continue;
        }
        if (iequals(key, "path") && !value.empty() && value.front() == '/') {
            cookie.path = std::string(value);
            has_path = true;
        }
        else if (iequals(key, "domain") && !value.empty())
            cookie.domain = to_lower(value.front() == '.' ? value.substr(1) : value);
        else if (iequals(key, "secure"))
            cookie.secure = true;
        else if (iequals(key, "httponly"))
            cookie.http_only = true;
        else if (iequals(key, "samesite"))
            cookie.same_site = std::string(value);
    }
    if (first)
        return std::nullopt;
    if (cookie.domain.empty())
        cookie.domain = request_url.host;
    if (!has_path)
        cookie.path = default_path(request_url);
    return cookie;
}

bool cookie_path_matches(std::string_view cookie_path, std::string_view request_path)
{
    if (cookie_path == request_path)
        return true;
    if (!request_path.starts_with(cookie_path))
        return false;
    return cookie_path.ends_with('/') || request_path[cookie_path.size()] == '/';
}

CookieJar::CookieJar(const CookieJar& other)
{
    std::lock_guard lock(other.mutex_);
    cookies_ = other.cookies_;
}

CookieJar& CookieJar::operator=(const CookieJar& other)
{
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        cookies_ = other.cookies_;
    }
    return *this;
}

void CookieJar::store(const Url& request_url, const Headers& response_headers)
{
    for (const auto& value : header_values(response_headers, "Set-Cookie")) {
        if (auto cookie = parse_set_cookie(value, request_url))
            set(std::move(*cookie));
    }
}

void CookieJar::set(Cookie cookie)
{
    std::lock_guard lock(mutex_);
    auto it = std::find_if(cookies_.begin(), cookies_.end(), [&](const Cookie& c) {
        return c.name == cookie.name && c.path == cookie.path && c.domain == cookie.domain;
    });
    if (it != cookies_.end())
        *it = std::move(cookie);
    else
        cookies_.push_back(std::move(cookie));
}

std::vector<Cookie> CookieJar::applicable(const Url& url) const
{
    std::lock_guard lock(mutex_);
    std::vector<Cookie> out;
    for (const auto& c : cookies_) {
        if (!domain_matches(c.domain, url.host))
            continue;
        if (!cookie_path_matches(c.path, url.path))
            continue;
        if (c.secure && url.scheme != "https")
            continue;
        out.push_back(c);
    }
    // Longer paths first, per RFC 6265 section 5.4.
    std::stable_sort(out.begin(), out.end(),
                     [](const Cookie& a, const Cookie& b) { return a.path.size() > b.path.size(); });
    return out;
}

std::string CookieJar::header_for(const Url& url) const
{
    std::string out;
    for (const auto& c : applicable(url)) {
        if (!out.empty())
            out += "; ";
        out += c.name + "=" + c.value;
    }
    return out;
}

std::vector<Cookie> CookieJar::all() const
{
    std::lock_guard lock(mutex_);
    return cookies_;
}

void CookieJar::clear()
{
    std::lock_guard lock(mutex_);
    cookies_.clear();
}

} // namespace vapt::http
