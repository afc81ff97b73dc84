#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vapt/crawl/forms.hpp"
#include "vapt/http/cookies.hpp"
#include "vapt/http/engine.hpp"

namespace vapt::crawl {

struct Credentials {
    std::string login_url;
    std::string username;
    std::string password;
    std::string username_field = "username";
    std::string password_field = "password";
};

struct Target {
    std::string base_url;
    std::vector<std::string> scope;   // URL prefixes; empty means the base URL's origin
    std::optional<Credentials> auth;
    int max_depth = 3;
    int max_pages = 500;

    /// Scope with the default applied.
    [[nodiscard]] std::vector<std::string> effective_scope() const;
    /// Throws UsageError when base_url is malformed or out of scope, or a bound is < 1.
    void validate() const;
};

struct Page {
    std::string url;
    int status = 0;
    int depth = 0;
    std::uint64_t sequence_no = 0;   // crawl transaction that fetched it
    http::Headers headers;
    std::string body;

    [[nodiscard]] bool is_html() const;
};

struct Unreachable {
    std::string url;
    std::string reason;

    bool operator==(const Unreachable&) const = default;
};

struct AttackSurface {
    std::string base_url;
    std::vector<std::string> scope;
    std::vector<Page> pages;                                  // sorted by canonical URL
    std::vector<FormDescriptor> forms;
    std::map<std::string, std::set<std::string>> query_params;   // URL without query -> names
    std::map<std::string, http::QueryParams> query_samples;      // URL without query -> first seen query
    std::vector<http::Cookie> cookies;                        // unique by name+path
    std::vector<Unreachable> unreachable;
    std::vector<std::string> warnings;
    /// https origins on the base host that were linked but fall outside the scope.
    std::set<std::string> https_origins;

    [[nodiscard]] bool empty() const { return pages.empty(); }
    [[nodiscard]] const Page* page(std::string_view url) const;
};

/// True iff url, once canonicalized, starts with one of the canonical scope prefixes at a
/// path-segment boundary.
bool in_scope(std::string_view url, const std::vector<std::string>& scope);
bool in_scope(std::string_view url, const Target& target);

/// Breadth-first crawl of the target through engine (tagged "crawl").
///
/// Seeds are the base URL, every scope prefix and the paths named in robots.txt.
/// Redirects are not followed; their targets are queued as links one level deeper.
/// Each level is fetched in canonical-URL order, so the page budget and the resulting
/// surface are deterministic.
AttackSurface crawl(const Target& target, http::HttpEngine& engine);

} // namespace vapt::crawl
