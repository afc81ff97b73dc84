#include "vapt/crawl/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "vapt/crawl/html.hpp"
#include "vapt/error.hpp"
#include "vapt/http/url.hpp"

namespace vapt::crawl {

namespace {

constexpr const char* kTag = "crawl";

struct Pending {
    std::string url;
    int depth = 0;
};

std::string scope_prefix(std::string_view prefix)
{
    auto canonical = http::canonicalize(prefix);
    return canonical.value_or(std::string(prefix));
}

bool prefix_matches(const std::string& url, const std::string& prefix)
{
    if (url.compare(0, prefix.size(), prefix) != 0)
        return false;
    if (url.size() == prefix.size() || prefix.back() == '/')
        return true;
    char next = url[prefix.size()];
    return next == '/' || next == '?';
}

std::vector<std::string> robots_paths(std::string_view body)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(body)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto colon = line.find(':');
        if (colon == std::string::npos)
            continue;
        auto key = http::to_lower(line.substr(0, colon));
        std::string value = line.substr(colon + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t\r") + 1);
        if (value.empty() || value.find('*') != std::string::npos)
            continue;
        if (key == "allow" || key == "disallow" || key == "sitemap")
            out.push_back(value);
    }
    return out;
}

void fetch_level(http::HttpEngine& engine, const std::vector<Pending>& level, std::vector<http::HttpTransaction>& out)
{
    out.assign(level.size(), {});
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < level.size(); i = next++) {
            http::HttpRequest req;
            req.url = level[i].url;
            req.follow_redirects = false;
            out[i] = engine.send(req, http::tagged(kTag));
        }
    };
    auto threads = std::min<std::size_t>(level.size(), static_cast<std::size_t>(engine.policy().max_concurrent));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
}

void login(const Target& target, http::HttpEngine& engine, AttackSurface& surface)
{
    const auto& auth = *target.auth;
    http::HttpRequest req;
    req.method = "POST";
    req.url = auth.login_url;
    req.body = http::build_query({{auth.username_field, auth.username}, {auth.password_field, auth.password}});
    req.headers.emplace_back("Content-Type", "application/x-www-form-urlencoded");
    auto tx = engine.send(req, http::tagged(kTag));
    if (!tx.ok())
        surface.warnings.push_back("login failed: " + tx.error()->message);
    else if (tx.status() >= 400)
        surface.warnings.push_back("login rejected with status " + std::to_string(tx.status()));
}

} // namespace

std::vector<std::string> Target::effective_scope() const
{
    if (!scope.empty())
        return scope;
    auto url = http::Url::parse(base_url);
    if (!url)
        return {};
    return {url->origin() + "/"};
}

void Target::validate() const
{
    if (!http::Url::parse(base_url))
        throw UsageError("target base URL is not an absolute http(s) URL: " + base_url);
    if (!in_scope(base_url, *this))
        throw UsageError("target base URL is outside its own scope: " + base_url);
    if (max_depth < 1 || max_pages < 1)
        throw UsageError("max_depth and max_pages must be at least 1");
}

bool Page::is_html() const
{
    auto type = http::header_value(headers, "Content-Type");
    if (type)
        return http::to_lower(*type).find("html") != std::string::npos;
    return body.find('<') != std::string::npos;
}

const Page* AttackSurface::page(std::string_view url) const
{
    auto key = http::canonicalize(url);
    if (!key)
        return nullptr;
    for (const auto& p : pages) {
        if (http::canonicalize(p.url) == key)
            return &p;
    }
    return nullptr;
}

bool in_scope(std::string_view url, const std::vector<std::string>& scope)
{
    auto canonical = http::canonicalize(url);
    if (!canonical)
        return false;
    return std::any_of(scope.begin(), scope.end(),
                       [&](const std::string& prefix) { return prefix_matches(*canonical, scope_prefix(prefix)); });
}

bool in_scope(std::string_view url, const Target& target) { return in_scope(url, target.effective_scope()); }

AttackSurface crawl(const Target& target, http::HttpEngine& engine)
{
    AttackSurface surface;
    surface.base_url = target.base_url;
    surface.scope = target.effective_scope();

    auto base = http::Url::parse(target.base_url);
    if (!base) {
        surface.unreachable.push_back({target.base_url, "invalid URL"});
        return surface;
    }

    if (target.auth)
        login(target, engine, surface);

    std::set<std::string> seen;   // canonical URLs already queued
    std::vector<Pending> frontier;
    auto note_https = [&](const http::Url& url) {
        if (url.scheme == "https" && url.host == base->host)
            surface.https_origins.insert(url.origin() + "/");
    };
    auto enqueue = [&](const std::string& url, int depth) {
        if (depth > target.max_depth || !in_scope(url, surface.scope)) {
            if (auto parsed = http::Url::parse(url))
                note_https(*parsed);
            return;
        }
        auto key = http::canonicalize(url);
        if (key && seen.insert(*key).second)
            frontier.push_back({url, depth});
    };

    enqueue(base->str(), 0);
    for (const auto& prefix : surface.scope)
        enqueue(prefix, 0);

    http::HttpRequest robots_req;
    robots_req.url = base->origin() + "/robots.txt";
    robots_req.follow_redirects = false;
    auto robots = engine.send(robots_req, http::tagged(kTag));
    if (robots.ok() && robots.status() == 200) {
        for (const auto& path : robots_paths(robots.body())) {
            if (auto resolved = base->resolve(path))
                enqueue(resolved->str(), 1);
        }
    } else if (!robots.ok()) {
        surface.unreachable.push_back({base->str(), robots.error()->message});
        return surface;
    }

    int depth = 0;
    std::vector<Pending> level;
    while (!frontier.empty() && static_cast<int>(surface.pages.size()) < target.max_pages) {
        // Take every queued URL at the shallowest depth, in canonical order.
        std::sort(frontier.begin(), frontier.end(), [](const Pending& a, const Pending& b) {
            if (a.depth != b.depth)
                return a.depth < b.depth;
            return http::canonicalize(a.url) < http::canonicalize(b.url);
        });
        depth = frontier.front().depth;
        auto split = std::find_if(frontier.begin(), frontier.end(), [&](const Pending& p) { return p.depth != depth; });
        level.assign(frontier.begin(), split);
        frontier.erase(frontier.begin(), split);
        auto budget = static_cast<std::size_t>(target.max_pages) - surface.pages.size();
        if (level.size() > budget)
            level.resize(budget);

        std::vector<http::HttpTransaction> results;
        fetch_level(engine, level, results);

        for (std::size_t i = 0; i < level.size(); ++i) {
            const auto& tx = results[i];
            if (!tx.ok()) {
                surface.unreachable.push_back({level[i].url, tx.error()->message});
                continue;
            }
            const auto& res = *tx.response();
            Page page{level[i].url, res.status, depth, tx.sequence_no, res.headers, res.body};
            auto url = http::Url::parse(page.url);

            if (res.status >= 300 && res.status < 400) {
                if (auto loc = http::header_value(res.headers, "Location"); loc && url) {
                    if (auto next = url->resolve(*loc))
                        enqueue(next->str(), depth + 1);
                }
            }
            if (page.is_html() && url) {
                for (const auto& ref : link_references(page.body)) {
                    if (auto next = url->resolve(ref))
                        enqueue(next->str(), depth + 1);
                }
                for (auto& form : extract_forms(page.body, page.url)) {
                    if (in_scope(form.action_url, surface.scope))
                        surface.forms.push_back(std::move(form));
                    else if (auto action = http::Url::parse(form.action_url))
                        note_https(*action);
                }
            }
            if (url && url->has_query && !url->query.empty()) {
                auto key = url->without_query();
                auto params = http::parse_query(url->query);
                for (const auto& [name, value] : params)
                    surface.query_params[key].insert(name);
                surface.query_samples.emplace(key, params);
            }
            surface.pages.push_back(std::move(page));
        }
    }

    std::sort(surface.pages.begin(), surface.pages.end(),
              [](const Page& a, const Page& b) { return http::canonicalize(a.url) < http::canonicalize(b.url); });
    std::stable_sort(surface.forms.begin(), surface.forms.end(), [](const FormDescriptor& a, const FormDescriptor& b) {
        return std::tie(a.action_url, a.method, a.page_url) < std::tie(b.action_url, b.method, b.page_url);
    });
    surface.forms.erase(std::unique(surface.forms.begin(), surface.forms.end(),
                                    [](const FormDescriptor& a, const FormDescriptor& b) {
                                        return a.action_url == b.action_url && a.method == b.method &&
                                               a.inputs == b.inputs;
                                    }),
                        surface.forms.end());

    for (const auto& cookie : engine.cookies().all()) {
        bool dup = std::any_of(surface.cookies.begin(), surface.cookies.end(), [&](const http::Cookie& c) {
            return c.name == cookie.name && c.path == cookie.path;
        });
        if (!dup)
            surface.cookies.push_back(cookie);
    }
    std::sort(surface.cookies.begin(), surface.cookies.end(), [](const http::Cookie& a, const http::Cookie& b) {
        return std::tie(a.name, a.path) < std::tie(b.name, b.path);
    });
    if (surface.pages.empty() && surface.unreachable.empty())
        surface.unreachable.push_back({base->str(), "no in-scope page could be fetched"});
    return surface;
}

} // namespace vapt::crawl
