#include <cctype>
#include <set>

#include "common.hpp"
#include "vapt/crawl/crawler.hpp"
#include "vapt/va/checks.hpp"
#include "vapt/va/points.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::va {

using namespace detail;

std::vector<std::string> missing_headers(const http::Headers& headers, const PayloadCatalog& catalog)
{
    std::vector<std::string> missing;
    for (const auto& name : catalog.required_headers) {
        if (!http::header_value(headers, name))
            missing.push_back(name);
    }
    return missing;
}

std::vector<std::string> dangerous_methods(const http::Headers& headers, const PayloadCatalog& catalog)
{
    std::vector<std::string> found;
    std::string allow;
    for (const char* name : {"Allow", "Public"}) {
        for (const auto& v : http::header_values(headers, name))
            allow += "," + v;
    }
    std::set<std::string> methods;
    std::string current;
    for (char c : allow + ",") {
        if (c == ',' || c == ' ') {
            if (!current.empty())
                methods.insert(current);
            current.clear();
        } else {
            current += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    for (const auto& m : catalog.dangerous_methods) {
        if (methods.count(m) != 0)
            found.push_back(m);
    }
    return found;
}

std::vector<std::string> directories_of(const crawl::AttackSurface& surface)
{
    std::set<std::string> dirs;
    for (const auto& page : surface.pages) {
        auto url = http::Url::parse(page.url);
        if (!url)
            continue;
        auto path = url->path;
        for (auto slash = path.rfind('/'); slash != std::string::npos; slash = path.rfind('/', slash - 1)) {
            http::Url dir = *url;
            dir.path = path.substr(0, slash + 1);
            dir.query.clear();
            dir.has_query = false;
            if (crawl::in_scope(dir.str(), surface.scope))
                dirs.insert(dir.str());
            if (slash == 0)
                break;
        }
    }
    return {dirs.begin(), dirs.end()};
}

DetectorReport detect_misconfig(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V4;
    Prober prober(*ctx.engine, tag_for(report.cls));
    const auto& catalog = *ctx.catalog;
    auto note_list = [](const std::vector<std::string>& items) {
        std::string out;
        for (const auto& i : items)
            out += (out.empty() ? "" : ", ") + i;
        return out;
    };

    std::set<std::string> crawled;
    for (const auto& page : surface.pages) {
        auto key = http::location_key(page.url);
        crawled.insert(key);
        if (page.status != 200 || !page.is_html())
            continue;

        model::Location headers_loc{key, model::Vector::Header, "security-headers"};
        if (auto missing = missing_headers(page.headers, catalog); !missing.empty()) {
            auto f = suspect(report.cls, headers_loc, "Missing security headers", {page.sequence_no},
                             "missing: " + note_list(missing));
            f.details["check"] = "security-headers";
            f.details["page"] = page.url;
            report.findings.push_back(std::move(f));
        } else {
            mark_clean(report, headers_loc);
        }

        model::Location listing_loc{key, model::Vector::Path, "directory-listing"};
        if (contains_any(page.body, catalog.listing_signatures)) {
            auto f = suspect(report.cls, listing_loc, "Directory listing enabled", {page.sequence_no},
                             "listing signature in page body");
            f.details["check"] = "directory-listing";
            f.details["page"] = page.url;
            report.findings.push_back(std::move(f));
        }
    }

    auto dirs = directories_of(surface);
    for (const auto& dir : dirs) {
        if (crawled.count(http::location_key(dir)) != 0)
            continue;
        http::HttpRequest req;
        req.url = dir;
        req.follow_redirects = false;
        auto tx = prober.send(req);
        model::Location loc{dir, model::Vector::Path, "directory-listing"};
        if (tx.status() == 200 && contains_any(tx.body(), catalog.listing_signatures)) {
            auto f = suspect(report.cls, loc, "Directory listing enabled", {tx.sequence_no}, "listing signature");
            f.details["check"] = "directory-listing";
            f.details["page"] = dir;
            report.findings.push_back(std::move(f));
        } else {
            mark_clean(report, loc);
        }
    }

    for (const auto& point : injection_points(surface)) {
        auto base = prober.send(point.baseline());
        bool found = false;
        for (const auto& crafted : catalog.crafted_values) {
            auto tx = prober.send(point.request(catalog.render(crafted, point.value())));
            if (tx.status() < 500 || !contains_any(tx.body(), catalog.stack_trace_signatures) ||
                contains_any(base.body(), catalog.stack_trace_signatures))
                continue;
            auto f = suspect(report.cls, point.location(), "Verbose error with stack trace",
                             {base.sequence_no, tx.sequence_no}, "crafted value produced a stack trace");
            point.store(f.details);
            f.details["check"] = "stack-trace";
            f.details["crafted"] = crafted;
            report.findings.push_back(std::move(f));
            found = true;
            break;
        }
        if (!found)
            mark_clean(report, point.location());
    }

    for (const auto& page : surface.pages) {
        if (page.status >= 400)
            continue;
        http::HttpRequest req;
        req.method = "OPTIONS";
        req.url = page.url;
        req.follow_redirects = false;
        auto tx = prober.send(req);
        model::Location loc{http::location_key(page.url), model::Vector::Header, "Allow"};
        if (!tx.ok())
            continue;
        if (auto methods = dangerous_methods(tx.response()->headers, catalog); !methods.empty()) {
            auto f = suspect(report.cls, loc, "Dangerous HTTP methods enabled", {tx.sequence_no},
                             "OPTIONS advertises " + note_list(methods));
            f.details["check"] = "methods";
            f.details["page"] = page.url;
            report.findings.push_back(std::move(f));
        } else {
            mark_clean(report, loc);
        }
    }

    for (const auto& dir : dirs) {
        for (const auto& entry : catalog.default_paths) {
            auto url = dir + entry.path;
            if (!crawl::in_scope(url, surface.scope))
                continue;
            http::HttpRequest req;
            req.url = url;
            req.follow_redirects = false;
            auto tx = prober.send(req);
            if (tx.status() == 200 && icontains(tx.body(), entry.signature)) {
                auto f = suspect(report.cls, {url, model::Vector::Path, entry.path}, "Default resource exposed",
                                 {tx.sequence_no}, "signature '" + entry.signature + "' at " + url);
                f.details["check"] = "default-path";
                f.details["signature"] = entry.signature;
                report.findings.push_back(std::move(f));
            }
        }
    }

    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
