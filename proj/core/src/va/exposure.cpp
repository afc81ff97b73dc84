#include <regex>
#include <set>

#include "common.hpp"
#include "vapt/http/url.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::va {

using namespace detail;

namespace {

// Last path segment has an extension, so a backup copy is plausible.
bool file_like(const http::Url& url)
{
    auto slash = url.path.rfind('/');
    auto segment = url.path.substr(slash + 1);
    auto dot = segment.rfind('.');
    return dot != std::string::npos && dot > 0 && dot + 1 < segment.size();
}

} // namespace

DetectorReport detect_sensitive_data(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V5;
    Prober prober(*ctx.engine, tag_for(report.cls));
    const auto& catalog = *ctx.catalog;
    std::regex card(catalog.card_pattern);
    std::regex key(catalog.private_key_pattern);
    std::regex ip(catalog.internal_ip_pattern);
    auto stack_traces = catalog.stack_trace_signatures;

    for (const auto& page : surface.pages) {
        if (page.status != 200)
            continue;
        auto url = http::location_key(page.url);
        auto add = [&](const char* kind, const char* title, std::string note) {
            auto f = suspect(report.cls, {url, model::Vector::Body, kind}, title, {page.sequence_no}, std::move(note));
            f.details["check"] = kind;
            f.details["page"] = page.url;
            report.findings.push_back(std::move(f));
        };
        auto cards = card_numbers(page.body, card);
        if (!cards.empty())
            add("card-number", "Payment card number exposed", "checksum-valid card number in body");
        else
            mark_clean(report, {url, model::Vector::Body, "card-number"});
        if (std::regex_search(page.body, key))
            add("private-key", "Private key exposed", "PEM private key header in body");
        if (std::smatch m; std::regex_search(page.body, m, ip))
            add("internal-ip", "Internal address disclosed", "internal address " + m.str(1));
        if (contains_any(page.body, stack_traces))
            add("stack-trace", "Stack trace disclosed", "stack trace in a normal page");
    }

    std::set<std::string> probed;
    for (const auto& page : surface.pages) {
        auto url = http::Url::parse(page.url);
        if (!url || page.status != 200 || !file_like(*url))
            continue;
        auto base = url->without_query();
        if (!probed.insert(base).second)
            continue;
        bool found = false;
        for (const auto& suffix : catalog.backup_suffixes) {
            http::HttpRequest req;
            req.url = base + suffix;
            req.follow_redirects = false;
            if (!crawl::in_scope(req.url, surface.scope))
                continue;
            auto tx = prober.send(req);
            if (tx.status() != 200 || !contains_any(tx.body(), catalog.source_signatures))
                continue;
            auto f = suspect(report.cls, {req.url, model::Vector::Path, "backup"}, "Backup file exposed",
                             {tx.sequence_no}, "backup copy of " + base + " served");
            f.details["check"] = "backup";
            f.details["original"] = base;
            report.findings.push_back(std::move(f));
            found = true;
            break;
        }
        if (!found)
            mark_clean(report, {base, model::Vector::Path, "backup"});
    }

    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
