#include "common.hpp"
#include "vapt/va/checks.hpp"
#include "vapt/http/url.hpp"

namespace vapt::va {

using namespace detail;

std::vector<http::Cookie> unprotected_cookies(const crawl::AttackSurface& surface, const std::string& action_url)
{
    std::vector<http::Cookie> out;
    auto url = http::Url::parse(action_url);
    if (!url)
        return out;
    for (const auto& c : surface.cookies) {
        if (!http::iequals(c.domain, url->host) || !http::cookie_path_matches(c.path, url->path))
            continue;
        if (!c.blocks_cross_site_post())
            out.push_back(c);
    }
    return out;
}

DetectorReport detect_csrf(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V7;
    Prober prober(*ctx.engine, tag_for(report.cls));

    for (const auto& form : surface.forms) {
        if (!form.state_changing)
            continue;
        model::Location loc{http::location_key(form.action_url), model::Vector::Form, "csrf"};
        if (form.has_token_like_field) {
            mark_clean(report, loc);
            continue;
        }
        auto cookies = unprotected_cookies(surface, form.action_url);
        if (cookies.empty()) {
            mark_clean(report, loc);
            continue;
        }
        const auto* page = surface.page(form.page_url);
        std::string names;
        for (const auto& c : cookies)
            names += (names.empty() ? "" : ", ") + c.name;
        auto f = suspect(report.cls, loc, "Cross-site request forgery", {},
                         "state-changing form without token; cookies without SameSite protection: " + names);
        if (page != nullptr)
            f.evidence.transactions.push_back(page->sequence_no);
        f.details["page"] = form.page_url;
        f.details["method"] = form.method;
        http::QueryParams fields;
        for (const auto& input : form.inputs)
            fields.emplace_back(input.name, input.value);
        f.details["fields"] = http::build_query(fields);
        report.findings.push_back(std::move(f));
    }

    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
