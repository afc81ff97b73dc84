#include <set>

#include "common.hpp"
#include "vapt/va/checks.hpp"
#include "vapt/http/tls_probe.hpp"
#include "vapt/http/url.hpp"

namespace vapt::va {

using namespace detail;

std::vector<std::pair<std::string, int>> tls_targets(const crawl::AttackSurface& surface)
{
    std::set<std::pair<std::string, int>> out;
    auto add = [&](std::string_view text) {
        if (auto url = http::Url::parse(text); url && url->scheme == "https")
            out.emplace(url->host, url->port);
    };
    for (const auto& s : surface.scope)
        add(s);
    for (const auto& f : surface.forms)
        add(f.action_url);
    for (const auto& p : surface.pages)
        add(p.url);
    for (const auto& o : surface.https_origins)
        add(o);
    if (auto base = http::Url::parse(surface.base_url))
        out.emplace(base->host, 443);
    return {out.begin(), out.end()};
}

DetectorReport detect_insecure_comm(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V8;
    Prober prober(*ctx.engine, tag_for(report.cls));

    for (const auto& form : surface.forms) {
        const auto* password = [&]() -> const crawl::FormInput* {
            for (const auto& i : form.inputs) {
                if (i.kind == "password")
                    return &i;
            }
            return nullptr;
        }();
        if (password == nullptr)
            continue;
        auto action = http::Url::parse(form.action_url);
        if (!action)
            continue;
        model::Location loc{action->without_query(), model::Vector::FormField, password->name};
        if (action->scheme != "http") {
            mark_clean(report, loc);
            continue;
        }
        const auto* page = surface.page(form.page_url);
        auto f = suspect(report.cls, loc, "Credentials sent in cleartext", {},
                         "password field submitted to an http:// action");
        if (page != nullptr)
            f.evidence.transactions.push_back(page->sequence_no);
        f.details["page"] = form.page_url;
        report.findings.push_back(std::move(f));
    }

    for (const auto& [host, port] : tls_targets(surface)) {
        prober.count();
        auto probe = http::tls_probe(prober.engine(), host, port, prober.tag());
        if (!probe.info.https_available)
            continue;
        prober.count();
        http::Url origin;
        origin.scheme = "https";
        origin.host = host;
        origin.port = port;
        origin.path = "/";
        auto url = origin.str();
        auto seq = probe.sequence_no.value_or(0);
        auto add = [&](const char* name, const char* title, std::string note) {
            auto f = suspect(report.cls, {url, model::Vector::Channel, name}, title, {}, std::move(note));
            if (probe.sequence_no)
                f.evidence.transactions.push_back(seq);
            f.details["host"] = host;
            f.details["port"] = std::to_string(port);
            report.findings.push_back(std::move(f));
        };
        if (!probe.info.certificate_valid || !probe.info.certificate_host_match)
            add("certificate", "Untrusted TLS certificate",
                !probe.info.certificate_valid ? "certificate chain does not verify" : "certificate does not match host");
        else
            mark_clean(report, {url, model::Vector::Channel, "certificate"});
        if (!probe.info.hsts_present)
            add("hsts", "HSTS not enforced", "no Strict-Transport-Security header");
        else
            mark_clean(report, {url, model::Vector::Channel, "hsts"});
        if (probe.info.protocol_version && http::is_legacy_protocol(*probe.info.protocol_version))
            add("protocol", "Obsolete TLS protocol", "negotiated " + *probe.info.protocol_version);
        else
            mark_clean(report, {url, model::Vector::Channel, "protocol"});
    }

    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
