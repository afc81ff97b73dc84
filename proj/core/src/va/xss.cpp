#include "common.hpp"
#include "vapt/va/points.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::va {

using namespace detail;

DetectorReport detect_xss(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V1;
    Prober prober(*ctx.engine, tag_for(report.cls));
    const auto& catalog = *ctx.catalog;

    for (const auto& point : injection_points(surface)) {
        bool found = false;
        for (const auto& t : catalog.xss) {
            auto channel = std::string(model::to_string(point.vector));
            if (!t.channels.empty() && std::find(t.channels.begin(), t.channels.end(), channel) == t.channels.end())
                continue;
            auto payload = catalog.render(t.templ, point.value());
            auto tx = prober.send(point.request(payload));
            if (!is_html(tx) || !reflected_outside_comment(tx.body(), catalog.render(t.marker)))
                continue;
            auto f = suspect(report.cls, point.location(), "Reflected cross-site scripting", {tx.sequence_no},
                             "payload '" + t.name + "' reflected unencoded outside comments");
            point.store(f.details);
            f.details["template"] = t.name;
            report.findings.push_back(std::move(f));
            found = true;
            break;
        }
        if (!found)
            mark_clean(report, point.location());
    }
    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
