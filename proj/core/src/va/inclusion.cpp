#include <algorithm>
#include <chrono>
#include <regex>

#include "common.hpp"
#include "vapt/va/points.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::va {

using namespace detail;

DetectorReport detect_file_inclusion(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V6;
    Prober prober(*ctx.engine, tag_for(report.cls));
    const auto& catalog = *ctx.catalog;
    std::regex marker(catalog.lfi_marker_pattern);

    struct Pending {
        InjectionPoint point;
        std::string token;
        std::uint64_t sequence_no = 0;
    };
    std::vector<Pending> pending;
    std::vector<InjectionPoint> unresolved;
    int counter = 0;

    for (const auto& point : injection_points(surface)) {
        auto value = point.value();
        auto base = prober.send(point.baseline());
        bool found = false;
        for (const auto& t : catalog.lfi_traversal) {
            auto tx = prober.send(point.request(catalog.render(t.templ, value)));
            if (!tx.ok() || !base.ok())
                continue;
            std::string body(tx.body());
            std::string base_body(base.body());
            if (!std::regex_search(body, marker) || std::regex_search(base_body, marker))
                continue;
            auto f = suspect(report.cls, point.location(), "Local file inclusion", {base.sequence_no, tx.sequence_no},
                             "payload '" + t.name + "' returned passwd-style content");
            point.store(f.details);
            f.details["technique"] = t.name;
            report.findings.push_back(std::move(f));
            found = true;
            break;
        }
        if (found)
            continue;
        if (ctx.callbacks != nullptr) {
            auto n = ++counter;
            auto payload = catalog.render(catalog.lfi_remote.templ, value, {}, ctx.callbacks->base_url(), n);
            auto tx = prober.send(point.request(payload));
            pending.push_back({point, catalog.marker + "-" + std::to_string(n), tx.sequence_no});
        } else {
            mark_clean(report, point.location());
        }
    }

    // Remote fetches can lag the response; give them one grace period in total.
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(catalog.callback_grace_ms);
    for (const auto& p : pending) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (ctx.callbacks->wait_for(p.token, std::max(left, std::chrono::milliseconds(0)))) {
            auto f = suspect(report.cls, p.point.location(), "Remote file inclusion", {p.sequence_no},
                             "target fetched callback token " + p.token);
            p.point.store(f.details);
            f.details["technique"] = "remote";
            f.details["token"] = p.token;
            report.findings.push_back(std::move(f));
        } else {
            mark_clean(report, p.point.location());
        }
    }

    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
