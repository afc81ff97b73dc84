#include <optional>

#include "common.hpp"
#include "vapt/va/injection.hpp"
#include "vapt/va/points.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::va {

using namespace detail;

std::optional<std::string> sql_error_signature(std::string_view probe_body, std::string_view baseline_body,
                                               const PayloadCatalog& catalog)
{
    for (const auto& sig : catalog.sqli_error_signatures) {
        if (icontains(probe_body, sig) && !icontains(baseline_body, sig))
            return sig;
    }
    return std::nullopt;
}

BooleanOutcome boolean_differential(Prober& prober, const InjectionPoint& point, const SqliPair& pair,
                                    const http::HttpTransaction& base, const PayloadCatalog& catalog,
                                    const std::vector<std::regex>& volatile_patterns, std::string_view marker)
{
    BooleanOutcome out;
    auto value = point.value();
    auto t_payload = catalog.render(pair.true_templ, value, marker);
    auto f_payload = catalog.render(pair.false_templ, value, marker);
    auto t = prober.send(point.request(t_payload));
    auto f = prober.send(point.request(f_payload));
    out.transactions = {t.sequence_no, f.sequence_no};
    if (!t.ok() || !f.ok() || !base.ok())
        return out;
    out.complete = true;
    out.true_vs_base = similarity(t.body(), base.body(), volatile_patterns, {t_payload, value});
    out.false_vs_true = similarity(f.body(), t.body(), volatile_patterns, {t_payload, f_payload, value});
    out.differential =
        out.true_vs_base >= catalog.similarity_threshold && out.false_vs_true < catalog.similarity_threshold;
    return out;
}

double delay_threshold_ms(const std::vector<double>& baseline_ms, const TimeSettings& settings)
{
    return median(baseline_ms) +
           std::max(settings.min_extra_ms, settings.mad_factor * median_absolute_deviation(baseline_ms));
}

DetectorReport detect_injection(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V2;
    Prober prober(*ctx.engine, tag_for(report.cls));
    const auto& catalog = *ctx.catalog;
    auto volatile_patterns = compile_all(catalog.volatile_patterns);

    for (const auto& point : injection_points(surface)) {
        auto value = point.value();
        auto base = prober.send(point.baseline());
        auto base2 = prober.send(point.baseline());
        std::optional<model::Finding> finding;

        for (const auto& p : catalog.sqli_error) {
            auto tx = prober.send(point.request(catalog.render(p.templ, value)));
            if (!tx.ok() || !base.ok())
                continue;
            if (auto sig = sql_error_signature(tx.body(), base.body(), catalog)) {
                finding = suspect(report.cls, point.location(), "SQL injection (error-based)",
                                  {base.sequence_no, tx.sequence_no},
                                  "strategy=error-based: signature '" + *sig + "' appears only with the payload");
                finding->details["strategy"] = "error";
                break;
            }
        }

        if (!finding && base.ok() && base2.ok() &&
            similarity(base.body(), base2.body(), volatile_patterns, {value}) >= catalog.similarity_threshold) {
            for (const auto& pair : catalog.sqli_boolean) {
                auto outcome = boolean_differential(prober, point, pair, base, catalog, volatile_patterns, catalog.marker);
                if (!outcome.differential)
                    continue;
                finding = suspect(report.cls, point.location(), "SQL injection (boolean-based)",
                                  {base.sequence_no, outcome.transactions[0], outcome.transactions[1]},
                                  "strategy=boolean-differential (" + pair.context + "): true~base " +
                                      std::to_string(outcome.true_vs_base) + ", false~true " +
                                      std::to_string(outcome.false_vs_true));
                finding->details["strategy"] = "boolean";
                finding->details["context"] = pair.context;
                break;
            }
        }

        if (!finding && base.ok()) {
            std::vector<double> samples;
            for (const auto* tx : {&base, &base2}) {
                if (tx->ok())
                    samples.push_back(tx->response()->elapsed_ms);
            }
            while (static_cast<int>(samples.size()) < catalog.time.baseline_samples) {
                auto extra = prober.send(point.baseline());
                if (!extra.ok())
                    break;
                samples.push_back(extra.response()->elapsed_ms);
            }
            auto threshold = delay_threshold_ms(samples, catalog.time);
            for (const auto& p : catalog.sqli_time) {
                auto payload = catalog.render(p.templ, value);
                std::vector<std::uint64_t> evidence;
                bool delayed = true;
                for (int r = 0; r < catalog.time.repeats && delayed; ++r) {
                    auto tx = prober.send(point.request(payload));
                    evidence.push_back(tx.sequence_no);
                    delayed = tx.ok() && tx.response()->elapsed_ms >= threshold;
                }
                if (!delayed)
                    continue;
                finding = suspect(report.cls, point.location(), "SQL injection (time-based)", {base.sequence_no},
                                  "strategy=time-based (" + p.context + "): elapsed >= " +
                                      std::to_string(static_cast<long>(threshold)) + " ms on " +
                                      std::to_string(catalog.time.repeats) + " repeats");
                finding->evidence.transactions.insert(finding->evidence.transactions.end(), evidence.begin(),
                                                      evidence.end());
                finding->details["strategy"] = "time";
                finding->details["context"] = p.context;
                break;
            }
        }

        if (finding) {
            point.store(finding->details);
            report.findings.push_back(std::move(*finding));
        } else {
            mark_clean(report, point.location());
        }
    }
    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
