#include <algorithm>

#include "strategies.hpp"
#include "vapt/va/injection.hpp"
#include "vapt/va/points.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::pt::detail {

http::HttpRequest get(const std::string& url, bool follow)
{
    http::HttpRequest req;
    req.url = url;
    req.follow_redirects = follow;
    return req;
}

Outcome verify_xss(const Probe& p)
{
    const auto& catalog = *p.ctx.catalog;
    auto point = va::InjectionPoint::load(p.finding.details, p.finding.location);
    // The template that fired at assessment time goes first.
    auto templates = catalog.xss;
    auto fired = p.detail("template");
    std::stable_partition(templates.begin(), templates.end(), [&](const auto& t) { return t.name == fired; });

    std::vector<std::uint64_t> proof;
    for (int k = 1; k <= p.spec.confirmations; ++k) {
        auto marker = p.marker(k);
        bool live = false;
        for (const auto& t : templates) {
            auto tx = p.prober.send(point.request(catalog.render(t.templ, point.value(), marker)));
            if (!tx.ok())
                return inconclusive({tx.sequence_no}, "transport failure: " + tx.error()->message);
            if (va::executable_reflection(tx.body(), marker)) {
                proof.push_back(tx.sequence_no);
                live = true;
                break;
            }
        }
        if (!live)
            return refuted(proof, "marker " + marker + " never reached an executable context");
    }
    return confirmed(proof, "payload executed in " + std::to_string(p.spec.confirmations) +
                                " independent injections (event-handler attribute)");
}

namespace {

Outcome boolean_check(const Probe& p, const va::InjectionPoint& point, const http::HttpTransaction& base,
                      const std::vector<std::string>& contexts, const std::vector<std::regex>& volatile_patterns)
{
    const auto& catalog = *p.ctx.catalog;
    // Each context needs agreeing pairs from the primary and the confirming family.
    for (const auto& context : contexts) {
        std::vector<std::uint64_t> proof{base.sequence_no};
        int agreeing = 0;
        bool complete = true;
        int k = 0;
        for (const auto* family : {&catalog.sqli_boolean, &catalog.sqli_confirm}) {
            for (const auto& pair : *family) {
                if (pair.context != context || agreeing >= p.spec.independent_pairs)
                    continue;
                auto outcome = va::boolean_differential(p.prober, point, pair, base, catalog, volatile_patterns,
                                                        p.marker(++k));
                complete = complete && outcome.complete;
                if (!outcome.differential)
                    break;
                proof.insert(proof.end(), outcome.transactions.begin(), outcome.transactions.end());
                ++agreeing;
            }
        }
        if (agreeing >= p.spec.independent_pairs)
            return confirmed(proof, "boolean differential held for " + std::to_string(agreeing) +
                                        " independent pairs (" + context + " context)");
        if (!complete)
            return inconclusive(proof, "boolean probes did not all get a response");
    }
    return refuted({base.sequence_no}, "TRUE and FALSE conditions do not change the response as expected");
}

Outcome time_check(const Probe& p, const va::InjectionPoint& point, const std::string& context)
{
    const auto& catalog = *p.ctx.catalog;
    std::vector<double> samples;
    std::vector<std::uint64_t> proof;
    for (int i = 0; i < catalog.time.baseline_samples; ++i) {
        auto tx = p.prober.send(point.baseline());
        if (!tx.ok())
            return inconclusive({tx.sequence_no}, "transport failure during timing baseline");
        samples.push_back(tx.response()->elapsed_ms);
    }
    auto threshold = va::delay_threshold_ms(samples, catalog.time);
    auto control_catalog = catalog;
    control_catalog.time.delay_seconds = 0;
    for (const auto& t : catalog.sqli_time) {
        if (!context.empty() && t.context != context)
            continue;
        int delayed = 0;
        for (int r = 0; r < p.spec.time_repeats; ++r) {
            auto tx = p.prober.send(point.request(catalog.render(t.templ, point.value(), p.marker(r + 1))));
            if (!tx.ok())
                return inconclusive({tx.sequence_no}, "transport failure during delay probe");
            if (tx.response()->elapsed_ms < threshold)
                break;
            proof.push_back(tx.sequence_no);
            ++delayed;
        }
        if (delayed < p.spec.time_repeats)
            continue;
        auto control = p.prober.send(point.request(control_catalog.render(t.templ, point.value(), p.marker(9))));
        if (!control.ok())
            return inconclusive({control.sequence_no}, "transport failure during zero-delay control");
        if (control.response()->elapsed_ms >= threshold)
            return refuted({control.sequence_no}, "zero-delay control was slow too; latency is not payload-driven");
        proof.push_back(control.sequence_no);
        return confirmed(proof, "delay reproduced " + std::to_string(delayed) + " times above " +
                                    std::to_string(static_cast<long>(threshold)) + " ms; zero-delay control fast");
    }
    return refuted(proof, "injected delay did not reproduce");
}

} // namespace

Outcome verify_injection(const Probe& p)
{
    const auto& catalog = *p.ctx.catalog;
    auto point = va::InjectionPoint::load(p.finding.details, p.finding.location);
    auto volatile_patterns = va::compile_all(catalog.volatile_patterns);
    auto strategy = p.detail("strategy");
    auto context = p.detail("context");

    if (strategy == "time")
        return time_check(p, point, context);

    auto base = p.prober.send(point.baseline());
    if (!base.ok())
        return inconclusive({base.sequence_no}, "transport failure on baseline");
    std::vector<std::string> contexts;
    if (!context.empty())
        contexts.push_back(context);
    else
        contexts = {"numeric", "string"};
    return boolean_check(p, point, base, contexts, volatile_patterns);
}

} // namespace vapt::pt::detail
