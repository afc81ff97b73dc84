#include <algorithm>
#include <exception>
#include <future>

#include "vapt/error.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::va {

http::HttpTransaction Prober::send(http::HttpRequest request, http::CookieJar* jar, bool use_cookies)
{
    auto options = http::tagged(tag_, jar);
    options.use_cookies = use_cookies;
    ++sent_;
    return engine_.send(std::move(request), options);
}

Detector detector_for(model::VulnCode code)
{
    switch (code) {
    case model::VulnCode::V1: return detect_xss;
    case model::VulnCode::V2: return detect_injection;
    case model::VulnCode::V3: return detect_broken_auth;
    case model::VulnCode::V4: return detect_misconfig;
    case model::VulnCode::V5: return detect_sensitive_data;
    case model::VulnCode::V6: return detect_file_inclusion;
    case model::VulnCode::V7: return detect_csrf;
    case model::VulnCode::V8: return detect_insecure_comm;
    }
    throw Error("unknown vulnerability class");
}

VaResult run_va(const crawl::AttackSurface& surface, const std::vector<model::VulnCode>& classes,
                const ScanContext& ctx)
{
    if (classes.empty())
        throw UsageError("no vulnerability classes selected");
    std::vector<model::VulnCode> selected(classes);
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    std::vector<std::future<DetectorReport>> running;
    for (auto code : selected) {
        running.push_back(std::async(std::launch::async, [&surface, &ctx, code] {
            try {
                return detector_for(code)(surface, ctx);
            } catch (const std::exception& e) {
                DetectorReport failed;
                failed.cls = code;
                failed.failed = true;
                failed.error = e.what();
                return failed;
            }
        }));
    }

    VaResult result;
    std::vector<model::Finding> all;
    for (auto& f : running) {
        result.reports.push_back(f.get());
        const auto& r = result.reports.back();
        all.insert(all.end(), r.findings.begin(), r.findings.end());
    }
    result.findings = model::dedup(std::move(all));
    return result;
}

} // namespace vapt::va
