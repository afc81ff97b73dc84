#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "vapt/crawl/crawler.hpp"
#include "vapt/http/callback.hpp"
#include "vapt/http/engine.hpp"
#include "vapt/model/finding.hpp"
#include "vapt/va/catalog.hpp"

namespace vapt::va {

/// What a detector (or verifier) needs besides the surface.
struct ScanContext {
    http::HttpEngine* engine = nullptr;
    const PayloadCatalog* catalog = nullptr;
    /// Out-of-band listener for remote-inclusion probes; nullptr disables them.
    http::CallbackSink* callbacks = nullptr;
    /// Lets the verifier replay state-changing requests (CSRF confirmation).
    bool allow_state_change = false;
};

struct DetectorReport {
    model::VulnCode cls = model::VulnCode::V1;
    std::vector<model::Finding> findings;
    int probes_sent = 0;
    /// Locations probed and judged clean; each counts as one negative point.
    std::vector<model::Location> clean_locations;
    int negative_probe_points = 0;
    bool failed = false;
    std::string error;
};

/// Counts and tags every request a detector issues.
class Prober {
public:
    Prober(http::HttpEngine& engine, std::string tag) : engine_(engine), tag_(std::move(tag)) {}

    http::HttpTransaction send(http::HttpRequest request, http::CookieJar* jar = nullptr, bool use_cookies = true);
    [[nodiscard]] int sent() const { return sent_; }
    [[nodiscard]] http::HttpEngine& engine() { return engine_; }
    [[nodiscard]] const std::string& tag() const { return tag_; }
    void count(int n = 1) { sent_ += n; }

private:
    http::HttpEngine& engine_;
    std::string tag_;
    std::atomic<int> sent_{0};
};

DetectorReport detect_xss(const crawl::AttackSurface& surface, const ScanContext& ctx);             // V1
DetectorReport detect_injection(const crawl::AttackSurface& surface, const ScanContext& ctx);       // V2
DetectorReport detect_broken_auth(const crawl::AttackSurface& surface, const ScanContext& ctx);     // V3
DetectorReport detect_misconfig(const crawl::AttackSurface& surface, const ScanContext& ctx);       // V4
DetectorReport detect_sensitive_data(const crawl::AttackSurface& surface, const ScanContext& ctx);  // V5
DetectorReport detect_file_inclusion(const crawl::AttackSurface& surface, const ScanContext& ctx);  // V6
DetectorReport detect_csrf(const crawl::AttackSurface& surface, const ScanContext& ctx);            // V7
DetectorReport detect_insecure_comm(const crawl::AttackSurface& surface, const ScanContext& ctx);   // V8

using Detector = DetectorReport (*)(const crawl::AttackSurface&, const ScanContext&);
Detector detector_for(model::VulnCode code);

struct VaResult {
    std::vector<DetectorReport> reports;   // one per selected class, in class order
    std::vector<model::Finding> findings;  // deduped union
};

/// Runs exactly the selected detectors, concurrently. A detector that throws gets a
/// report marked failed; the others still complete. Throws UsageError when classes is empty.
VaResult run_va(const crawl::AttackSurface& surface, const std::vector<model::VulnCode>& classes,
                const ScanContext& ctx);

} // namespace vapt::va
