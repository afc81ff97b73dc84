#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace vapt::http {

/// Politeness and robustness knobs for every request a scan issues.
///
/// The defaults form the reproducible "default scanning settings" profile and are
/// echoed into every report.
struct RequestPolicy {
    int max_concurrent = 8;
    std::chrono::milliseconds min_delay{0};   // per host, between request starts
    std::chrono::milliseconds timeout{10'000};
    int max_retries = 1;
    std::string user_agent = "vapt-scanner/1.0";
    int max_redirects = 5;
    std::size_t max_body_bytes = 2 * 1024 * 1024;

    /// Throws UsageError when an invariant is broken.
    void validate() const;

    bool operator==(const RequestPolicy&) const = default;
};

inline const RequestPolicy kDefaultPolicy{};

void to_json(nlohmann::json& j, const RequestPolicy& p);
void from_json(const nlohmann::json& j, RequestPolicy& p);

} // namespace vapt::http
