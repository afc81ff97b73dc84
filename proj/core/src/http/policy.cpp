#include "vapt/http/policy.hpp"

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"

namespace vapt::http {

void RequestPolicy::validate() const
{
    if (max_concurrent < 1)
        throw UsageError("max_concurrent must be >= 1");
    if (timeout.count() <= 0)
        throw UsageError("timeout must be > 0");
    if (min_delay.count() < 0)
        throw UsageError("min_delay must be >= 0");
    if (max_retries < 0 || max_retries > 10)
        throw UsageError("max_retries must be in [0, 10]");
    if (max_redirects < 0)
        throw UsageError("max_redirects must be >= 0");
    if (max_body_bytes == 0)
        throw UsageError("max_body_bytes must be > 0");
}

void to_json(nlohmann::json& j, const RequestPolicy& p)
{
    j = nlohmann::json{{"max_concurrent", p.max_concurrent},
                       {"min_delay_ms", p.min_delay.count()},
                       {"timeout_ms", p.timeout.count()},
                       {"max_retries", p.max_retries},
                       {"user_agent", p.user_agent},
                       {"max_redirects", p.max_redirects},
                       {"max_body_bytes", p.max_body_bytes}};
}

void from_json(const nlohmann::json& j, RequestPolicy& p)
{
    RequestPolicy d;
    p.max_concurrent = j.value("max_concurrent", d.max_concurrent);
    p.min_delay = std::chrono::milliseconds(j.value("min_delay_ms", d.min_delay.count()));
    p.timeout = std::chrono::milliseconds(j.value("timeout_ms", d.timeout.count()));
    p.max_retries = j.value("max_retries", d.max_retries);
    p.user_agent = j.value("user_agent", d.user_agent);
    p.max_redirects = j.value("max_redirects", d.max_redirects);
    p.max_body_bytes = j.value("max_body_bytes", d.max_body_bytes);
}

} // namespace vapt::http
