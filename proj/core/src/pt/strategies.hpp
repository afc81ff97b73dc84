#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vapt/model/finding.hpp"
#include "vapt/pt/verifier.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::pt::detail {

struct Outcome {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::uint64_t> transactions;
    std::string note;
    bool retry = true;   // worth another attempt when inconclusive
};

inline Outcome confirmed(std::vector<std::uint64_t> tx, std::string note)
{
    return {Verdict::Confirmed, std::move(tx), std::move(note), false};
}
inline Outcome refuted(std::vector<std::uint64_t> tx, std::string note)
{
    return {Verdict::Refuted, std::move(tx), std::move(note), false};
}
inline Outcome inconclusive(std::vector<std::uint64_t> tx, std::string note, bool retry = true)
{
    return {Verdict::Inconclusive, std::move(tx), std::move(note), retry};
}

/// Everything a strategy sees. attempt starts at 1 and feeds the probe markers, so a
/// replayed verification asks exactly the same questions.
struct Probe {
    const model::Finding& finding;
    const StrategySpec& spec;
    const va::ScanContext& ctx;
    va::Prober& prober;
    int attempt;

    [[nodiscard]] std::string marker(int k) const
    {
        return ctx.catalog->marker + "p" + std::to_string(attempt) + std::to_string(k);
    }
    [[nodiscard]] std::string detail(const char* key) const
    {
        auto it = finding.details.find(key);
        return it == finding.details.end() ? std::string{} : it->second;
    }
};

Outcome verify_xss(const Probe& p);
Outcome verify_injection(const Probe& p);
Outcome verify_auth(const Probe& p);
Outcome verify_misconfig(const Probe& p);
Outcome verify_exposure(const Probe& p);
Outcome verify_inclusion(const Probe& p);
Outcome verify_csrf(const Probe& p);
Outcome verify_comm(const Probe& p);

http::HttpRequest get(const std::string& url, bool follow = true);

} // namespace vapt::pt::detail
