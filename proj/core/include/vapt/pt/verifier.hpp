#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vapt/crawl/crawler.hpp"
#include "vapt/model/finding.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::pt {

enum class Verdict { Confirmed, Refuted, Inconclusive };
std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct Proof {
    std::vector<std::uint64_t> transactions;
    std::string note;

    bool operator==(const Proof&) const = default;
};

struct Verification {
    std::string finding_id;
    Verdict verdict = Verdict::Inconclusive;
    Proof proof;
    int attempts = 1;

    bool operator==(const Verification&) const = default;
};

void to_json(nlohmann::json& j, const Verification& v);
void from_json(const nlohmann::json& j, Verification& v);

/// Confirmation parameters for one class.
struct StrategySpec {
    std::string strategy;
    int confirmations = 2;          // V1: independent executable reflections required
    int independent_pairs = 2;      // V2: boolean pairs that must agree
    int time_repeats = 2;           // V2: delayed responses required
    int min_passwd_lines = 3;       // V6
    int callback_wait_ms = 2000;    // V6
    bool requires_state_change = false;
};

/// Class-to-strategy table. Each class accepts exactly one strategy name.
struct DispatchTable {
    int max_attempts = 3;
    std::map<model::VulnCode, StrategySpec> strategies;

    /// Throws SchemaError on unknown strategies, missing classes or max_attempts outside 1..3.
    static DispatchTable from_json(const nlohmann::json& doc);
    static DispatchTable bundled();

    [[nodiscard]] const StrategySpec& spec(model::VulnCode cls) const;
};

/// Strategy name each class must be dispatched to.
std::string_view expected_strategy(model::VulnCode cls);

class Verifier {
public:
    explicit Verifier(va::ScanContext ctx, DispatchTable table = DispatchTable::bundled());

    /// Runs the class strategy, retrying inconclusive outcomes up to max_attempts.
    /// Throws UsageError unless the finding is suspected.
    [[nodiscard]] Verification verify(const model::Finding& finding) const;

    [[nodiscard]] const DispatchTable& table() const { return table_; }

private:
    va::ScanContext ctx_;
    DispatchTable table_;
};

/// The finding after verification: confidence follows the verdict, proof is appended to the evidence and the verdict recorded in details.
model::Finding apply(model::Finding finding, const Verification& verification);

struct PtResult {
    std::vector<Verification> verifications;
    std::vector<model::Finding> findings;   // deduped, refuted ones kept
};

/// Verifies every suspected finding in the list (concurrent across locations, serialized
/// per location). Other findings pass through unchanged.
PtResult run_pt(const std::vector<model::Finding>& findings, const va::ScanContext& ctx,
                const DispatchTable& table = DispatchTable::bundled());

struct VaptResult {
    va::VaResult va;
    std::vector<Verification> verifications;
    std::vector<model::Finding> findings;   // deduped, refuted ones kept
};

/// VA, then verification of every suspected finding (concurrent across locations,
/// serialized per location), then dedup.
VaptResult run_vapt(const crawl::AttackSurface& surface, const std::vector<model::VulnCode>& classes,
                    const va::ScanContext& ctx, const DispatchTable& table = DispatchTable::bundled());

} // namespace vapt::pt
