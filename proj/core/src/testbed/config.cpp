#include "vapt/testbed/config.hpp"

#include <array>

#include "vapt/error.hpp"
#include "vapt/testbed/site.hpp"

namespace vapt::testbed {

using model::VulnCode;

std::map<VulnCode, int> TestbedConfig::default_counts()
{
    std::map<VulnCode, int> counts;
    for (auto code : model::kAllCodes)
        counts[code] = 3;
    return counts;
}

void TestbedConfig::validate() const
{
    auto port_ok = [](int p) { return p >= 0 && p <= 65535; };
    if (!port_ok(port) || !port_ok(tls_port))
        throw UsageError("testbed ports must be within 0..65535");
    if (tls && port != 0 && port == tls_port)
        throw UsageError("testbed http and https ports must differ");
    if (negatives < 0 || fp_traps < 0)
        throw UsageError("testbed negative and trap counts must not be negative");
    for (const auto& [code, n] : counts) {
        if (n < 0)
            throw UsageError("testbed count for " + std::string(model::code_label(code)) + " is negative");
    }
    if (host.empty())
        throw UsageError("testbed host must not be empty");
}

std::string TestbedConfig::origin() const { return "http://" + host + ":" + std::to_string(port); }
std::string TestbedConfig::tls_origin() const { return "https://" + host + ":" + std::to_string(tls_port); }
std::string TestbedConfig::target_id() const { return "testbed-seed-" + std::to_string(seed); }

std::string_view to_string(Role r)
{
    switch (r) {
    case Role::Positive: return "positive";
    case Role::Negative: return "negative";
    case Role::Trap: return "trap";
    }
    return "positive";
}

const std::vector<std::string>& kinds(VulnCode cls, Role role)
{
    using Table = std::array<std::vector<std::string>, 3>;
    static const std::map<VulnCode, Table> table{
        {VulnCode::V1, {{{"reflect-body", "reflect-attr", "reflect-post"}, {"encoded", "comment"}, {"textarea", "second-pass"}}}},
        {VulnCode::V2, {{{"error", "boolean", "time", "post-error"}, {"parameterized", "echo"}, {"error-echo"}}}},
        {VulnCode::V3, {{{"default-creds", "fixation"}, {"strong"}, {"locked"}}}},
        {VulnCode::V4, {{{"no-headers", "listing", "stack-trace", "methods", "default-path"}, {"headers-ok", "no-listing"}, {"fake-listing"}}}},
        {VulnCode::V5, {{{"card", "private-key", "backup", "internal-ip"}, {"luhn-fail", "no-backup"}, {"pem-stub"}}}},
        {VulnCode::V6, {{{"traversal", "filter-bypass", "remote"}, {"allowlist", "waf"}, {"format-hint"}}}},
        {VulnCode::V7, {{{"email-change", "transfer"}, {"token", "samesite-strict"}, {"origin-check"}}}},
        {VulnCode::V8, {{{"cleartext-login", "cleartext-register", "cleartext-get"}, {"https-login"}, {"base-href"}}}},
    };
    return table.at(cls)[static_cast<std::size_t>(role)];
}

std::vector<Instance> layout(const TestbedConfig& config)
{
    config.validate();
    std::vector<VulnCode> active;
    for (auto code : model::kAllCodes) {
        auto it = config.counts.find(code);
        if (it != config.counts.end() && it->second > 0)
            active.push_back(code);
    }

    std::map<VulnCode, int> neg_count;
    std::map<VulnCode, int> trap_count;
    if (!active.empty()) {
        for (int j = 0; j < config.negatives; ++j)
            ++neg_count[active[static_cast<std::size_t>(j) % active.size()]];
        for (int j = 0; j < config.fp_traps; ++j)
            ++trap_count[active[static_cast<std::size_t>(j) % active.size()]];
    }

    std::vector<Instance> out;
    for (auto code : active) {
        int index = 0;
        auto add = [&](Role role, int n) {
            const auto& names = kinds(code, role);
            for (int i = 0; i < n; ++i) {
                Instance inst;
                inst.cls = code;
                inst.role = role;
                inst.kind = names[(config.seed + static_cast<std::uint64_t>(i)) % names.size()];
                inst.index = index;
                std::string label(model::code_label(code));
                label[0] = 'v';
                inst.path = "/lab/" + label + "/" + std::to_string(index) + "/";
                out.push_back(std::move(inst));
                ++index;
            }
        };
        add(Role::Positive, config.counts.at(code));
        add(Role::Negative, neg_count[code]);
        add(Role::Trap, trap_count[code]);
    }
    return out;
}

metrics::GroundTruthManifest manifest(const TestbedConfig& config) { return Site(config).manifest(); }

} // namespace vapt::testbed
