#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vapt/metrics/manifest.hpp"
#include "vapt/model/taxonomy.hpp"

namespace vapt::testbed {

struct TestbedConfig {
    std::string host = "127.0.0.1";
    int port = 8080;          // 0 picks a free port when serving
    bool tls = false;
    int tls_port = 8443;      // 0 picks a free port when serving
    std::uint64_t seed = 1;
    std::map<model::VulnCode, int> counts = default_counts();   // positive instances per class
    int negatives = 16;
    int fp_traps = 8;
    /// The root answers 403; the site is reachable only through the path robots.txt names.
    bool partial_availability = false;
    /// "host:port" pairs the remote-include endpoint may fetch from.
    std::vector<std::string> callback_allowlist;

    static std::map<model::VulnCode, int> default_counts();

    /// Throws UsageError on negative counts or ports outside 0..65535.
    void validate() const;
    [[nodiscard]] std::string origin() const;       // http://host:port
    [[nodiscard]] std::string tls_origin() const;   // https://host:tls_port
    [[nodiscard]] std::string target_id() const;    // "testbed-seed-N"
};

enum class Role { Positive, Negative, Trap };
std::string_view to_string(Role r);

/// One self-contained endpoint group under /lab/v<class>/<index>/.
struct Instance {
    model::VulnCode cls = model::VulnCode::V1;
    Role role = Role::Positive;
    std::string kind;
    int index = 0;
    std::string path;   // "/lab/v1/0/"
};

/// Kind names available for a class and role, in rotation order.
const std::vector<std::string>& kinds(model::VulnCode cls, Role role);

/// Instances for a config. Kinds rotate by seed; negatives and traps are dealt
/// round-robin over the classes that have positive instances.
std::vector<Instance> layout(const TestbedConfig& config);

/// Ground truth for a config; equal to what a server started with the same (effective)
/// config serves.
metrics::GroundTruthManifest manifest(const TestbedConfig& config);

} // namespace vapt::testbed
