#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vapt/crawl/crawler.hpp"
#include "vapt/http/policy.hpp"
#include "vapt/model/finding.hpp"
#include "vapt/report/report.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailed = 1,        // gate failed or scan degraded
    kExitUsage = 2,
    kExitUnreachable = 3,
    kExitInternal = 4,
};

enum class Mode { Va, Pt, Vapt };
Mode parse_mode(std::string_view text);
std::string_view to_string(Mode m);

struct ScanOptions {
    std::string url;
    Mode mode = Mode::Vapt;
    std::vector<model::VulnCode> classes{model::kAllCodes.begin(), model::kAllCodes.end()};
    std::vector<std::string> scope;
    int max_depth = 3;
    int max_pages = 500;
    http::RequestPolicy policy;
    /// pt mode: a scan report or a vapt.findings/1 file whose findings get verified.
    std::string input;
    /// JSONL transaction log; empty keeps it in memory only.
    std::string log_path;
    /// Bind address for the out-of-band listener ("host:port"); empty disables remote-inclusion probes.
    std::string callback;
    bool allow_state_change = false;
    std::optional<std::uint64_t> marker_seed;
    /// Name the report is filed under; defaults to the URL.
    std::string target_id;
    /// Replay a previous transaction log instead of touching the network.
    std::string replay;
};

struct ScanOutcome {
    report::ScanReport report;
    crawl::AttackSurface surface;
    /// Findings as the VA stage produced them, before any verification.
    std::vector<model::Finding> va_findings;
    int exit_code = kExitOk;
};

/// Runs crawl, VA and PT as the mode selects. Throws UsageError on bad options.
ScanOutcome run_scan(const ScanOptions& options);

} // namespace vapt::cli
