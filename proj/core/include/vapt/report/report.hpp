#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vapt/http/policy.hpp"
#include "vapt/http/transaction_log.hpp"
#include "vapt/model/finding.hpp"
#include "vapt/pt/verifier.hpp"

namespace vapt::report {

inline constexpr std::string_view kReportSchema = "vapt.report/1";
inline constexpr std::size_t kExcerptBytes = 1024;

/// Short view of one transaction cited as evidence; the full body stays in the log file.
struct Excerpt {
    std::uint64_t sequence_no = 0;
    std::string method;
    std::string url;
    int status = 0;
    std::string body;   // at most kExcerptBytes
    bool truncated = false;

    bool operator==(const Excerpt&) const = default;
};

struct ScanReport {
    std::string target_id;
    std::string tool_name = "vapt";
    std::string started;    // ISO 8601 UTC
    std::string finished;
    std::string mode;       // va, pt, vapt or imported
    std::vector<model::VulnCode> classes;
    std::string marker;
    http::RequestPolicy policy;
    std::map<model::VulnCode, int> per_class_counts;   // every class present, refuted excluded
    int total = 0;
    std::vector<model::Finding> findings;
    std::vector<pt::Verification> verifications;
    std::vector<Excerpt> excerpts;
    std::vector<std::string> warnings;
    std::string transaction_log;   // path of the full log, when one was written

    /// Recomputes per_class_counts and total from findings.
    void recount();
    /// Throws SchemaError when total or per-class counts disagree with findings.
    void validate() const;

    bool operator==(const ScanReport&) const = default;
};

/// Whether a finding is counted in per-class totals (everything except refuted).
bool counted(const model::Finding& finding);

/// Excerpts of every transaction the findings cite, in sequence order.
std::vector<Excerpt> excerpts_for(const std::vector<model::Finding>& findings, const http::TransactionLog& log);

void to_json(nlohmann::json& j, const ScanReport& r);
void from_json(const nlohmann::json& j, ScanReport& r);

enum class Format { Structured, Table, Summary };
Format parse_format(std::string_view text);

/// Serializes the report. Structured output is the source of truth and round-trips
/// through parse(); table and summary are views of it.
std::string emit(const ScanReport& report, Format format);
ScanReport parse(std::string_view structured);

ScanReport load(const std::string& path);
void save(const ScanReport& report, const std::string& path, Format format = Format::Structured);

/// Classes x tools matrix for one target.
struct MergedTable {
    std::string target_id;
    std::vector<std::string> tools;
    std::map<model::VulnCode, std::vector<int>> cells;   // per class, one count per tool
    std::vector<int> totals;                              // per tool

    [[nodiscard]] std::string text() const;
};

/// Throws Error when the reports name different targets; UsageError when empty.
MergedTable merge(const std::vector<ScanReport>& reports);

} // namespace vapt::report
