#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vapt/model/finding.hpp"

namespace vapt::metrics {

struct UnmappedRow {
    std::size_t index = 0;
    std::string standard;
    std::string code;
    std::string reason;
};

struct ImportResult {
    std::string tool;
    std::string target_id;
    std::vector<model::Finding> findings;   // deduped, source_stage imported
    std::vector<UnmappedRow> unmapped;
};

inline constexpr std::string_view kFindingsSchema = "vapt.findings/1";

/// Normalized third-party findings. Each record names a standard item
/// ({"standard": "OWASP"|"NIST", "code": "A7"}) or a class ({"class": "V1"}) plus url,
/// vector and name. Throws SchemaError naming the first bad record.
ImportResult import_findings(const nlohmann::json& doc);
ImportResult import_findings_file(const std::string& path);

} // namespace vapt::metrics
