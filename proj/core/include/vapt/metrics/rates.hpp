#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vapt/metrics/manifest.hpp"
#include "vapt/model/finding.hpp"

namespace vapt::metrics {

struct ConfusionCounts {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    std::optional<int> tn;   // absent when the manifest lists no negatives

    ConfusionCounts& operator+=(const ConfusionCounts& other);
    bool operator==(const ConfusionCounts&) const = default;
};

/// Which findings count as reported: suspected mode takes suspected and confirmed
/// findings, confirmed mode only confirmed ones.
enum class MatchMode { Suspected, Confirmed };
std::string_view to_string(MatchMode m);
MatchMode parse_match_mode(std::string_view text);
bool is_reported(const model::Finding& finding, MatchMode mode);

/// Confusion counts of findings against truth. When target_id is given it must equal
/// the manifest's, otherwise Error is thrown.
ConfusionCounts match(const std::vector<model::Finding>& findings, const GroundTruthManifest& truth, MatchMode mode,
                      const std::optional<std::string>& target_id = std::nullopt);

/// A ratio that may be undefined; undefined carries the reason instead of a value.
struct Rate {
    std::optional<double> value;
    std::string reason;

    [[nodiscard]] bool defined() const { return value.has_value(); }
    /// Whole percent ("92%") or "n/a (reason)".
    [[nodiscard]] std::string percent() const;
    /// Four decimals ("0.9218") or "n/a".
    [[nodiscard]] std::string raw() const;
    /// Value rounded to a whole percent.
    [[nodiscard]] std::optional<int> whole_percent() const;

    bool operator==(const Rate&) const = default;
};

Rate detection_rate(const ConfusionCounts& c);   // tp / (tp + fn)
Rate fp_rate(const ConfusionCounts& c);          // fp / (fp + tn)
Rate fn_rate(const ConfusionCounts& c);          // fn / (fn + tp)
Rate precision(const ConfusionCounts& c);        // tp / (tp + fp)
/// Same formula as detection_rate, reported under its own name.
Rate efficacy(const ConfusionCounts& c);

struct MetricsReport {
    ConfusionCounts counts;
    Rate detection_rate;
    Rate fn_rate;
    Rate precision;
    Rate efficacy;
    Rate fp_rate;
    std::map<model::VulnCode, ConfusionCounts> per_class;
};

MetricsReport evaluate(const std::vector<model::Finding>& findings, const GroundTruthManifest& truth, MatchMode mode,
                       const std::optional<std::string>& target_id = std::nullopt);
MetricsReport report_from_counts(const ConfusionCounts& counts);

void to_json(nlohmann::json& j, const ConfusionCounts& c);
void to_json(nlohmann::json& j, const Rate& r);
void to_json(nlohmann::json& j, const MetricsReport& r);

struct ComparisonRow {
    std::string tool;
    Rate precision;
    Rate efficacy;
    ConfusionCounts counts;
    std::optional<double> baseline;   // baseline precision for this tool
    std::string marker;               // "▲", "▼", "=" or empty without a baseline
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    /// Aligned plain text.
    [[nodiscard]] std::string text() const;
};

void to_json(nlohmann::json& j, const ComparisonTable& t);

/// Per-tool precision and efficacy; a tool with a baseline precision gets an up or down
/// marker from comparing whole percents. Throws UsageError on an empty list.
ComparisonTable compare(const std::vector<std::pair<std::string, MetricsReport>>& reports,
                        const std::map<std::string, double>& baseline = {});

/// Reads {"schema": "vapt.baseline/1", "precision": {tool: ratio}}.
std::map<std::string, double> load_baseline(const std::string& path);

} // namespace vapt::metrics
