#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vapt/model/finding.hpp"

namespace vapt::metrics {

enum class Polarity { Positive, Negative };
std::string_view to_string(Polarity p);

/// One ground-truth claim: the class is (positive) or is not (negative) present at location.
struct TruthEntry {
    model::VulnCode cls = model::VulnCode::V1;
    model::Location location;
    std::string note;
    Polarity polarity = Polarity::Positive;
    /// Deliberate false-positive bait; always negative.
    bool trap = false;
    /// Optional ECMAScript regex over the finding URL, for endpoints with path parameters.
    std::optional<std::string> pattern;

    /// Same class, vector and name, and the URL equal after normalization or matching pattern.
    [[nodiscard]] bool matches(const model::Finding& finding) const;

    bool operator==(const TruthEntry&) const = default;
};

struct GroundTruthManifest {
    std::string target_id;
    std::vector<TruthEntry> entries;

    [[nodiscard]] int positives() const;
    [[nodiscard]] int negatives() const;   // traps included
    [[nodiscard]] int traps() const;
    [[nodiscard]] bool has_negatives() const { return negatives() > 0; }

    /// Throws SchemaError on a duplicate (class, location) or a positive trap.
    void validate() const;

    static GroundTruthManifest load(const std::string& path);
    void save(const std::string& path) const;

    bool operator==(const GroundTruthManifest&) const = default;
};

inline constexpr std::string_view kManifestSchema = "vapt.truth/1";

void to_json(nlohmann::json& j, const TruthEntry& e);
void from_json(const nlohmann::json& j, TruthEntry& e);
void to_json(nlohmann::json& j, const GroundTruthManifest& m);
/// Checks the schema tag and validates.
void from_json(const nlohmann::json& j, GroundTruthManifest& m);

} // namespace vapt::metrics
