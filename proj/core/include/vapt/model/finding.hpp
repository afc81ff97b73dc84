#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vapt/model/taxonomy.hpp"

namespace vapt::model {

enum class Vector { Parameter, FormField, Header, Cookie, Channel, Path, Body, Form };
std::string_view to_string(Vector v);
Vector parse_vector(std::string_view text);

/// Where a finding lives. The URL is kept in location-key form (canonical, no query).
struct Location {
    std::string url;
    Vector vector = Vector::Parameter;
    std::string name;

    [[nodiscard]] Location normalized() const;
    [[nodiscard]] std::string str() const;   // "url [vector:name]"

    auto operator<=>(const Location&) const = default;
};

enum class Confidence { Suspected, Confirmed, Refuted, Inconclusive };
std::string_view to_string(Confidence c);
Confidence parse_confidence(std::string_view text);
/// Dedup precedence: confirmed > suspected > inconclusive > refuted.
int rank(Confidence c);

enum class Stage { VA, PT, Imported };
std::string_view to_string(Stage s);
Stage parse_stage(std::string_view text);

struct Evidence {
    std::vector<std::uint64_t> transactions;
    std::string note;

    bool operator==(const Evidence&) const = default;
};

struct Finding {
    std::string id;
    VulnCode cls = VulnCode::V1;
    Location location;
    std::string title;
    Evidence evidence;
    Confidence confidence = Confidence::Suspected;
    Stage source_stage = Stage::VA;
    Severity severity = Severity::Medium;
    /// Parameters the verification stage needs to re-run the probe (method, template, ...).
    std::map<std::string, std::string> details;

    bool operator==(const Finding&) const = default;
};

/// Stable id: FNV-1a 64 over the class label and normalized location, as 16 hex digits.
std::string finding_id(VulnCode cls, const Location& location);

/// A suspected finding with id and class-default severity filled in.
Finding make_finding(VulnCode cls, Location location, std::string title, Stage stage = Stage::VA);

/// One finding per (class, location): evidence merged, highest-ranked confidence wins.
/// Output is ordered by (class, location).
std::vector<Finding> dedup(std::vector<Finding> findings);

void to_json(nlohmann::json& j, const Location& l);
void from_json(const nlohmann::json& j, Location& l);
void to_json(nlohmann::json& j, const Finding& f);
void from_json(const nlohmann::json& j, Finding& f);

} // namespace vapt::model
