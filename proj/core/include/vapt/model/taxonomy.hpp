#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vapt::model {

enum class VulnCode { V1 = 1, V2, V3, V4, V5, V6, V7, V8 };

inline constexpr std::array<VulnCode, 8> kAllCodes{VulnCode::V1, VulnCode::V2, VulnCode::V3, VulnCode::V4,
                                                   VulnCode::V5, VulnCode::V6, VulnCode::V7, VulnCode::V8};

std::string_view code_label(VulnCode code);   // "V1".."V8"
std::optional<VulnCode> parse_code(std::string_view label);
/// Parses "V1,V3" or "all"; throws UsageError on anything else.
std::vector<VulnCode> parse_code_list(std::string_view text);
/// Canonical class name, byte-for-byte as the taxonomy defines it.
std::string_view class_name(VulnCode code);

enum class Severity { Info, Low, Medium, High, Critical };
std::string_view to_string(Severity s);
Severity parse_severity(std::string_view text);

enum class Standard { Nist, Owasp };
/// "NIST" or "OWASP", case-insensitive; throws UsageError otherwise.
Standard parse_standard(std::string_view label);
std::string_view to_string(Standard s);

struct VulnClass {
    VulnCode code = VulnCode::V1;
    std::string name;
    std::vector<std::string> owasp_refs;
    std::vector<std::string> nist_refs;
    bool detectable_blackbox = true;
    Severity default_severity = Severity::Medium;
};

struct MappingRow {
    Standard standard = Standard::Nist;
    std::string code;                     // "N3", "A7"
    std::optional<std::string> owasp_ref; // NIST rows: the OWASP item they map to
    std::string title;
    bool detectable = true;
    std::optional<VulnCode> mapped;
};

/// The eight investigated classes plus the NIST/OWASP rows that lead to them.
class Taxonomy {
public:
    /// Validates the document: exactly eight classes with the canonical names, every
    /// class reached by at least one row, mapped rows detectable. Throws SchemaError.
    static Taxonomy from_json(const nlohmann::json& doc);

    [[nodiscard]] const std::vector<VulnClass>& classes() const { return classes_; }
    [[nodiscard]] const std::vector<MappingRow>& rows() const { return rows_; }
    [[nodiscard]] const VulnClass& get(VulnCode code) const;

    /// The class a standard item maps to, or nullopt for items that were excluded or
    /// are absent. Throws UsageError when the code is malformed for the standard.
    [[nodiscard]] std::optional<VulnCode> classify(Standard standard, std::string_view code) const;

private:
    std::vector<VulnClass> classes_;
    std::vector<MappingRow> rows_;
};

/// Taxonomy built from the bundled mapping file, loaded once.
const Taxonomy& taxonomy();

std::optional<VulnCode> classify(Standard standard, std::string_view code);
std::optional<VulnCode> classify(std::string_view standard_label, std::string_view code);

/// Normalizes "a03", "A3:2017" to "A3" and "n07" to "N7"; nullopt when malformed.
std::optional<std::string> normalize_item_code(Standard standard, std::string_view code);

} // namespace vapt::model
