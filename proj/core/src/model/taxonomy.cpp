#include "vapt/model/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "vapt/data.hpp"
#include "vapt/error.hpp"
#include "vapt/http/types.hpp"

namespace vapt::model {

namespace {

constexpr std::array<std::string_view, 8> kNames{
    "Cross Site Scripting (XSS)",
    "Injection",
    "Broken Authentication",
    "Security Misconfiguration",
    "Sensitive Data Exposure",
    "Malicious File Inclusion",
    "Cross Site Request Forgery (CSRF)",
    "Insecure Communication",
};

constexpr std::array<std::string_view, 8> kLabels{"V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8"};

std::size_t index_of(VulnCode code) { return static_cast<std::size_t>(code) - 1; }

VulnCode require_code(const nlohmann::json& value, const std::string& where)
{
    if (!value.is_string())
        throw SchemaError(where + ": class must be a string");
    auto code = parse_code(value.get<std::string>());
    if (!code)
        throw SchemaError(where + ": unknown class " + value.get<std::string>());
    return *code;
}

} // namespace

std::string_view code_label(VulnCode code) { return kLabels.at(index_of(code)); }

std::optional<VulnCode> parse_code(std::string_view label)
{
    for (std::size_t i = 0; i < kLabels.size(); ++i) {
        if (http::iequals(label, kLabels[i]))
            return static_cast<VulnCode>(i + 1);
    }
    return std::nullopt;
}

std::vector<VulnCode> parse_code_list(std::string_view text)
{
    if (http::iequals(text, "all"))
        return {kAllCodes.begin(), kAllCodes.end()};
    std::set<VulnCode> codes;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        auto code = parse_code(item);
        if (!code)
            throw UsageError("invalid class code '" + std::string(item) + "' (expected V1..V8 or all)");
        codes.insert(*code);
    }
    if (codes.empty())
        throw UsageError("no vulnerability classes selected");
    return {codes.begin(), codes.end()};
}

std::string_view class_name(VulnCode code) { return kNames.at(index_of(code)); }

std::string_view to_string(Severity s)
{
    switch (s) {
    case Severity::Info: return "info";
    case Severity::Low: return "low";
    case Severity::Medium: return "medium";
    case Severity::High: return "high";
    case Severity::Critical: return "critical";
    }
    return "medium";
}

Severity parse_severity(std::string_view text)
{
    for (auto s : {Severity::Info, Severity::Low, Severity::Medium, Severity::High, Severity::Critical}) {
        if (http::iequals(text, to_string(s)))
            return s;
    }
    throw SchemaError("unknown severity '" + std::string(text) + "'");
}

Standard parse_standard(std::string_view label)
{
    if (http::iequals(label, "NIST"))
        return Standard::Nist;
    if (http::iequals(label, "OWASP"))
        return Standard::Owasp;
    throw UsageError("unknown standard '" + std::string(label) + "' (expected NIST or OWASP)");
}

std::string_view to_string(Standard s) { return s == Standard::Nist ? "NIST" : "OWASP"; }

std::optional<std::string> normalize_item_code(Standard standard, std::string_view code)
{
    if (auto colon = code.find(':'); colon != std::string_view::npos)
        code = code.substr(0, colon);
    char prefix = standard == Standard::Nist ? 'N' : 'A';
    if (code.size() < 2 || std::toupper(static_cast<unsigned char>(code[0])) != prefix)
        return std::nullopt;
    auto digits = code.substr(1);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return std::nullopt;
    while (digits.size() > 1 && digits.front() == '0')
        digits.remove_prefix(1);
    if (digits == "0")
        return std::nullopt;
    return std::string(1, prefix) + std::string(digits);
}

Taxonomy Taxonomy::from_json(const nlohmann::json& doc)
{
    if (!doc.is_object() || doc.value("schema", "") != "vapt.mapping/1")
        throw SchemaError("mapping: expected schema vapt.mapping/1");
    Taxonomy t;
    const auto& classes = doc.at("classes");
    if (!classes.is_array() || classes.size() != 8)
        throw SchemaError("mapping: exactly eight classes required");
    std::set<VulnCode> seen;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        auto where = "mapping classes[" + std::to_string(i) + "]";
        VulnClass vc;
        vc.code = require_code(c.at("code"), where);
        if (!seen.insert(vc.code).second)
            throw SchemaError(where + ": duplicate code");
        vc.name = std::string(class_name(vc.code));
        if (c.contains("name") && c["name"] != vc.name)
            throw SchemaError(where + ": name must be '" + vc.name + "'");
        vc.default_severity = parse_severity(c.value("severity", "medium"));
        vc.detectable_blackbox = c.value("detectable", true);
        t.classes_.push_back(std::move(vc));
    }
    std::sort(t.classes_.begin(), t.classes_.end(), [](const auto& a, const auto& b) { return a.code < b.code; });

    std::set<std::pair<Standard, std::string>> row_keys;
    const auto& rows = doc.at("rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto where = "mapping rows[" + std::to_string(i) + "]";
        MappingRow row;
        row.standard = parse_standard(r.at("standard").get<std::string>());
        auto code = normalize_item_code(row.standard, r.at("code").get<std::string>());
        if (!code)
            throw SchemaError(where + ": malformed item code");
        row.code = *code;
        if (!row_keys.insert({row.standard, row.code}).second)
            throw SchemaError(where + ": duplicate item " + row.code);
        if (r.contains("owasp") && r["owasp"].is_string())
            row.owasp_ref = r["owasp"].get<std::string>();
        row.title = r.value("title", "");
        row.detectable = r.value("detectable", true);
        if (r.contains("class") && !r["class"].is_null())
            row.mapped = require_code(r["class"], where);
        if (row.mapped && !row.detectable)
            throw SchemaError(where + ": a mapped row must be detectable");
        if (row.mapped) {
            auto& vc = t.classes_[index_of(*row.mapped)];
            (row.standard == Standard::Nist ? vc.nist_refs : vc.owasp_refs).push_back(row.code);
        }
        t.rows_.push_back(std::move(row));
    }
    for (const auto& vc : t.classes_) {
        if (vc.nist_refs.empty() && vc.owasp_refs.empty())
            throw SchemaError("mapping: no row maps to " + std::string(code_label(vc.code)));
    }
    return t;
}

const VulnClass& Taxonomy::get(VulnCode code) const { return classes_.at(index_of(code)); }

std::optional<VulnCode> Taxonomy::classify(Standard standard, std::string_view code) const
{
    auto normalized = normalize_item_code(standard, code);
    if (!normalized)
        throw UsageError("'" + std::string(code) + "' is not a " + std::string(to_string(standard)) + " item code");
    for (const auto& row : rows_) {
        if (row.standard == standard && row.code == *normalized)
            return row.detectable ? row.mapped : std::nullopt;
    }
    return std::nullopt;
}

const Taxonomy& taxonomy()
{
    static const Taxonomy instance = [] {
        auto text = data::bundled("mapping.json");
        if (!text)
            throw Error("bundled mapping.json missing");
        return Taxonomy::from_json(nlohmann::json::parse(*text));
    }();
    return instance;
}

std::optional<VulnCode> classify(Standard standard, std::string_view code)
{
    return taxonomy().classify(standard, code);
}

std::optional<VulnCode> classify(std::string_view standard_label, std::string_view code)
{
    return classify(parse_standard(standard_label), code);
}

} // namespace vapt::model
