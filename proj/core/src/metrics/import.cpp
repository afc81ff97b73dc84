#include "vapt/metrics/import.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"

namespace vapt::metrics {

ImportResult import_findings(const nlohmann::json& doc)
{
    if (!doc.is_object() || doc.value("schema", "") != kFindingsSchema)
        throw SchemaError("findings file: expected schema " + std::string(kFindingsSchema));
    ImportResult result;
    result.tool = doc.value("tool", "");
    result.target_id = doc.value("target_id", "");
    if (!doc.contains("findings") || !doc.at("findings").is_array())
        throw SchemaError("findings file: 'findings' must be an array");

    std::vector<model::Finding> findings;
    const auto& rows = doc.at("findings");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        auto where = "findings file: record " + std::to_string(i);
        try {
            if (!row.is_object())
                throw SchemaError(where + ": not an object");
            std::optional<model::VulnCode> cls;
            std::string standard;
            std::string code;
            if (row.contains("class")) {
                standard = "class";
                code = row.at("class").get<std::string>();
                cls = model::parse_code(code);
                if (!cls)
                    throw SchemaError(where + ": unknown class '" + code + "'");
            } else {
                standard = row.at("standard").get<std::string>();
                code = row.at("code").get<std::string>();
                try {
                    cls = model::classify(standard, code);
                } catch (const UsageError& e) {
                    result.unmapped.push_back({i, standard, code, e.what()});
                    continue;
                }
                if (!cls) {
                    result.unmapped.push_back({i, standard, code, "no investigated class for this item"});
                    continue;
                }
            }
            model::Location loc{row.at("url").get<std::string>(),
                                model::parse_vector(row.at("vector").get<std::string>()),
                                row.value("name", "")};
            auto f = model::make_finding(*cls, loc.normalized(), row.value("title", std::string(model::class_name(*cls))),
                                         model::Stage::Imported);
            f.confidence = row.contains("confidence") ? model::parse_confidence(row.at("confidence").get<std::string>())
                                                      : model::Confidence::Confirmed;
            if (row.contains("severity"))
                f.severity = model::parse_severity(row.at("severity").get<std::string>());
            f.evidence.note = row.value("note", "");
            findings.push_back(std::move(f));
        } catch (const std::exception& e) {
            std::string what = e.what();
            throw SchemaError(what.rfind(where, 0) == 0 ? what : where + ": " + what);
        }
    }
    result.findings = model::dedup(std::move(findings));
    return result;
}

ImportResult import_findings_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open findings file " + path);
    try {
        return import_findings(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("findings file " + path + ": " + e.what());
    }
}

} // namespace vapt::metrics
