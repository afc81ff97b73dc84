#include "vapt/metrics/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"

namespace vapt::metrics {

std::string_view to_string(Polarity p) { return p == Polarity::Positive ? "positive" : "negative"; }

bool TruthEntry::matches(const model::Finding& finding) const
{
    if (finding.cls != cls)
        return false;
    auto a = finding.location.normalized();
    auto b = location.normalized();
    if (a.vector != b.vector || a.name != b.name)
        return false;
    if (a.url == b.url)
        return true;
    return pattern && std::regex_match(a.url, std::regex(*pattern));
}

int GroundTruthManifest::positives() const
{
    return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                          [](const auto& e) { return e.polarity == Polarity::Positive; }));
}

int GroundTruthManifest::negatives() const { return static_cast<int>(entries.size()) - positives(); }

int GroundTruthManifest::traps() const
{
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.trap; }));
}

void GroundTruthManifest::validate() const
{
    std::set<std::pair<model::VulnCode, model::Location>> seen;
    for (const auto& e : entries) {
        if (!seen.emplace(e.cls, e.location.normalized()).second)
            throw SchemaError("manifest: duplicate entry " + std::string(model::code_label(e.cls)) + " " +
                              e.location.str());
        if (e.trap && e.polarity != Polarity::Negative)
            throw SchemaError("manifest: trap entry must be negative: " + e.location.str());
        if (e.pattern) {
            try {
                std::regex check(*e.pattern);
            } catch (const std::regex_error&) {
                throw SchemaError("manifest: bad pattern '" + *e.pattern + "'");
            }
        }
    }
}

void to_json(nlohmann::json& j, const TruthEntry& e)
{
    j = {{"class", model::code_label(e.cls)},
         {"location", e.location},
         {"note", e.note},
         {"polarity", to_string(e.polarity)},
         {"trap", e.trap}};
    if (e.pattern)
        j["pattern"] = *e.pattern;
}

void from_json(const nlohmann::json& j, TruthEntry& e)
{
    auto label = j.at("class").get<std::string>();
    auto code = model::parse_code(label);
    if (!code)
        throw SchemaError("manifest: unknown class '" + label + "'");
    e.cls = *code;
    e.location = j.at("location").get<model::Location>();
    e.note = j.value("note", "");
    auto polarity = j.at("polarity").get<std::string>();
    if (polarity == "positive")
        e.polarity = Polarity::Positive;
    else if (polarity == "negative")
        e.polarity = Polarity::Negative;
    else
        throw SchemaError("manifest: unknown polarity '" + polarity + "'");
    e.trap = j.value("trap", false);
    if (j.contains("pattern"))
        e.pattern = j.at("pattern").get<std::string>();
    else
        e.pattern.reset();
}

void to_json(nlohmann::json& j, const GroundTruthManifest& m)
{
    j = {{"schema", kManifestSchema}, {"target_id", m.target_id}, {"entries", m.entries}};
}

void from_json(const nlohmann::json& j, GroundTruthManifest& m)
{
    if (j.value("schema", "") != kManifestSchema)
        throw SchemaError("manifest: expected schema " + std::string(kManifestSchema));
    m.target_id = j.at("target_id").get<std::string>();
    m.entries.clear();
    const auto& entries = j.at("entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        try {
            m.entries.push_back(entries[i].get<TruthEntry>());
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("manifest: entry " + std::to_string(i) + ": " + e.what());
        }
    }
    m.validate();
}

GroundTruthManifest GroundTruthManifest::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open manifest " + path);
    try {
        return nlohmann::json::parse(in).get<GroundTruthManifest>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("manifest " + path + ": " + e.what());
    }
}

void GroundTruthManifest::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write manifest " + path);
    out << nlohmann::json(*this).dump(2) << '\n';
}

} // namespace vapt::metrics
