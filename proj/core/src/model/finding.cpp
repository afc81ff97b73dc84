#include "vapt/model/finding.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"
#include "vapt/http/types.hpp"
#include "vapt/http/url.hpp"

namespace vapt::model {

namespace {

constexpr std::array<std::string_view, 8> kVectors{"parameter", "form_field", "header", "cookie",
                                                   "channel",   "path",       "body",   "form"};

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::string_view, N>& names, const char* what)
{
    for (std::size_t i = 0; i < N; ++i) {
        if (http::iequals(text, names[i]))
            return static_cast<Enum>(i);
    }
    throw SchemaError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr std::array<std::string_view, 4> kConfidence{"suspected", "confirmed", "refuted", "inconclusive"};
constexpr std::array<std::string_view, 3> kStages{"VA", "PT", "imported"};

void merge_into(Finding& winner, const Finding& other)
{
    auto& tx = winner.evidence.transactions;
    tx.insert(tx.end(), other.evidence.transactions.begin(), other.evidence.transactions.end());
    if (!other.evidence.note.empty() && winner.evidence.note.find(other.evidence.note) == std::string::npos) {
        if (!winner.evidence.note.empty())
            winner.evidence.note += "; ";
        winner.evidence.note += other.evidence.note;
    }
    for (const auto& [k, v] : other.details)
        winner.details.emplace(k, v);
}

} // namespace

std::string_view to_string(Vector v) { return kVectors.at(static_cast<std::size_t>(v)); }
Vector parse_vector(std::string_view text) { return parse_enum<Vector>(text, kVectors, "vector"); }

Location Location::normalized() const
{
    Location out = *this;
    out.url = http::location_key(url);
    return out;
}

std::string Location::str() const { return url + " [" + std::string(to_string(vector)) + ":" + name + "]"; }

std::string_view to_string(Confidence c) { return kConfidence.at(static_cast<std::size_t>(c)); }
Confidence parse_confidence(std::string_view text) { return parse_enum<Confidence>(text, kConfidence, "confidence"); }

int rank(Confidence c)
{
    switch (c) {
    case Confidence::Confirmed: return 3;
    case Confidence::Suspected: return 2;
    case Confidence::Inconclusive: return 1;
    case Confidence::Refuted: return 0;
    }
    return 0;
}

std::string_view to_string(Stage s) { return kStages.at(static_cast<std::size_t>(s)); }
Stage parse_stage(std::string_view text) { return parse_enum<Stage>(text, kStages, "source stage"); }

std::string finding_id(VulnCode cls, const Location& location)
{
    auto loc = location.normalized();
    std::uint64_t hash = 14695981039346656037ull;
    auto feed = [&](std::string_view s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ull;
        }
        hash ^= 0x1f;   // field separator
        hash *= 1099511628211ull;
    };
    feed(code_label(cls));
    feed(loc.url);
    feed(to_string(loc.vector));
    feed(loc.name);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

Finding make_finding(VulnCode cls, Location location, std::string title, Stage stage)
{
    Finding f;
    f.cls = cls;
    f.location = location.normalized();
    f.id = finding_id(cls, f.location);
    f.title = std::move(title);
    f.source_stage = stage;
    f.severity = taxonomy().get(cls).default_severity;
    return f;
}

std::vector<Finding> dedup(std::vector<Finding> findings)
{
    std::map<std::pair<VulnCode, Location>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        findings[i].location = findings[i].location.normalized();
        groups[{findings[i].cls, findings[i].location}].push_back(i);
    }

    std::vector<Finding> out;
    out.reserve(groups.size());
    for (auto& [key, members] : groups) {
        auto best = *std::max_element(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return rank(findings[a].confidence) < rank(findings[b].confidence);
        });
        Finding winner = findings[best];
        for (auto i : members) {
            if (i != best)
                merge_into(winner, findings[i]);
        }
        auto& tx = winner.evidence.transactions;
        std::sort(tx.begin(), tx.end());
        tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
        winner.id = finding_id(winner.cls, winner.location);
        out.push_back(std::move(winner));
    }
    return out;
}

void to_json(nlohmann::json& j, const Location& l)
{
    j = {{"url", l.url}, {"vector", to_string(l.vector)}, {"name", l.name}};
}

void from_json(const nlohmann::json& j, Location& l)
{
    l.url = j.at("url").get<std::string>();
    l.vector = parse_vector(j.at("vector").get<std::string>());
    l.name = j.value("name", "");
}

void to_json(nlohmann::json& j, const Finding& f)
{
    j = {
        {"id", f.id},
        {"class", code_label(f.cls)},
        {"class_name", class_name(f.cls)},
        {"location", f.location},
        {"title", f.title},
        {"evidence", {{"transactions", f.evidence.transactions}, {"note", f.evidence.note}}},
        {"confidence", to_string(f.confidence)},
        {"source_stage", to_string(f.source_stage)},
        {"severity", to_string(f.severity)},
        {"details", f.details},
    };
}

void from_json(const nlohmann::json& j, Finding& f)
{
    auto code = parse_code(j.at("class").get<std::string>());
    if (!code)
        throw SchemaError("unknown class " + j.at("class").dump());
    f.cls = *code;
    f.location = j.at("location").get<Location>();
    f.id = j.value("id", finding_id(f.cls, f.location));
    f.title = j.value("title", "");
    if (j.contains("evidence")) {
        const auto& e = j["evidence"];
        f.evidence.transactions = e.value("transactions", std::vector<std::uint64_t>{});
        f.evidence.note = e.value("note", "");
    }
    f.confidence = parse_confidence(j.value("confidence", "suspected"));
    f.source_stage = parse_stage(j.value("source_stage", "VA"));
    f.severity = j.contains("severity") ? parse_severity(j["severity"].get<std::string>())
                                        : taxonomy().get(f.cls).default_severity;
    f.details = j.value("details", std::map<std::string, std::string>{});
}

} // namespace vapt::model
