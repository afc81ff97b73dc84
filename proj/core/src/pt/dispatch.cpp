#include <nlohmann/json.hpp>

#include "vapt/data.hpp"
#include "vapt/error.hpp"
#include "vapt/pt/verifier.hpp"

namespace vapt::pt {

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Confirmed: return "confirmed";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict parse_verdict(std::string_view text)
{
    if (text == "confirmed")
        return Verdict::Confirmed;
    if (text == "refuted")
        return Verdict::Refuted;
    if (text == "inconclusive")
        return Verdict::Inconclusive;
    throw SchemaError("unknown verdict '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const Verification& v)
{
    j = {{"finding_id", v.finding_id},
         {"verdict", to_string(v.verdict)},
         {"proof", {{"transactions", v.proof.transactions}, {"note", v.proof.note}}},
         {"attempts", v.attempts}};
}

void from_json(const nlohmann::json& j, Verification& v)
{
    v.finding_id = j.at("finding_id").get<std::string>();
    v.verdict = parse_verdict(j.at("verdict").get<std::string>());
    v.proof.transactions = j.at("proof").at("transactions").get<std::vector<std::uint64_t>>();
    v.proof.note = j.at("proof").value("note", "");
    v.attempts = j.at("attempts").get<int>();
}

std::string_view expected_strategy(model::VulnCode cls)
{
    switch (cls) {
    case model::VulnCode::V1: return "executable-reflection";
    case model::VulnCode::V2: return "cross-strategy";
    case model::VulnCode::V3: return "authenticated-page";
    case model::VulnCode::V6: return "marker-content";
    case model::VulnCode::V7: return "state-replay";
    default: return "re-observe";
    }
}

DispatchTable DispatchTable::from_json(const nlohmann::json& doc)
{
    try {
        if (doc.value("schema", "") != "vapt.dispatch/1")
            throw SchemaError("dispatch table: unsupported schema");
        DispatchTable t;
        t.max_attempts = doc.value("max_attempts", 3);
        if (t.max_attempts < 1 || t.max_attempts > 3)
            throw SchemaError("dispatch table: max_attempts must be 1..3");
        const auto& strategies = doc.at("strategies");
        for (auto code : model::kAllCodes) {
            auto label = std::string(model::code_label(code));
            if (!strategies.contains(label))
                throw SchemaError("dispatch table: no strategy for " + label);
            const auto& s = strategies.at(label);
            StrategySpec spec;
            spec.strategy = s.at("strategy").get<std::string>();
            if (spec.strategy != expected_strategy(code))
                throw SchemaError("dispatch table: " + label + " cannot use strategy '" + spec.strategy + "'");
            spec.confirmations = s.value("confirmations", spec.confirmations);
            spec.independent_pairs = s.value("independent_pairs", spec.independent_pairs);
            spec.time_repeats = s.value("time_repeats", spec.time_repeats);
            spec.min_passwd_lines = s.value("min_passwd_lines", spec.min_passwd_lines);
            spec.callback_wait_ms = s.value("callback_wait_ms", spec.callback_wait_ms);
            spec.requires_state_change = s.value("requires_state_change", spec.requires_state_change);
            if (spec.confirmations < 1 || spec.independent_pairs < 1 || spec.time_repeats < 1 ||
                spec.min_passwd_lines < 1 || spec.callback_wait_ms < 0)
                throw SchemaError("dispatch table: " + label + " has a non-positive parameter");
            t.strategies[code] = spec;
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("dispatch table: ") + e.what());
    }
}

DispatchTable DispatchTable::bundled()
{
    static const DispatchTable table = from_json(nlohmann::json::parse(*data::bundled("dispatch.json")));
    return table;
}

const StrategySpec& DispatchTable::spec(model::VulnCode cls) const
{
    auto it = strategies.find(cls);
    if (it == strategies.end())
        throw Error("dispatch table has no entry for " + std::string(model::code_label(cls)));
    return it->second;
}

} // namespace vapt::pt
