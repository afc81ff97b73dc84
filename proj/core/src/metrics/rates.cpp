#include "vapt/metrics/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"

namespace vapt::metrics {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other)
{
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    if (tn || other.tn)
        tn = tn.value_or(0) + other.tn.value_or(0);
    return *this;
}

std::string_view to_string(MatchMode m) { return m == MatchMode::Suspected ? "suspected" : "confirmed"; }

MatchMode parse_match_mode(std::string_view text)
{
    if (text == "suspected")
        return MatchMode::Suspected;
    if (text == "confirmed")
        return MatchMode::Confirmed;
    throw UsageError("unknown match mode '" + std::string(text) + "' (expected suspected or confirmed)");
}

bool is_reported(const model::Finding& finding, MatchMode mode)
{
    if (mode == MatchMode::Confirmed)
        return finding.confidence == model::Confidence::Confirmed;
    return finding.confidence == model::Confidence::Suspected || finding.confidence == model::Confidence::Confirmed;
}

ConfusionCounts match(const std::vector<model::Finding>& findings, const GroundTruthManifest& truth, MatchMode mode,
                      const std::optional<std::string>& target_id)
{
    if (target_id && *target_id != truth.target_id)
        throw Error("report target '" + *target_id + "' does not match manifest target '" + truth.target_id + "'");

    std::vector<const model::Finding*> reported;
    for (const auto& f : findings) {
        if (is_reported(f, mode))
            reported.push_back(&f);
    }
    auto hit = [&](const TruthEntry& e) {
        return std::any_of(reported.begin(), reported.end(), [&](const auto* f) { return e.matches(*f); });
    };

    ConfusionCounts c;
    for (const auto* f : reported) {
        bool positive = std::any_of(truth.entries.begin(), truth.entries.end(), [&](const TruthEntry& e) {
            return e.polarity == Polarity::Positive && e.matches(*f);
        });
        ++(positive ? c.tp : c.fp);
    }
    int tn = 0;
    for (const auto& e : truth.entries) {
        if (e.polarity == Polarity::Positive) {
            if (!hit(e))
                ++c.fn;
        } else if (!hit(e)) {
            ++tn;
        }
    }
    if (truth.has_negatives())
        c.tn = tn;
    return c;
}

namespace {

Rate ratio(int num, int den, const char* why)
{
    if (den <= 0)
        return {std::nullopt, why};
    return {static_cast<double>(num) / den, {}};
}

} // namespace

std::string Rate::percent() const
{
    if (!value)
        return "n/a (" + reason + ")";
    return std::to_string(*whole_percent()) + "%";
}

std::string Rate::raw() const
{
    if (!value)
        return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *value);
    return buf;
}

std::optional<int> Rate::whole_percent() const
{
    if (!value)
        return std::nullopt;
    return static_cast<int>(std::lround(*value * 100.0));
}

Rate detection_rate(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn, "no positives: tp+fn=0"); }
Rate fn_rate(const ConfusionCounts& c) { return ratio(c.fn, c.fn + c.tp, "no positives: fn+tp=0"); }
Rate precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp, "nothing reported: tp+fp=0"); }
Rate efficacy(const ConfusionCounts& c) { return detection_rate(c); }

Rate fp_rate(const ConfusionCounts& c)
{
    if (!c.tn)
        return {std::nullopt, "manifest lists no negatives, tn unknown"};
    return ratio(c.fp, c.fp + *c.tn, "fp+tn=0");
}

MetricsReport report_from_counts(const ConfusionCounts& counts)
{
    MetricsReport r;
    r.counts = counts;
    r.detection_rate = detection_rate(counts);
    r.fn_rate = fn_rate(counts);
    r.precision = precision(counts);
    r.efficacy = efficacy(counts);
    r.fp_rate = fp_rate(counts);
    return r;
}

MetricsReport evaluate(const std::vector<model::Finding>& findings, const GroundTruthManifest& truth, MatchMode mode,
                       const std::optional<std::string>& target_id)
{
    auto r = report_from_counts(match(findings, truth, mode, target_id));
    for (auto code : model::kAllCodes) {
        std::vector<model::Finding> subset;
        for (const auto& f : findings) {
            if (f.cls == code)
                subset.push_back(f);
        }
        GroundTruthManifest class_truth{truth.target_id, {}};
        for (const auto& e : truth.entries) {
            if (e.cls == code)
                class_truth.entries.push_back(e);
        }
        auto c = match(subset, class_truth, mode);
        if (truth.has_negatives() && !c.tn)
            c.tn = 0;
        r.per_class[code] = c;
    }
    return r;
}

void to_json(nlohmann::json& j, const ConfusionCounts& c)
{
    j = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
    j["tn"] = c.tn ? nlohmann::json(*c.tn) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const Rate& r)
{
    if (r.value)
        j = {{"value", std::round(*r.value * 10000.0) / 10000.0}, {"percent", *r.whole_percent()}};
    else
        j = {{"value", nullptr}, {"reason", r.reason}};
}

void to_json(nlohmann::json& j, const MetricsReport& r)
{
    j = {{"counts", r.counts},
         {"detection_rate", r.detection_rate},
         {"fn_rate", r.fn_rate},
         {"precision", r.precision},
         {"efficacy", r.efficacy},
         {"fp_rate", r.fp_rate}};
    auto& per = j["per_class"] = nlohmann::json::object();
    for (const auto& [code, c] : r.per_class)
        per[std::string(model::code_label(code))] = c;
}

ComparisonTable compare(const std::vector<std::pair<std::string, MetricsReport>>& reports,
                        const std::map<std::string, double>& baseline)
{
    if (reports.empty())
        throw UsageError("compare needs at least one report");
    ComparisonTable t;
    for (const auto& [tool, report] : reports) {
        ComparisonRow row{tool, report.precision, report.efficacy, report.counts, std::nullopt, {}};
        if (auto it = baseline.find(tool); it != baseline.end()) {
            row.baseline = it->second;
            if (auto mine = report.precision.whole_percent()) {
                auto theirs = static_cast<int>(std::lround(it->second * 100.0));
                row.marker = *mine > theirs ? "▲" : *mine < theirs ? "▼" : "=";
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string ComparisonTable::text() const
{
    std::size_t width = 4;
    for (const auto& r : rows)
        width = std::max(width, r.tool.size());
    auto pad = [](std::string s, std::size_t n) {
        // Markers are multi-byte; pad by display columns.
        std::size_t cols = 0;
        for (unsigned char c : s)
            cols += (c & 0xC0) != 0x80;
        if (cols < n)
            s.append(n - cols, ' ');
        return s;
    };
    std::ostringstream out;
    out << pad("Tool", width) << "  " << pad("TP", 6) << pad("FP", 6) << pad("FN", 6) << pad("Precision", 11)
        << pad("Benchmark", 11) << "Efficacy\n";
    for (const auto& r : rows) {
        auto prec = r.precision.defined() ? r.precision.percent() : std::string("n/a");
        std::string bench;
        if (r.baseline)
            bench = std::to_string(std::lround(*r.baseline * 100.0)) + "% " + r.marker;
        auto eff = r.efficacy.defined() ? r.efficacy.percent() : std::string("n/a");
        out << pad(r.tool, width) << "  " << pad(std::to_string(r.counts.tp), 6) << pad(std::to_string(r.counts.fp), 6)
            << pad(std::to_string(r.counts.fn), 6) << pad(prec, 11) << pad(bench, 11) << eff << '\n';
    }
    return out.str();
}

void to_json(nlohmann::json& j, const ComparisonTable& t)
{
    j = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row = {{"tool", r.tool}, {"precision", r.precision}, {"efficacy", r.efficacy},
                              {"counts", r.counts}};
        row["baseline_precision"] = r.baseline ? nlohmann::json(*r.baseline) : nlohmann::json(nullptr);
        row["marker"] = r.marker;
        j.push_back(std::move(row));
    }
}

std::map<std::string, double> load_baseline(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open baseline " + path);
    try {
        auto doc = nlohmann::json::parse(in);
        if (doc.value("schema", "") != "vapt.baseline/1")
            throw SchemaError("baseline " + path + ": expected schema vapt.baseline/1");
        auto rates = doc.at("precision").get<std::map<std::string, double>>();
        for (const auto& [tool, v] : rates) {
            if (v < 0.0 || v > 1.0)
                throw SchemaError("baseline " + path + ": precision for " + tool + " outside [0,1]");
        }
        return rates;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("baseline " + path + ": " + e.what());
    }
}

} // namespace vapt::metrics
