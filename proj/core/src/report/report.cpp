#include "vapt/report/report.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"

namespace vapt::report {

bool counted(const model::Finding& finding) { return finding.confidence != model::Confidence::Refuted; }

void ScanReport::recount()
{
    per_class_counts.clear();
    for (auto code : model::kAllCodes)
        per_class_counts[code] = 0;
    total = 0;
    for (const auto& f : findings) {
        if (!counted(f))
            continue;
        ++per_class_counts[f.cls];
        ++total;
    }
}

void ScanReport::validate() const
{
    int sum = 0;
    for (const auto& [code, n] : per_class_counts)
        sum += n;
    if (sum != total)
        throw SchemaError("report: total " + std::to_string(total) + " != sum of per-class counts " +
                          std::to_string(sum));
    std::map<model::VulnCode, int> expected;
    for (const auto& f : findings) {
        if (per_class_counts.count(f.cls) == 0)
            throw SchemaError("report: class " + std::string(model::code_label(f.cls)) + " missing from counts");
        if (counted(f))
            ++expected[f.cls];
    }
    for (const auto& [code, n] : per_class_counts) {
        if (expected[code] != n)
            throw SchemaError("report: count for " + std::string(model::code_label(code)) +
                              " disagrees with findings");
    }
}

std::vector<Excerpt> excerpts_for(const std::vector<model::Finding>& findings, const http::TransactionLog& log)
{
    std::set<std::uint64_t> cited;
    for (const auto& f : findings)
        cited.insert(f.evidence.transactions.begin(), f.evidence.transactions.end());
    std::vector<Excerpt> out;
    for (auto seq : cited) {
        auto tx = log.find(seq);
        if (!tx)
            continue;
        Excerpt e;
        e.sequence_no = seq;
        e.method = tx->request.method;
        e.url = tx->request.url;
        e.status = tx->status();
        auto body = tx->ok() ? tx->body() : std::string_view(tx->error()->message);
        e.truncated = body.size() > kExcerptBytes;
        e.body = std::string(body.substr(0, kExcerptBytes));
        out.push_back(std::move(e));
    }
    return out;
}

namespace {

nlohmann::json excerpt_json(const Excerpt& e)
{
    return {{"sequence_no", e.sequence_no}, {"method", e.method}, {"url", e.url},
            {"status", e.status},           {"body", e.body},     {"truncated", e.truncated}};
}

Excerpt excerpt_from(const nlohmann::json& j)
{
    return {j.at("sequence_no").get<std::uint64_t>(), j.at("method").get<std::string>(),
            j.at("url").get<std::string>(),           j.at("status").get<int>(),
            j.at("body").get<std::string>(),          j.value("truncated", false)};
}

} // namespace

void to_json(nlohmann::json& j, const ScanReport& r)
{
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [code, n] : r.per_class_counts)
        counts[std::string(model::code_label(code))] = n;
    std::vector<std::string> classes;
    for (auto c : r.classes)
        classes.emplace_back(model::code_label(c));
    nlohmann::json excerpts = nlohmann::json::array();
    for (const auto& e : r.excerpts)
        excerpts.push_back(excerpt_json(e));
    j = {{"schema", kReportSchema},
         {"target_id", r.target_id},
         {"tool_name", r.tool_name},
         {"started", r.started},
         {"finished", r.finished},
         {"mode", r.mode},
         {"classes", classes},
         {"marker", r.marker},
         {"policy", r.policy},
         {"per_class_counts", counts},
         {"total", r.total},
         {"findings", r.findings},
         {"verifications", r.verifications},
         {"excerpts", excerpts},
         {"warnings", r.warnings},
         {"transaction_log", r.transaction_log}};
}

void from_json(const nlohmann::json& j, ScanReport& r)
{
    if (j.value("schema", "") != kReportSchema)
        throw SchemaError("report: expected schema " + std::string(kReportSchema));
    try {
        r.target_id = j.at("target_id").get<std::string>();
        r.tool_name = j.value("tool_name", "vapt");
        r.started = j.value("started", "");
        r.finished = j.value("finished", "");
        r.mode = j.value("mode", "");
        r.classes.clear();
        for (const auto& c : j.value("classes", std::vector<std::string>{})) {
            auto code = model::parse_code(c);
            if (!code)
                throw SchemaError("report: unknown class '" + c + "'");
            r.classes.push_back(*code);
        }
        r.marker = j.value("marker", "");
        r.policy = j.contains("policy") ? j.at("policy").get<http::RequestPolicy>() : http::RequestPolicy{};
        r.per_class_counts.clear();
        for (const auto& [label, n] : j.at("per_class_counts").items()) {
            auto code = model::parse_code(label);
            if (!code)
                throw SchemaError("report: unknown class '" + label + "' in per_class_counts");
            r.per_class_counts[*code] = n.get<int>();
        }
        r.total = j.at("total").get<int>();
        r.findings = j.at("findings").get<std::vector<model::Finding>>();
        r.verifications = j.value("verifications", std::vector<pt::Verification>{});
        r.excerpts.clear();
        for (const auto& e : j.value("excerpts", nlohmann::json::array()))
            r.excerpts.push_back(excerpt_from(e));
        r.warnings = j.value("warnings", std::vector<std::string>{});
        r.transaction_log = j.value("transaction_log", "");
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("report: ") + e.what());
    }
    r.validate();
}

Format parse_format(std::string_view text)
{
    if (text == "structured" || text == "json")
        return Format::Structured;
    if (text == "table")
        return Format::Table;
    if (text == "summary")
        return Format::Summary;
    throw UsageError("unknown report format '" + std::string(text) + "' (structured, table, summary)");
}

namespace {

std::string table_view(const ScanReport& r)
{
    std::ostringstream out;
    out << "Target: " << r.target_id << "  Tool: " << r.tool_name << '\n';
    std::size_t width = 10;
    for (auto code : model::kAllCodes)
        width = std::max(width, model::class_name(code).size() + 5);
    auto line = [&](const std::string& label, const std::string& value) {
        out << label << std::string(width > label.size() ? width - label.size() : 1, ' ') << value << '\n';
    };
    line("Class", r.tool_name);
    for (const auto& [code, n] : r.per_class_counts)
        line(std::string(model::code_label(code)) + " " + std::string(model::class_name(code)), std::to_string(n));
    line("Total", std::to_string(r.total));
    return out.str();
}

std::string summary_view(const ScanReport& r)
{
    std::ostringstream out;
    std::map<model::Confidence, int> by_confidence;
    for (const auto& f : r.findings)
        ++by_confidence[f.confidence];
    out << r.tool_name << " " << r.mode << " scan of " << r.target_id << ": " << r.total << " findings";
    out << " (confirmed " << by_confidence[model::Confidence::Confirmed] << ", suspected "
        << by_confidence[model::Confidence::Suspected] << ", inconclusive "
        << by_confidence[model::Confidence::Inconclusive] << ", refuted " << by_confidence[model::Confidence::Refuted]
        << ")\n";
    for (const auto& f : r.findings) {
        out << "  [" << model::to_string(f.confidence) << "] " << model::code_label(f.cls) << " "
            << model::to_string(f.severity) << " " << f.title << " at " << f.location.str() << '\n';
    }
    for (const auto& w : r.warnings)
        out << "  warning: " << w << '\n';
    return out.str();
}

} // namespace

std::string emit(const ScanReport& report, Format format)
{
    switch (format) {
    case Format::Structured: return nlohmann::json(report).dump(2) + "\n";
    case Format::Table: return table_view(report);
    case Format::Summary: return summary_view(report);
    }
    return {};
}

ScanReport parse(std::string_view structured)
{
    try {
        return nlohmann::json::parse(structured).get<ScanReport>();
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("report: ") + e.what());
    }
}

ScanReport load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open report " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void save(const ScanReport& report, const std::string& path, Format format)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write report " + path);
    out << emit(report, format);
}

MergedTable merge(const std::vector<ScanReport>& reports)
{
    if (reports.empty())
        throw UsageError("merge needs at least one report");
    MergedTable t;
    t.target_id = reports.front().target_id;
    for (auto code : model::kAllCodes)
        t.cells[code] = {};
    for (const auto& r : reports) {
        if (r.target_id != t.target_id)
            throw Error("cannot merge reports for different targets ('" + t.target_id + "' and '" + r.target_id + "')");
        t.tools.push_back(r.tool_name);
        int total = 0;
        for (auto code : model::kAllCodes) {
            auto it = r.per_class_counts.find(code);
            int n = it == r.per_class_counts.end() ? 0 : it->second;
            t.cells[code].push_back(n);
            total += n;
        }
        t.totals.push_back(total);
    }
    return t;
}

std::string MergedTable::text() const
{
    std::size_t label_width = 5;
    for (auto code : model::kAllCodes)
        label_width = std::max(label_width, model::class_name(code).size() + 3);
    std::vector<std::size_t> widths;
    for (std::size_t i = 0; i < tools.size(); ++i)
        widths.push_back(std::max<std::size_t>(tools[i].size(), std::to_string(totals[i]).size()) + 2);
    auto cell = [](const std::string& s, std::size_t w) { return std::string(w - std::min(w, s.size()), ' ') + s; };

    std::ostringstream out;
    out << std::string(label_width, ' ');
    for (std::size_t i = 0; i < tools.size(); ++i)
        out << cell(tools[i], widths[i]);
    out << '\n';
    for (const auto& [code, counts] : cells) {
        auto label = std::string(model::code_label(code)) + " " + std::string(model::class_name(code));
        out << label << std::string(label_width - std::min(label_width, label.size()), ' ');
        for (std::size_t i = 0; i < counts.size(); ++i)
            out << cell(std::to_string(counts[i]), widths[i]);
        out << '\n';
    }
    out << "Total" << std::string(label_width - 5, ' ');
    for (std::size_t i = 0; i < totals.size(); ++i)
        out << cell(std::to_string(totals[i]), widths[i]);
    out << '\n';
    return out.str();
}

} // namespace vapt::report
