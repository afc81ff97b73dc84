#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"
#include "vapt/metrics/import.hpp"
#include "vapt/metrics/manifest.hpp"
#include "vapt/metrics/rates.hpp"

using namespace vapt;
using metrics::ConfusionCounts;
using model::VulnCode;

namespace {

const std::vector<std::string> kTools{"Acunetix", "BurpSuite", "Netsparker", "Nessus", "ZAP", "WebVAPT"};

// Tab separated table rows from the results section, keyed by their first cell.
std::map<std::string, std::vector<std::string>> table_rows(const std::string& header_prefix)
{
    std::ifstream in(VAPT_PUBLISHED_RESULTS);
    REQUIRE(in.good());
    std::map<std::string, std::vector<std::string>> rows;
    std::string line;
    bool inside = false;
    while (std::getline(in, line)) {
        if (!inside) {
            inside = line.rfind(header_prefix, 0) == 0;
            continue;
        }
        if (line.empty() || line.find('\t') == std::string::npos)
            break;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '\t'))
            cells.push_back(cell);
        auto key = cells.front();
        cells.erase(cells.begin());
        rows[key] = cells;
    }
    return rows;
}

int num(const std::string& cell) { return std::stoi(cell); }

double pct(const std::string& cell) { return std::stod(cell.substr(0, cell.find('%'))); }

model::Finding finding(VulnCode cls, const std::string& url, const std::string& name,
                       model::Confidence c = model::Confidence::Suspected)
{
    auto f = model::make_finding(cls, {url, model::Vector::Parameter, name}, "t");
    f.confidence = c;
    return f;
}

metrics::TruthEntry entry(VulnCode cls, const std::string& url, const std::string& name,
                          metrics::Polarity p = metrics::Polarity::Positive, bool trap = false)
{
    metrics::TruthEntry e;
    e.cls = cls;
    e.location = {url, model::Vector::Parameter, name};
    e.polarity = p;
    e.trap = trap;
    return e;
}

} // namespace

TEST_CASE("rate definitions")
{
    ConfusionCounts c{8, 2, 2, 6};
    CHECK(*metrics::precision(c).value == doctest::Approx(0.8));
    CHECK(*metrics::detection_rate(c).value == doctest::Approx(0.8));
    CHECK(*metrics::fn_rate(c).value == doctest::Approx(0.2));
    CHECK(*metrics::fp_rate(c).value == doctest::Approx(0.25));
    CHECK(metrics::efficacy(c) == metrics::detection_rate(c));
    CHECK(metrics::precision(c).percent() == "80%");
    CHECK(metrics::precision(c).raw() == "0.8000");
}

TEST_CASE("undefined rates carry a reason")
{
    ConfusionCounts none{};
    auto p = metrics::precision(none);
    CHECK_FALSE(p.defined());
    CHECK_FALSE(p.reason.empty());
    CHECK(p.percent().rfind("n/a", 0) == 0);
    CHECK(p.raw() == "n/a");
    CHECK_FALSE(metrics::detection_rate(none).defined());
    CHECK_FALSE(metrics::fp_rate(ConfusionCounts{1, 1, 0, std::nullopt}).defined());
    CHECK(metrics::fp_rate(ConfusionCounts{1, 0, 0, 0}).defined() == false);
}

TEST_CASE("published precision figures")
{
    auto rows = table_rows("Vulnerabilities\tAcunetix\tBurpSuite\tNetsparker\tNessus\tzap");
    REQUIRE(rows.count("True Positives"));
    REQUIRE(rows.count("Study precision"));
    const std::vector<int> tp{261, 159, 555, 280, 543, 389};
    const std::vector<int> fp{21, 23, 49, 38, 64, 33};
    const std::vector<int> expected{93, 87, 92, 88, 89, 92};
    for (std::size_t i = 0; i < kTools.size(); ++i) {
        CAPTURE(kTools[i]);
        CHECK(num(rows["True Positives"][i]) == tp[i]);
        CHECK(num(rows["False Positives"][i]) == fp[i]);
        CHECK(num(rows["Total"][i]) == tp[i] + fp[i]);
        auto r = metrics::precision({tp[i], fp[i], 0, std::nullopt});
        double printed = pct(rows["Study precision"][i]);
        CHECK(printed == expected[i]);
        CHECK(std::abs(*r.value * 100.0 - printed) <= 0.5);
        CHECK(*r.whole_percent() == expected[i]);
    }
}

TEST_CASE("published efficacy figures")
{
    auto rows = table_rows("Vulnerabilities\tAcunetix\tBurpSuite\tNetsparker\tNessus\tZAP\tWebVAPT");
    REQUIRE(rows.count("False Negatives"));
    const std::vector<int> tp{261, 159, 555, 280, 543, 389};
    const std::vector<int> fn{4, 15, 22, 18, 23, 15};
    const std::vector<int> expected{98, 91, 96, 94, 96, 96};
    for (std::size_t i = 0; i < kTools.size(); ++i) {
        CAPTURE(kTools[i]);
        CHECK(num(rows["True Positives"][i]) == tp[i]);
        CHECK(num(rows["False Negatives"][i]) == fn[i]);
        CHECK(num(rows["Total"][i]) == tp[i] + fn[i]);
        ConfusionCounts c{tp[i], 0, fn[i], std::nullopt};
        auto e = metrics::efficacy(c);
        double printed = pct(rows["Efficiency rate"][i]);
        CHECK(printed == expected[i]);
        CHECK(std::abs(*e.value * 100.0 - printed) <= 0.5);
        CHECK(*e.value + *metrics::fn_rate(c).value == doctest::Approx(1.0));
    }
}

TEST_CASE("per-class totals of the proposed tool")
{
    auto rows = table_rows("Vulnerabilities\tAcunetix\tBurpSuite\tNetsparker\tNessus\tZap\tWebVAPT");
    REQUIRE(rows.size() == 9);
    const std::vector<int> webvapt{51, 81, 3, 121, 62, 1, 43, 46};
    int sum = 0;
    for (int v = 1; v <= 8; ++v) {
        CHECK(num(rows["V" + std::to_string(v)][5]) == webvapt[v - 1]);
        sum += webvapt[v - 1];
    }
    CHECK(sum == 408);
    CHECK(num(rows["Total"][5]) == 408);
}

TEST_CASE("comparison markers against the benchmark precision")
{
    const std::vector<std::pair<int, int>> counts{{261, 21}, {159, 23}, {555, 49}, {280, 38}, {543, 64}, {389, 33}};
    const std::vector<int> fn{4, 15, 22, 18, 23, 15};
    std::vector<std::pair<std::string, metrics::MetricsReport>> reports;
    for (std::size_t i = 0; i < kTools.size(); ++i)
        reports.emplace_back(kTools[i], metrics::report_from_counts({counts[i].first, counts[i].second, fn[i], std::nullopt}));
    std::map<std::string, double> baseline{
        {"Acunetix", 0.92}, {"BurpSuite", 0.50}, {"Netsparker", 0.91}, {"Nessus", 0.91}, {"ZAP", 0.73}};
    auto table = metrics::compare(reports, baseline);
    REQUIRE(table.rows.size() == 6);
    const std::vector<std::string> markers{"▲", "▲", "▲", "▼", "▲", ""};
    for (std::size_t i = 0; i < 6; ++i) {
        CAPTURE(kTools[i]);
        CHECK(table.rows[i].marker == markers[i]);
    }
    CHECK_FALSE(table.rows[5].baseline.has_value());
    auto text = table.text();
    CHECK(text.find("Precision") != std::string::npos);
    CHECK(text.find("93%") != std::string::npos);
    CHECK(text.find("98%") != std::string::npos);

    auto flat = metrics::compare({{"X", metrics::report_from_counts({9, 1, 0, std::nullopt})}}, {{"X", 0.9}});
    CHECK(flat.rows[0].marker == "=");
    CHECK_THROWS_AS(metrics::compare({}), UsageError);
}

TEST_CASE("match examples")
{
    metrics::GroundTruthManifest truth;
    truth.target_id = "t1";
    truth.entries = {entry(VulnCode::V1, "http://h/a", "q"), entry(VulnCode::V2, "http://h/b", "id"),
                     entry(VulnCode::V1, "http://h/c", "q", metrics::Polarity::Negative, true)};

    SUBCASE("perfect")
    {
        auto c = metrics::match({finding(VulnCode::V1, "http://h/a", "q"), finding(VulnCode::V2, "http://h/b", "id")},
                                truth, metrics::MatchMode::Suspected);
        CHECK(c == ConfusionCounts{2, 0, 0, 1});
    }
    SUBCASE("wrong class is both a false positive and a miss")
    {
        auto c = metrics::match({finding(VulnCode::V2, "http://h/a", "q")}, truth, metrics::MatchMode::Suspected);
        CHECK(c == ConfusionCounts{0, 1, 2, 1});
    }
    SUBCASE("trap hit")
    {
        auto c = metrics::match({finding(VulnCode::V1, "http://h/c", "q")}, truth, metrics::MatchMode::Suspected);
        CHECK(c == ConfusionCounts{0, 1, 2, 0});
    }
    SUBCASE("confirmed mode ignores suspected findings")
    {
        std::vector<model::Finding> fs{finding(VulnCode::V1, "http://h/a", "q", model::Confidence::Confirmed),
                                       finding(VulnCode::V2, "http://h/b", "id")};
        CHECK(metrics::match(fs, truth, metrics::MatchMode::Confirmed) == ConfusionCounts{1, 0, 1, 1});
        CHECK(metrics::match(fs, truth, metrics::MatchMode::Suspected) == ConfusionCounts{2, 0, 0, 1});
    }
    SUBCASE("refuted and inconclusive are never reported")
    {
        std::vector<model::Finding> fs{finding(VulnCode::V1, "http://h/c", "q", model::Confidence::Refuted),
                                       finding(VulnCode::V1, "http://h/a", "q", model::Confidence::Inconclusive)};
        CHECK(metrics::match(fs, truth, metrics::MatchMode::Suspected) == ConfusionCounts{0, 0, 2, 1});
    }
    SUBCASE("url normalization")
    {
        auto c = metrics::match({finding(VulnCode::V1, "HTTP://H:80/a?x=1", "q")}, truth, metrics::MatchMode::Suspected);
        CHECK(c.tp == 1);
    }
    SUBCASE("target mismatch")
    {
        CHECK_THROWS_AS(metrics::match({}, truth, metrics::MatchMode::Suspected, std::string("other")), Error);
        CHECK_NOTHROW(metrics::match({}, truth, metrics::MatchMode::Suspected, std::string("t1")));
    }
    SUBCASE("no negatives leaves tn absent")
    {
        metrics::GroundTruthManifest pos{"t1", {entry(VulnCode::V1, "http://h/a", "q")}};
        CHECK_FALSE(metrics::match({}, pos, metrics::MatchMode::Suspected).tn.has_value());
    }
}

TEST_CASE("pattern entries match path parameters")
{
    auto e = entry(VulnCode::V2, "http://h/item/1", "");
    e.location.vector = model::Vector::Path;
    e.pattern = "^http://h/item/[0-9]+$";
    auto f = model::make_finding(VulnCode::V2, {"http://h/item/42", model::Vector::Path, ""}, "t");
    CHECK(e.matches(f));
    f.location.url = "http://h/item/x";
    CHECK_FALSE(e.matches(f));
}

TEST_CASE("match agrees with a brute force count on random sets")
{
    std::mt19937 rng(20240601);
    const std::vector<std::string> urls{"http://h/a", "http://h/b", "http://h/c", "http://g/a"};
    const std::vector<std::string> names{"q", "id", "file"};
    auto pick = [&](auto& v) { return v[rng() % v.size()]; };

    for (int round = 0; round < 1000; ++round) {
        CAPTURE(round);
        metrics::GroundTruthManifest truth;
        truth.target_id = "r";
        std::set<std::tuple<int, std::string, std::string>> used;
        int nt = std::uniform_int_distribution<>(0, 50)(rng);
        for (int i = 0; i < nt; ++i) {
            int cls = rng() % 8;
            auto url = pick(urls);
            auto name = pick(names);
            if (!used.insert({cls, url, name}).second)
                continue;
            bool neg = rng() % 3 == 0;
            truth.entries.push_back(entry(model::kAllCodes[cls], url, name,
                                          neg ? metrics::Polarity::Negative : metrics::Polarity::Positive,
                                          neg && rng() % 2));
        }
        std::vector<model::Finding> fs;
        int nf = std::uniform_int_distribution<>(0, 50)(rng);
        for (int i = 0; i < nf; ++i)
            fs.push_back(finding(model::kAllCodes[rng() % 8], pick(urls), pick(names),
                                 static_cast<model::Confidence>(rng() % 4)));

        for (auto mode : {metrics::MatchMode::Suspected, metrics::MatchMode::Confirmed}) {
            auto reported = [&](const model::Finding& f) {
                if (f.confidence == model::Confidence::Confirmed)
                    return true;
                return mode == metrics::MatchMode::Suspected && f.confidence == model::Confidence::Suspected;
            };
            auto same = [](const model::Finding& f, const metrics::TruthEntry& e) {
                return f.cls == e.cls && f.location.url == e.location.url && f.location.name == e.location.name &&
                       f.location.vector == e.location.vector;
            };
            int tp = 0, fp = 0, fn = 0, tn = 0, negs = 0;
            for (const auto& f : fs) {
                if (!reported(f))
                    continue;
                bool pos = false;
                for (const auto& e : truth.entries)
                    pos = pos || (e.polarity == metrics::Polarity::Positive && same(f, e));
                pos ? ++tp : ++fp;
            }
            for (const auto& e : truth.entries) {
                bool hit = false;
                for (const auto& f : fs)
                    hit = hit || (reported(f) && same(f, e));
                if (e.polarity == metrics::Polarity::Positive) {
                    fn += hit ? 0 : 1;
                } else {
                    ++negs;
                    tn += hit ? 0 : 1;
                }
            }
            auto c = metrics::match(fs, truth, mode);
            CHECK(c.tp == tp);
            CHECK(c.fp == fp);
            CHECK(c.fn == fn);
            CHECK(c.tn == (negs ? std::optional<int>(tn) : std::nullopt));
            if (tp + fn > 0)
                CHECK(*metrics::detection_rate(c).value + *metrics::fn_rate(c).value == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("evaluate splits counts by class")
{
    metrics::GroundTruthManifest truth{"t", {entry(VulnCode::V1, "http://h/a", "q"), entry(VulnCode::V3, "http://h/l", "u")}};
    auto r = metrics::evaluate({finding(VulnCode::V1, "http://h/a", "q")}, truth, metrics::MatchMode::Suspected);
    CHECK(r.counts == ConfusionCounts{1, 0, 1, std::nullopt});
    CHECK(r.per_class.at(VulnCode::V1).tp == 1);
    CHECK(r.per_class.at(VulnCode::V3).fn == 1);
    CHECK(*r.precision.value == 1.0);
    CHECK(*r.detection_rate.value == 0.5);
    CHECK_FALSE(r.fp_rate.defined());
}

TEST_CASE("manifest validation and round trip")
{
    metrics::GroundTruthManifest m{"t", {entry(VulnCode::V1, "http://h/a", "q"),
                                         entry(VulnCode::V1, "http://h/b", "q", metrics::Polarity::Negative, true)}};
    CHECK(m.positives() == 1);
    CHECK(m.negatives() == 1);
    CHECK(m.traps() == 1);
    nlohmann::json j = m;
    CHECK(j.get<metrics::GroundTruthManifest>() == m);

    auto dup = m;
    dup.entries.push_back(m.entries[0]);
    CHECK_THROWS_AS(dup.validate(), SchemaError);
    auto bad_trap = m;
    bad_trap.entries[0].trap = true;
    CHECK_THROWS_AS(bad_trap.validate(), SchemaError);
    j["schema"] = "nope";
    CHECK_THROWS_AS(j.get<metrics::GroundTruthManifest>(), SchemaError);
}

TEST_CASE("importing third party findings")
{
    nlohmann::json doc = {
        {"schema", "vapt.findings/1"},
        {"tool", "Scanner"},
        {"target_id", "t"},
        {"findings",
         {
             {{"standard", "OWASP"}, {"code", "A7"}, {"url", "http://h/a?q=1"}, {"vector", "parameter"}, {"name", "q"}},
             {{"standard", "OWASP"}, {"code", "A7"}, {"url", "http://h/a"}, {"vector", "parameter"}, {"name", "q"}},
             {{"standard", "OWASP"}, {"code", "A9"}, {"url", "http://h/"}, {"vector", "path"}},
             {{"class", "V8"}, {"url", "http://h/"}, {"vector", "channel"}, {"confidence", "confirmed"}},
         }},
    };
    auto r = metrics::import_findings(doc);
    CHECK(r.tool == "Scanner");
    CHECK(r.target_id == "t");
    REQUIRE(r.findings.size() == 2);
    REQUIRE(r.unmapped.size() == 1);
    CHECK(r.unmapped[0].index == 2);
    CHECK(r.unmapped[0].code == "A9");
    CHECK(r.findings[0].source_stage == model::Stage::Imported);

    auto bad = doc;
    bad["findings"][1]["vector"] = "telepathy";
    CHECK_THROWS_WITH_AS(metrics::import_findings(bad), doctest::Contains("record 1"), SchemaError);
    bad = doc;
    bad["schema"] = "x";
    CHECK_THROWS_AS(metrics::import_findings(bad), SchemaError);
}
