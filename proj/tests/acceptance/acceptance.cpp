// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "support/fixtures.hpp"
#include "vapt/cli/pipeline.hpp"
#include "vapt/metrics/rates.hpp"
#include "vapt/model/taxonomy.hpp"
#include "vapt/report/report.hpp"
#include "vapt/testbed/server.hpp"

using namespace vapt;
using model::VulnCode;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void print(int n, const std::string& name, Verdict v, const std::string& summary)
{
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << n << " " << name << ": " << (v.pass ? summary : v.detail)
              << std::endl;
}

std::map<std::string, std::vector<std::string>> published_table(const std::string& header)
{
    std::ifstream in(VAPT_PUBLISHED_RESULTS);
    std::map<std::string, std::vector<std::string>> rows;
    std::string line;
    bool inside = false;
    while (std::getline(in, line)) {
        if (!inside) {
            inside = line.rfind(header, 0) == 0;
            continue;
        }
        if (line.find('\t') == std::string::npos)
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

Verdict published_rates(std::string& summary)
{
    Verdict v;
    const std::vector<int> tp{261, 159, 555, 280, 543, 389};
    const std::vector<int> fp{21, 23, 49, 38, 64, 33};
    const std::vector<int> fn{4, 15, 22, 18, 23, 15};
    const std::vector<int> precision{93, 87, 92, 88, 89, 92};
    const std::vector<int> efficacy{98, 91, 96, 94, 96, 96};
    auto prec_rows = published_table("Vulnerabilities\tAcunetix\tBurpSuite\tNetsparker\tNessus\tzap");
    auto eff_rows = published_table("Vulnerabilities\tAcunetix\tBurpSuite\tNetsparker\tNessus\tZAP\tWebVAPT");
    v.require(prec_rows.count("Study precision") && eff_rows.count("Efficiency rate"), "result tables not found");
    if (!v.pass)
        return v;
    for (std::size_t i = 0; i < 6; ++i) {
        auto p = metrics::precision({tp[i], fp[i], 0, std::nullopt});
        auto e = metrics::efficacy({tp[i], 0, fn[i], std::nullopt});
        double printed_p = std::stod(prec_rows["Study precision"][i]);
        double printed_e = std::stod(eff_rows["Efficiency rate"][i]);
        v.require(printed_p == precision[i] && printed_e == efficacy[i], "printed value differs for column " + std::to_string(i));
        v.require(std::abs(*p.value * 100 - printed_p) <= 0.5, "precision off for column " + std::to_string(i));
        v.require(std::abs(*e.value * 100 - printed_e) <= 0.5, "efficacy off for column " + std::to_string(i));
        summary += p.percent() + "/" + e.percent() + " ";
    }
    summary.pop_back();
    return v;
}

Verdict random_matching(std::string& summary)
{
    Verdict v;
    std::mt19937 rng(424242);
    const std::vector<std::string> urls{"http://h/a", "http://h/b", "http://h/c"};
    const std::vector<std::string> names{"q", "id"};
    int checked = 0;
    for (int round = 0; round < 1000 && v.pass; ++round) {
        metrics::GroundTruthManifest truth{"r", {}};
        std::set<std::tuple<int, std::string, std::string>> used;
        int nt = std::uniform_int_distribution<>(0, 50)(rng);
        for (int i = 0; i < nt; ++i) {
            metrics::TruthEntry e;
            e.cls = model::kAllCodes[rng() % 8];
            e.location = {urls[rng() % urls.size()], model::Vector::Parameter, names[rng() % names.size()]};
            if (!used.insert({static_cast<int>(e.cls), e.location.url, e.location.name}).second)
                continue;
            e.polarity = rng() % 3 == 0 ? metrics::Polarity::Negative : metrics::Polarity::Positive;
            truth.entries.push_back(e);
        }
        std::vector<model::Finding> fs;
        int nf = std::uniform_int_distribution<>(0, 50)(rng);
        for (int i = 0; i < nf; ++i) {
            auto f = model::make_finding(model::kAllCodes[rng() % 8],
                                         {urls[rng() % urls.size()], model::Vector::Parameter, names[rng() % names.size()]}, "r");
            f.confidence = static_cast<model::Confidence>(rng() % 4);
            fs.push_back(f);
        }
        auto same = [](const model::Finding& f, const metrics::TruthEntry& e) {
            return f.cls == e.cls && f.location == e.location;
        };
        auto reported = [](const model::Finding& f) {
            return f.confidence == model::Confidence::Suspected || f.confidence == model::Confidence::Confirmed;
        };
        int tp = 0, fp = 0, fn = 0;
        for (const auto& f : fs) {
            if (!reported(f))
                continue;
            bool pos = std::any_of(truth.entries.begin(), truth.entries.end(), [&](const auto& e) {
                return e.polarity == metrics::Polarity::Positive && same(f, e);
            });
            pos ? ++tp : ++fp;
        }
        for (const auto& e : truth.entries) {
            if (e.polarity == metrics::Polarity::Positive &&
                std::none_of(fs.begin(), fs.end(), [&](const auto& f) { return reported(f) && same(f, e); }))
                ++fn;
        }
        auto c = metrics::match(fs, truth, metrics::MatchMode::Suspected);
        v.require(c.tp == tp && c.fp == fp && c.fn == fn, "mismatch in round " + std::to_string(round));
        if (tp + fn > 0) {
            double sum = *metrics::detection_rate(c).value + *metrics::fn_rate(c).value;
            v.require(std::abs(sum - 1.0) < 1e-12, "detection + fn rate != 1 in round " + std::to_string(round));
        }
        ++checked;
    }
    summary = std::to_string(checked) + " random sets agree with the brute-force count";
    return v;
}

Verdict class_names(std::string& summary)
{
    Verdict v;
    std::set<std::string> produced;
    for (const auto& row : model::taxonomy().rows()) {
        auto cls = model::classify(row.standard, row.code);
        if (cls)
            produced.insert(std::string(model::class_name(*cls)));
        if (!row.detectable)
            v.require(!cls, row.code + " is not detectable but classifies");
    }
    const std::set<std::string> expected{"Cross Site Scripting (XSS)", "Injection", "Broken Authentication",
                                         "Security Misconfiguration", "Sensitive Data Exposure",
                                         "Malicious File Inclusion", "Cross Site Request Forgery (CSRF)",
                                         "Insecure Communication"};
    v.require(produced == expected, "classified names differ from the eight classes");
    for (auto [std_, code] : {std::pair{model::Standard::Owasp, "A9"}, std::pair{model::Standard::Owasp, "A10"},
                              std::pair{model::Standard::Owasp, "A4"}, std::pair{model::Standard::Nist, "N7"}}) {
        v.require(!model::classify(std_, code).has_value(), std::string(code) + " should not classify");
    }
    summary = std::to_string(produced.size()) + " class names, excluded items map to none";
    return v;
}

std::set<std::tuple<int, std::string, std::string>> verdict_set(const report::ScanReport& r)
{
    std::set<std::tuple<int, std::string, std::string>> out;
    for (const auto& f : r.findings)
        out.insert({static_cast<int>(f.cls), f.location.str(), std::string(model::to_string(f.confidence))});
    return out;
}

} // namespace

int main()
{
    std::string summary;
    auto v1 = published_rates(summary);
    print(1, "published precision and efficacy", v1, summary);

    testbed::TestbedConfig config;
    config.port = 0;
    config.tls = true;
    config.tls_port = 0;
    int callback_port = testing::free_port();
    config.callback_allowlist = {"127.0.0.1:" + std::to_string(callback_port)};
    testbed::Server server(config);
    server.start();
    const auto& truth = server.manifest();

    cli::ScanOptions opts;
    opts.url = server.config().origin() + "/";
    opts.mode = cli::Mode::Vapt;
    opts.callback = "127.0.0.1:" + std::to_string(callback_port);
    opts.allow_state_change = true;
    opts.marker_seed = 99;
    opts.target_id = server.config().target_id();

    cli::ScanOutcome first;
    cli::ScanOutcome second;
    std::string scan_error;
    try {
        first = cli::run_scan(opts);
        second = cli::run_scan(opts);
    } catch (const std::exception& e) {
        scan_error = e.what();
    }

    // 2: gate over the full run.
    {
        Verdict v;
        v.require(scan_error.empty(), "scan failed: " + scan_error);
        auto m = metrics::evaluate(first.report.findings, truth, metrics::MatchMode::Confirmed, first.report.target_id);
        v.require(m.precision.defined() && *m.precision.value >= 0.9, "precision " + m.precision.percent());
        v.require(m.detection_rate.defined() && *m.detection_rate.value >= 0.9, "detection " + m.detection_rate.percent());
        print(2, "gate on the default testbed", v,
              "precision " + m.precision.percent() + ", detection " + m.detection_rate.percent() + " (TP " +
                  std::to_string(m.counts.tp) + ", FP " + std::to_string(m.counts.fp) + ", FN " +
                  std::to_string(m.counts.fn) + ")");
    }

    // 3: verification improves precision and refutes at least one trap.
    {
        Verdict v;
        auto suspected = metrics::evaluate(first.va_findings, truth, metrics::MatchMode::Suspected);
        auto confirmed = metrics::evaluate(first.report.findings, truth, metrics::MatchMode::Confirmed);
        v.require(suspected.precision.defined() && confirmed.precision.defined(), "undefined precision");
        if (v.pass)
            v.require(*confirmed.precision.value >= *suspected.precision.value, "confirmed precision is lower");
        int refuted_traps = 0;
        for (const auto& e : truth.entries) {
            if (!e.trap)
                continue;
            bool suspected_hit = std::any_of(first.va_findings.begin(), first.va_findings.end(),
                                             [&](const auto& f) { return e.matches(f); });
            bool refuted = std::any_of(first.report.findings.begin(), first.report.findings.end(), [&](const auto& f) {
                return e.matches(f) && f.confidence == model::Confidence::Refuted;
            });
            refuted_traps += suspected_hit && refuted;
        }
        v.require(refuted_traps >= 1, "no trap was suspected and then refuted");
        print(3, "verification precision", v,
              "suspected " + suspected.precision.raw() + " -> confirmed " + confirmed.precision.raw() + ", " +
                  std::to_string(refuted_traps) + " traps refuted");
    }

    // 4: every seeded class confirmed; file inclusion by both techniques.
    {
        Verdict v;
        std::map<VulnCode, int> confirmed;
        for (const auto& f : first.report.findings)
            if (f.confidence == model::Confidence::Confirmed)
                ++confirmed[f.cls];
        for (auto code : model::kAllCodes)
            if (server.config().counts.at(code) > 0)
                v.require(confirmed[code] >= 1, std::string(model::code_label(code)) + " has no confirmed finding");
        bool traversal = false;
        bool callback = false;
        for (const auto& ver : first.report.verifications) {
            if (ver.verdict != pt::Verdict::Confirmed)
                continue;
            traversal = traversal || ver.proof.note.find("passwd records") != std::string::npos;
            callback = callback || ver.proof.note.find("callback token") != std::string::npos;
        }
        v.require(traversal, "no file inclusion confirmed by traversal");
        v.require(callback, "no file inclusion confirmed by callback");
        std::string counts;
        for (auto code : model::kAllCodes)
            counts += std::string(model::code_label(code)) + "=" + std::to_string(confirmed[code]) + " ";
        counts.pop_back();
        print(4, "class coverage", v, counts + ", V6 by traversal and callback");
    }

    auto v5 = random_matching(summary);
    print(5, "matching oracle", v5, summary);

    // 6: determinism and structured round trip.
    {
        Verdict v;
        auto a = verdict_set(first.report);
        auto b = verdict_set(second.report);
        v.require(!a.empty() && a == b, "two scans disagree on (class, location, verdict)");
        for (const auto* r : {&first.report, &second.report}) {
            auto copy = *r;
            copy.started.clear();
            copy.finished.clear();
            auto text = report::emit(copy, report::Format::Structured);
            auto again = report::emit(report::parse(text), report::Format::Structured);
            v.require(text == again, "structured report does not round-trip");
        }
        print(6, "determinism", v, std::to_string(a.size()) + " identical verdicts, report round-trips");
    }

    auto v7 = class_names(summary);
    print(7, "classification", v7, summary);

    server.stop();
    return failures == 0 ? 0 : 1;
}
