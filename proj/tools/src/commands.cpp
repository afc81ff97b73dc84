#include "vapt/cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vapt/cli/pipeline.hpp"
#include "vapt/error.hpp"
#include "vapt/metrics/import.hpp"
#include "vapt/metrics/rates.hpp"
#include "vapt/report/report.hpp"
#include "vapt/testbed/server.hpp"

namespace vapt::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

struct ScanArgs {
    ScanOptions opts;
    std::string mode = "vapt";
    std::string classes = "all";
    std::string out;
    std::string format = "structured";
    bool no_log = false;
    int concurrency = http::kDefaultPolicy.max_concurrent;
    long delay_ms = 0;
    long timeout_ms = http::kDefaultPolicy.timeout.count();
    int retries = http::kDefaultPolicy.max_retries;
    std::string user_agent = http::kDefaultPolicy.user_agent;
};

struct BenchArgs {
    std::string truth;
    std::vector<std::string> reports;
    std::string baseline;
    std::string match = "auto";
    bool json = false;
};

struct GateArgs {
    std::string truth;
    std::string report;
    double min_precision = 0.90;
    double min_detection = 0.90;
    std::string match = "auto";
};

struct TestbedArgs {
    testbed::TestbedConfig config;
    std::string emit_manifest;
    std::string counts;
    bool dry_run = false;
};

// A report or an interchange findings file, reduced to what matching needs.
struct Scored {
    std::string tool;
    std::string target_id;
    std::vector<model::Finding> findings;
    bool verified = false;
};

Scored load_scored(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    Scored s;
    if (doc.value("schema", "") == metrics::kFindingsSchema) {
        auto imported = metrics::import_findings(doc);
        s.tool = imported.tool;
        s.target_id = imported.target_id;
        s.findings = std::move(imported.findings);
    } else {
        auto r = doc.get<report::ScanReport>();
        s.tool = r.tool_name;
        s.target_id = r.target_id;
        s.findings = std::move(r.findings);
        s.verified = !r.verifications.empty();
    }
    return s;
}

metrics::MatchMode resolve_match(const std::string& text, const Scored& s)
{
    if (text == "auto")
        return s.verified ? metrics::MatchMode::Confirmed : metrics::MatchMode::Suspected;
    return metrics::parse_match_mode(text);
}

void check_target(const Scored& s, const metrics::GroundTruthManifest& truth, const std::string& path)
{
    if (s.target_id != truth.target_id)
        throw UsageError(path + " is for target '" + s.target_id + "' but the manifest describes '" +
                         truth.target_id + "'");
}

std::map<model::VulnCode, int> parse_counts(const std::string& text)
{
    auto counts = testbed::TestbedConfig::default_counts();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        auto code = model::parse_code(item.substr(0, eq));
        if (eq == std::string::npos || !code)
            throw UsageError("--counts expects V1=3,V2=0,..., got '" + item + "'");
        try {
            counts[*code] = std::stoi(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("bad count in '" + item + "'");
        }
    }
    return counts;
}

int do_scan(ScanArgs& a, std::ostream& out, std::ostream& err)
{
    auto& o = a.opts;
    o.mode = parse_mode(a.mode);
    o.classes = model::parse_code_list(a.classes);
    o.policy.max_concurrent = a.concurrency;
    o.policy.min_delay = std::chrono::milliseconds(a.delay_ms);
    o.policy.timeout = std::chrono::milliseconds(a.timeout_ms);
    o.policy.max_retries = a.retries;
    o.policy.user_agent = a.user_agent;
    auto format = report::parse_format(a.format);
    if (o.mode == Mode::Pt && o.input.empty())
        throw UsageError("--mode pt requires --in with previously suspected findings");
    if (!a.no_log && o.log_path.empty() && !a.out.empty())
        o.log_path = a.out + ".log.jsonl";

    auto outcome = run_scan(o);
    if (!a.out.empty())
        report::save(outcome.report, a.out, format);
    out << report::emit(outcome.report, report::Format::Summary);
    for (const auto& w : outcome.report.warnings)
        err << "warning: " << w << '\n';
    return outcome.exit_code;
}

int do_bench(const BenchArgs& a, std::ostream& out)
{
    auto truth = metrics::GroundTruthManifest::load(a.truth);
    std::map<std::string, double> baseline;
    if (!a.baseline.empty())
        baseline = metrics::load_baseline(a.baseline);

    std::vector<std::pair<std::string, metrics::MetricsReport>> rows;
    std::vector<report::ScanReport> merged;
    std::set<std::string> seen;
    for (const auto& path : a.reports) {
        auto s = load_scored(path);
        check_target(s, truth, path);
        auto mode = resolve_match(a.match, s);
        auto name = s.tool;
        for (int n = 2; seen.count(name); ++n)
            name = s.tool + "#" + std::to_string(n);
        seen.insert(name);
        rows.emplace_back(name, metrics::evaluate(s.findings, truth, mode, truth.target_id));

        report::ScanReport r;
        r.target_id = s.target_id;
        r.tool_name = name;
        std::copy_if(s.findings.begin(), s.findings.end(), std::back_inserter(r.findings),
                     [&](const model::Finding& f) { return metrics::is_reported(f, mode); });
        r.recount();
        merged.push_back(std::move(r));
    }
    auto table = metrics::compare(rows, baseline);

    if (a.json) {
        nlohmann::json doc{{"target", truth.target_id}, {"comparison", table}};
        nlohmann::json tools = nlohmann::json::object();
        for (const auto& [name, m] : rows)
            tools[name] = m;
        doc["metrics"] = tools;
        out << doc.dump(2) << '\n';
        return kExitOk;
    }
    out << "Target: " << truth.target_id << " (" << truth.positives() << " positives, " << truth.negatives()
        << " negatives)\n\n";
    out << "Findings by class\n" << report::merge(merged).text() << '\n';
    out << "Precision and efficacy\n" << table.text();
    for (const auto& [name, m] : rows) {
        out << '\n' << name << ": detection " << m.detection_rate.percent() << ", false negatives "
            << m.fn_rate.percent() << ", false positives " << m.fp_rate.percent() << '\n';
    }
    return kExitOk;
}

int do_gate(const GateArgs& a, std::ostream& out)
{
    if (a.min_precision < 0 || a.min_precision > 1 || a.min_detection < 0 || a.min_detection > 1)
        throw UsageError("thresholds must lie in [0, 1]");
    auto truth = metrics::GroundTruthManifest::load(a.truth);
    auto s = load_scored(a.report);
    check_target(s, truth, a.report);
    auto mode = resolve_match(a.match, s);
    auto m = metrics::evaluate(s.findings, truth, mode, truth.target_id);

    out << "match: " << metrics::to_string(mode) << '\n';
    out << "counts: TP " << m.counts.tp << ", FP " << m.counts.fp << ", FN " << m.counts.fn << '\n';
    out << "precision: " << m.precision.percent() << " (" << m.precision.raw() << "), minimum " << a.min_precision
        << '\n';
    out << "detection rate: " << m.detection_rate.percent() << " (" << m.detection_rate.raw() << "), minimum "
        << a.min_detection << '\n';

    bool pass = m.precision.defined() && m.detection_rate.defined() && *m.precision.value >= a.min_precision &&
                *m.detection_rate.value >= a.min_detection;
    out << (pass ? "gate: PASS" : "gate: FAIL") << '\n';
    return pass ? kExitOk : kExitFailed;
}

int do_testbed(TestbedArgs& a, std::ostream& out, std::ostream& err)
{
    if (!a.counts.empty())
        a.config.counts = parse_counts(a.counts);
    a.config.validate();
    if (a.dry_run) {
        auto m = testbed::manifest(a.config);
        if (!a.emit_manifest.empty())
            m.save(a.emit_manifest);
        out << m.positives() << " positives, " << m.negatives() << " negatives (" << m.traps() << " traps)\n";
        return kExitOk;
    }

    testbed::Server server(a.config);
    try {
        server.start();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    const auto& effective = server.config();
    const auto& m = server.manifest();
    if (!a.emit_manifest.empty())
        m.save(a.emit_manifest);
    out << "serving " << effective.origin() << '\n';
    if (effective.tls)
        out << "serving " << effective.tls_origin() << '\n';
    out << "target " << effective.target_id() << ": " << m.positives() << " positives, " << m.negatives()
        << " negatives (" << m.traps() << " traps)" << std::endl;

    g_interrupted = false;
    auto prev_int = std::signal(SIGINT, on_signal);
    auto prev_term = std::signal(SIGTERM, on_signal);
    while (!g_interrupted)
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    server.stop();
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Black-box web application vulnerability assessment and penetration testing"};
    app.name("vapt");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML or INI file with one section per command; flags win over it")
        ->envname("VAPT_CONFIG");

    ScanArgs scan;
    auto* sc = app.add_subcommand("scan", "Crawl a target, detect vulnerabilities and verify them");
    sc->add_option("url", scan.opts.url, "Target base URL");
    sc->add_option("--mode", scan.mode, "va, pt or vapt")->capture_default_str();
    sc->add_option("--classes", scan.classes, "Comma-separated codes (V1..V8) or all")->capture_default_str();
    sc->add_option("--out", scan.out, "Write the report here");
    sc->add_option("--format", scan.format, "Report format: structured, table or summary")->capture_default_str();
    sc->add_option("--in", scan.opts.input, "Findings to verify in pt mode (report or findings file)");
    sc->add_option("--log", scan.opts.log_path, "Transaction log path (default: <out>.log.jsonl)");
    sc->add_flag("--no-log", scan.no_log, "Keep the transaction log in memory only");
    sc->add_option("--replay", scan.opts.replay, "Answer requests from a recorded transaction log");
    sc->add_option("--scope", scan.opts.scope, "URL prefix the crawl may visit (repeatable)");
    sc->add_option("--max-depth", scan.opts.max_depth, "Crawl depth bound")->capture_default_str();
    sc->add_option("--max-pages", scan.opts.max_pages, "Crawl page bound")->capture_default_str();
    sc->add_option("--concurrency", scan.concurrency, "Requests in flight at once")->capture_default_str();
    sc->add_option("--delay-ms", scan.delay_ms, "Minimum spacing of requests to one host")->capture_default_str();
    sc->add_option("--timeout-ms", scan.timeout_ms, "Per-request timeout")->capture_default_str();
    sc->add_option("--retries", scan.retries, "Retries after a transport failure")->capture_default_str();
    sc->add_option("--user-agent", scan.user_agent, "User-Agent header")->capture_default_str();
    sc->add_option("--callback", scan.opts.callback, "host:port for the out-of-band listener");
    sc->add_flag("--allow-state-change", scan.opts.allow_state_change,
                 "Let verification replay state-changing requests");
    sc->add_option("--marker-seed", scan.opts.marker_seed, "Seed for the payload marker");
    sc->add_option("--target-id", scan.opts.target_id, "Name the report is filed under (default: the URL)");

    BenchArgs bench;
    auto* bc = app.add_subcommand("bench", "Score reports against a ground-truth manifest");
    bc->add_option("--truth", bench.truth, "Ground-truth manifest")->required();
    bc->add_option("--reports", bench.reports, "Reports or findings files")->required()->delimiter(',');
    bc->add_option("--baseline", bench.baseline, "Baseline precision per tool");
    bc->add_option("--match", bench.match, "auto, suspected or confirmed")->capture_default_str();
    bc->add_flag("--json", bench.json, "Print JSON instead of tables");

    GateArgs gate;
    auto* gc = app.add_subcommand("gate", "Pass or fail a report on precision and detection rate");
    gc->add_option("--truth", gate.truth, "Ground-truth manifest")->required();
    gc->add_option("--report", gate.report, "Report or findings file")->required();
    gc->add_option("--min-precision", gate.min_precision)->capture_default_str();
    gc->add_option("--min-detection", gate.min_detection)->capture_default_str();
    gc->add_option("--match", gate.match, "auto, suspected or confirmed")->capture_default_str();

    TestbedArgs tb;
    auto* tc = app.add_subcommand("testbed", "Serve the vulnerable testbed application");
    tc->add_option("--seed", tb.config.seed)->capture_default_str();
    tc->add_option("--host", tb.config.host)->capture_default_str();
    tc->add_option("--port", tb.config.port, "0 picks a free port")->capture_default_str();
    tc->add_flag("--tls", tb.config.tls, "Also serve https with a self-signed certificate");
    tc->add_option("--tls-port", tb.config.tls_port)->capture_default_str();
    tc->add_option("--emit-manifest", tb.emit_manifest, "Write the ground-truth manifest here");
    tc->add_flag("--partial-availability", tb.config.partial_availability, "Root answers 403");
    tc->add_option("--callback-allow", tb.config.callback_allowlist, "host:port the remote include may fetch");
    tc->add_option("--negatives", tb.config.negatives)->capture_default_str();
    tc->add_option("--fp-traps", tb.config.fp_traps)->capture_default_str();
    tc->add_option("--counts", tb.counts, "Positives per class, e.g. V1=3,V6=2");
    tc->add_flag("--dry-run", tb.dry_run, "Write the manifest and exit without serving");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sc->parsed())
            return do_scan(scan, out, err);
        if (bc->parsed())
            return do_bench(bench, out);
        if (gc->parsed())
            return do_gate(gate, out);
        return do_testbed(tb, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SchemaError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace vapt::cli
