#include "vapt/cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "vapt/error.hpp"
#include "vapt/http/callback.hpp"
#include "vapt/http/replay.hpp"
#include "vapt/http/transport.hpp"
#include "vapt/metrics/import.hpp"
#include "vapt/pt/verifier.hpp"
#include "vapt/va/catalog.hpp"

namespace vapt::cli {

Mode parse_mode(std::string_view text)
{
    if (text == "va")
        return Mode::Va;
    if (text == "pt")
        return Mode::Pt;
    if (text == "vapt")
        return Mode::Vapt;
    throw UsageError("unknown mode '" + std::string(text) + "' (expected va, pt or vapt)");
}

std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::Va: return "va";
    case Mode::Pt: return "pt";
    case Mode::Vapt: return "vapt";
    }
    return "vapt";
}

namespace {

std::string utc_now()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Input {
    std::string target_id;
    std::vector<model::Finding> findings;
};

// Either a scan report or an interchange findings file; every finding is reset to suspected.
Input load_input(const std::string& path)
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
    Input input;
    if (doc.value("schema", "") == metrics::kFindingsSchema) {
        auto imported = metrics::import_findings(doc);
        input.target_id = imported.target_id;
        input.findings = std::move(imported.findings);
    } else {
        auto report = doc.get<report::ScanReport>();
        input.target_id = report.target_id;
        input.findings = std::move(report.findings);
    }
    for (auto& f : input.findings) {
        f.confidence = model::Confidence::Suspected;
        f.details.erase("verdict");
        f.details.erase("attempts");
    }
    return input;
}

std::pair<std::string, int> split_host_port(const std::string& text)
{
    auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0)
        throw UsageError("--callback expects host:port, got '" + text + "'");
    int port = 0;
    try {
        port = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("--callback expects host:port, got '" + text + "'");
    }
    if (port < 0 || port > 65535)
        throw UsageError("--callback port out of range");
    return {text.substr(0, colon), port};
}

bool any_response(const http::TransactionLog& log)
{
    auto txs = log.snapshot();
    return std::any_of(txs.begin(), txs.end(), [](const auto& tx) { return tx.ok(); });
}

} // namespace

ScanOutcome run_scan(const ScanOptions& options)
{
    options.policy.validate();
    if (options.classes.empty())
        throw UsageError("no classes selected");

    Input input;
    if (options.mode == Mode::Pt) {
        if (options.input.empty())
            throw UsageError("--mode pt requires --in with previously suspected findings");
        input = load_input(options.input);
    } else if (options.url.empty()) {
        throw UsageError("a target URL is required");
    }

    std::optional<http::LogContents> recorded;
    if (!options.replay.empty())
        recorded = http::read_transaction_log(options.replay);

    auto log = options.log_path.empty() ? std::make_shared<http::TransactionLog>()
                                        : std::make_shared<http::TransactionLog>(options.log_path);
    std::shared_ptr<http::Transport> transport;
    if (recorded)
        transport = std::make_shared<http::ReplayTransport>(*recorded);
    else
        transport = http::make_network_transport();
    http::HttpEngine engine(options.policy, transport, http::steady_clock(), log);

    auto catalog = va::PayloadCatalog::bundled();
    if (recorded && recorded->header.contains("marker"))
        catalog.marker = recorded->header["marker"].get<std::string>();
    else
        catalog.marker = va::make_marker(options.marker_seed);

    std::unique_ptr<http::CallbackSink> callbacks;
    if (recorded) {
        if (recorded->header.contains("callback"))
            callbacks = std::make_unique<http::ReplayCallbacks>(recorded->header["callback"].get<std::string>(),
                                                                recorded->callbacks);
    } else if (!options.callback.empty()) {
        auto [host, port] = split_host_port(options.callback);
        callbacks = std::make_unique<http::CallbackListener>(host, port, log);
    }

    ScanOutcome outcome;
    auto& rep = outcome.report;
    rep.target_id = !options.target_id.empty() ? options.target_id
                    : !input.target_id.empty() ? input.target_id
                                               : options.url;
    rep.started = utc_now();
    rep.mode = std::string(to_string(options.mode));
    rep.classes = options.classes;
    std::sort(rep.classes.begin(), rep.classes.end());
    rep.classes.erase(std::unique(rep.classes.begin(), rep.classes.end()), rep.classes.end());
    rep.marker = catalog.marker;
    rep.policy = options.policy;
    rep.transaction_log = options.log_path;

    nlohmann::json header{{"marker", rep.marker}, {"target", rep.target_id}, {"url", options.url},
                          {"mode", rep.mode}};
    nlohmann::json labels = nlohmann::json::array();
    for (auto c : rep.classes)
        labels.push_back(std::string(model::code_label(c)));
    header["classes"] = labels;
    if (callbacks)
        header["callback"] = callbacks->base_url();
    log->write_header(header);

    va::ScanContext ctx;
    ctx.engine = &engine;
    ctx.catalog = &catalog;
    ctx.callbacks = callbacks.get();
    ctx.allow_state_change = options.allow_state_change;

    auto in_selection = [&](const model::Finding& f) {
        return std::binary_search(rep.classes.begin(), rep.classes.end(), f.cls);
    };

    if (options.mode == Mode::Pt) {
        std::vector<model::Finding> selected;
        std::copy_if(input.findings.begin(), input.findings.end(), std::back_inserter(selected), in_selection);
        auto pt = pt::run_pt(selected, ctx);
        rep.findings = std::move(pt.findings);
        rep.verifications = std::move(pt.verifications);
        outcome.va_findings = std::move(selected);
        if (!rep.verifications.empty() && !any_response(*log)) {
            rep.warnings.push_back("target unreachable: no verification request got a response");
            outcome.exit_code = kExitUnreachable;
        }
    } else {
        crawl::Target target;
        target.base_url = options.url;
        target.scope = options.scope;
        target.max_depth = options.max_depth;
        target.max_pages = options.max_pages;
        target.validate();
        outcome.surface = crawl::crawl(target, engine);
        const auto& surface = outcome.surface;
        rep.warnings = surface.warnings;
        for (const auto& u : surface.unreachable)
            rep.warnings.push_back("unreachable: " + u.url + " (" + u.reason + ")");

        if (surface.empty()) {
            rep.warnings.push_back("target unreachable: the crawl fetched no pages");
            outcome.exit_code = kExitUnreachable;
        } else {
            va::VaResult va;
            if (options.mode == Mode::Va) {
                va = va::run_va(surface, rep.classes, ctx);
                rep.findings = va.findings;
            } else {
                auto result = pt::run_vapt(surface, rep.classes, ctx);
                va = std::move(result.va);
                rep.findings = std::move(result.findings);
                rep.verifications = std::move(result.verifications);
            }
            outcome.va_findings = va.findings;
            bool degraded = !surface.unreachable.empty();
            for (const auto& r : va.reports) {
                if (r.failed) {
                    degraded = true;
                    rep.warnings.push_back(std::string(model::code_label(r.cls)) + " detector failed: " + r.error);
                }
            }
            if (degraded)
                outcome.exit_code = kExitFailed;
        }
    }

    rep.recount();
    rep.excerpts = report::excerpts_for(rep.findings, *log);
    rep.finished = utc_now();
    return outcome;
}

} // namespace vapt::cli
