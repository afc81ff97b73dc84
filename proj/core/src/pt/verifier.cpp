#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <thread>

#include "strategies.hpp"
#include "vapt/error.hpp"

namespace vapt::pt {

using namespace detail;

namespace {

Outcome dispatch(const Probe& p)
{
    switch (p.finding.cls) {
    case model::VulnCode::V1: return verify_xss(p);
    case model::VulnCode::V2: return verify_injection(p);
    case model::VulnCode::V3: return verify_auth(p);
    case model::VulnCode::V4: return verify_misconfig(p);
    case model::VulnCode::V5: return verify_exposure(p);
    case model::VulnCode::V6: return verify_inclusion(p);
    case model::VulnCode::V7: return verify_csrf(p);
    case model::VulnCode::V8: return verify_comm(p);
    }
    return inconclusive({}, "no strategy", false);
}

} // namespace

Verifier::Verifier(va::ScanContext ctx, DispatchTable table) : ctx_(ctx), table_(std::move(table))
{
    if (ctx_.engine == nullptr || ctx_.catalog == nullptr)
        throw UsageError("verifier needs an engine and a payload catalog");
}

Verification Verifier::verify(const model::Finding& finding) const
{
    if (finding.confidence != model::Confidence::Suspected)
        throw UsageError("only suspected findings can be verified (" + finding.id + " is " +
                         std::string(model::to_string(finding.confidence)) + ")");
    const auto& spec = table_.spec(finding.cls);
    va::Prober prober(*ctx_.engine, "pt:" + std::string(model::code_label(finding.cls)));

    Verification v;
    v.finding_id = finding.id;
    for (int attempt = 1; attempt <= table_.max_attempts; ++attempt) {
        v.attempts = attempt;
        Outcome outcome;
        try {
            outcome = dispatch({finding, spec, ctx_, prober, attempt});
        } catch (const std::exception& e) {
            outcome = inconclusive({}, std::string("strategy failed: ") + e.what(), false);
        }
        v.verdict = outcome.verdict;
        v.proof = {std::move(outcome.transactions), std::move(outcome.note)};
        if (outcome.verdict != Verdict::Inconclusive || !outcome.retry)
            break;
    }
    if (v.verdict == Verdict::Confirmed && v.proof.transactions.empty())
        v.verdict = Verdict::Inconclusive;
    return v;
}

model::Finding apply(model::Finding finding, const Verification& verification)
{
    switch (verification.verdict) {
    case Verdict::Confirmed:
        finding.confidence = model::Confidence::Confirmed;
        finding.source_stage = model::Stage::PT;
        break;
    case Verdict::Refuted:
        finding.confidence = model::Confidence::Refuted;
        finding.source_stage = model::Stage::PT;
        break;
    case Verdict::Inconclusive:
        finding.confidence = model::Confidence::Inconclusive;
        break;
    }
    auto& tx = finding.evidence.transactions;
    tx.insert(tx.end(), verification.proof.transactions.begin(), verification.proof.transactions.end());
    std::sort(tx.begin(), tx.end());
    tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
    if (!verification.proof.note.empty())
        finding.evidence.note += (finding.evidence.note.empty() ? "" : "; ") + std::string("PT: ") + verification.proof.note;
    finding.details["verdict"] = std::string(to_string(verification.verdict));
    finding.details["attempts"] = std::to_string(verification.attempts);
    return finding;
}

PtResult run_pt(const std::vector<model::Finding>& findings, const va::ScanContext& ctx, const DispatchTable& table)
{
    Verifier verifier(ctx, table);

    // One lane per location so probes against the same spot never overlap.
    std::map<model::Location, std::vector<std::size_t>> lanes;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        if (findings[i].confidence == model::Confidence::Suspected)
            lanes[findings[i].location.normalized()].push_back(i);
    }
    std::vector<const std::vector<std::size_t>*> work;
    for (const auto& [loc, idx] : lanes)
        work.push_back(&idx);

    std::vector<std::optional<Verification>> out(findings.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto w = next++; w < work.size(); w = next++) {
            for (auto i : *work[w])
                out[i] = verifier.verify(findings[i]);
        }
    };
    auto threads_wanted = std::clamp<std::size_t>(work.size(), 1, std::max(1, ctx.engine->policy().max_concurrent));
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < threads_wanted; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();

    PtResult result;
    std::vector<model::Finding> final;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        if (out[i]) {
            result.verifications.push_back(*out[i]);
            final.push_back(apply(findings[i], *out[i]));
        } else {
            final.push_back(findings[i]);
        }
    }
    result.findings = model::dedup(std::move(final));
    return result;
}

VaptResult run_vapt(const crawl::AttackSurface& surface, const std::vector<model::VulnCode>& classes,
                    const va::ScanContext& ctx, const DispatchTable& table)
{
    VaptResult result;
    result.va = va::run_va(surface, classes, ctx);
    auto pt = run_pt(result.va.findings, ctx, table);
    result.verifications = std::move(pt.verifications);
    result.findings = std::move(pt.findings);
    return result;
}

} // namespace vapt::pt
