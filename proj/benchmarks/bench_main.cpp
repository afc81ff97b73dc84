#include <benchmark/benchmark.h>

#include <random>

#include "vapt/crawl/forms.hpp"
#include "vapt/crawl/html.hpp"
#include "vapt/metrics/rates.hpp"
#include "vapt/testbed/site.hpp"
#include "vapt/testbed/sql.hpp"
#include "vapt/va/signals.hpp"

using namespace vapt;

namespace {

std::pair<std::vector<model::Finding>, metrics::GroundTruthManifest> sample(int n)
{
    std::mt19937 rng(1);
    metrics::GroundTruthManifest truth{"bench", {}};
    std::vector<model::Finding> findings;
    for (int i = 0; i < n; ++i) {
        auto cls = model::kAllCodes[i % 8];
        model::Location loc{"http://h/p" + std::to_string(i), model::Vector::Parameter, "q"};
        metrics::TruthEntry e;
        e.cls = cls;
        e.location = loc;
        e.polarity = rng() % 4 == 0 ? metrics::Polarity::Negative : metrics::Polarity::Positive;
        truth.entries.push_back(e);
        if (rng() % 3 != 0)
            findings.push_back(model::make_finding(cls, loc, "b"));
    }
    return {findings, truth};
}

std::string page(int rows)
{
    std::string body = "<!doctype html><html><head><title>Bench</title></head><body><table>";
    for (int i = 0; i < rows; ++i)
        body += "<tr><td class=\"n\">Item " + std::to_string(i) + "</td><td><a href=\"item?id=" + std::to_string(i) +
                "\">view</a> &amp; more</td></tr>\n";
    return body + "</table><form action=\"s\"><input name=q></form></body></html>";
}

} // namespace

static void BM_Match(benchmark::State& state)
{
    auto [findings, truth] = sample(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(metrics::match(findings, truth, metrics::MatchMode::Suspected));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Match)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_Similarity(benchmark::State& state)
{
    auto a = page(static_cast<int>(state.range(0)));
    auto b = a;
    b.replace(b.find("Item 1"), 6, "Item X");
    auto volatile_patterns = va::compile_all({"[0-9]{2}:[0-9]{2}:[0-9]{2}"});
    for (auto _ : state)
        benchmark::DoNotOptimize(va::similarity(a, b, volatile_patterns));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * (a.size() + b.size())));
}
BENCHMARK(BM_Similarity)->Arg(10)->Arg(100)->Arg(1000);

static void BM_Tokenize(benchmark::State& state)
{
    auto body = page(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(crawl::tokenize(body));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_Tokenize)->Arg(10)->Arg(100)->Arg(1000);

static void BM_ExtractForms(benchmark::State& state)
{
    auto body = page(200);
    for (auto _ : state)
        benchmark::DoNotOptimize(crawl::extract_forms(body, "http://h/"));
}
BENCHMARK(BM_ExtractForms);

static void BM_SqlWhere(benchmark::State& state)
{
    const std::string clause = "(category = 'tools' OR price > 20) AND NOT name = 'Lamp' -- tail";
    for (auto _ : state)
        benchmark::DoNotOptimize(testbed::select_where(clause, {}));
}
BENCHMARK(BM_SqlWhere);

static void BM_SiteHandle(benchmark::State& state)
{
    testbed::Site site(testbed::TestbedConfig{});
    auto req = testbed::Request::from_wire("GET", "/lab/v2/3/product?id=2%20AND%201%3D1", {}, "", false);
    for (auto _ : state)
        benchmark::DoNotOptimize(site.handle(req));
}
BENCHMARK(BM_SiteHandle);
BENCHMARK_MAIN();
