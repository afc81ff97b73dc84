#include <doctest.h>

#include <deque>
#include <set>

#include "support/fixtures.hpp"
#include "vapt/crawl/crawler.hpp"
#include "vapt/crawl/forms.hpp"
#include "vapt/crawl/html.hpp"
#include "vapt/error.hpp"
#include "vapt/http/url.hpp"

using namespace vapt;

namespace {

const std::string kBase = "http://site.test";

// Adjacency of a small static site; "/deep" sits at link depth 4.
const std::map<std::string, std::vector<std::string>> kGraph{
    {"/", {"/a", "/b", "/c", "http://elsewhere.test/x"}},
    {"/a", {"/a/1", "/a/2", "/"}},
    {"/b", {"/b/1", "/b/2"}},
    {"/c", {"/c/1"}},
    {"/a/1", {"/a/1/x", "/a/1/y"}},
    {"/a/2", {}},
    {"/b/1", {"/b/1/x"}},
    {"/b/2", {"/a"}},
    {"/c/1", {}},
    {"/a/1/x", {"/deep"}},
    {"/a/1/y", {}},
    {"/b/1/x", {}},
    {"/deep", {}},
};

std::shared_ptr<testing::ScriptedTransport> graph_site()
{
    auto t = std::make_shared<testing::ScriptedTransport>();
    for (const auto& [path, links] : kGraph) {
        std::string body = "<html><body>";
        for (const auto& l : links)
            body += "<a href=\"" + l + "\">link</a> ";
        body += "</body></html>";
        t->add_html(kBase + path, body);
    }
    return t;
}

// Independent oracle: plain BFS over the adjacency list.
std::set<std::string> reachable(int max_depth)
{
    std::set<std::string> seen{"/"};
    std::deque<std::pair<std::string, int>> queue{{"/", 0}};
    while (!queue.empty()) {
        auto [page, d] = queue.front();
        queue.pop_front();
        if (d == max_depth)
            continue;
        for (const auto& l : kGraph.at(page)) {
            if (l.rfind("/", 0) == 0 && seen.insert(l).second)
                queue.push_back({l, d + 1});
        }
    }
    return seen;
}

crawl::Target target(int depth = 3, int pages = 500)
{
    crawl::Target t;
    t.base_url = kBase + "/";
    t.max_depth = depth;
    t.max_pages = pages;
    return t;
}

} // namespace

TEST_CASE("crawl of a 12-page link graph at depth 3 finds exactly the reachable pages")
{
    auto transport = graph_site();
    http::HttpEngine engine({}, transport);
    auto surface = crawl::crawl(target(3), engine);

    auto expected = reachable(3);
    REQUIRE(expected.size() == 12);
    std::set<std::string> got;
    for (const auto& p : surface.pages) {
        got.insert(http::Url::parse(p.url)->path);
        CHECK(p.depth <= 3);
        CHECK(p.status == 200);
    }
    CHECK(got == expected);
}

TEST_CASE("crawl fetches nothing out of scope")
{
    auto transport = graph_site();
    http::HttpEngine engine({}, transport);
    auto t = target(5);
    crawl::crawl(t, engine);
    for (const auto& url : transport->requested()) {
        INFO(url);
        CHECK(crawl::in_scope(url, t));
    }
    for (const auto& tx : engine.log().snapshot())
        CHECK(tx.tag == "crawl");
}

TEST_CASE("max_pages=1 fetches only the base page")
{
    auto transport = graph_site();
    http::HttpEngine engine({}, transport);
    auto surface = crawl::crawl(target(3, 1), engine);
    REQUIRE(surface.pages.size() == 1);
    CHECK(surface.pages[0].url == kBase + "/");
}

TEST_CASE("page budget bounds the surface")
{
    for (int budget : {2, 5, 9}) {
        auto transport = graph_site();
        http::HttpEngine engine({}, transport);
        auto surface = crawl::crawl(target(6, budget), engine);
        CHECK(static_cast<int>(surface.pages.size()) == budget);
    }
}

TEST_CASE("crawling a static fixture twice yields the same surface")
{
    auto run = [] {
        auto transport = graph_site();
        http::RequestPolicy policy;
        policy.max_concurrent = 4;
        http::HttpEngine engine(policy, transport);
        return crawl::crawl(target(4, 10), engine);
    };
    auto a = run();
    auto b = run();
    REQUIRE(a.pages.size() == b.pages.size());
    for (std::size_t i = 0; i < a.pages.size(); ++i)
        CHECK(a.pages[i].url == b.pages[i].url);
    CHECK(a.forms == b.forms);
}

TEST_CASE("unresolvable base gives an empty surface with an unreachable entry")
{
    http::RequestPolicy policy;
    policy.max_retries = 0;
    http::HttpEngine engine(policy, http::make_network_transport());
    crawl::Target t;
    t.base_url = "http://127.0.0.1:1/";
    auto surface = crawl::crawl(t, engine);
    CHECK(surface.empty());
    REQUIRE(surface.unreachable.size() == 1);
    CHECK(surface.unreachable[0].url == "http://127.0.0.1:1/");
}

TEST_CASE("forbidden root still enumerates the alternate path")
{
    auto cfg = testing::only(model::VulnCode::V1, 1);
    cfg.partial_availability = true;
    testing::Lab lab(cfg);
    auto surface = lab.crawl();
    const auto* root = surface.page(lab.url("/"));
    REQUIRE(root != nullptr);
    CHECK(root->status == 403);
    const auto* app = surface.page(lab.url("/app/"));
    REQUIRE(app != nullptr);
    CHECK(app->status == 200);
    CHECK(surface.page(lab.url("/lab/v1/0/")) != nullptr);
}

TEST_CASE("target validation")
{
    crawl::Target t;
    t.base_url = "not a url";
    CHECK_THROWS_AS(t.validate(), UsageError);
    t.base_url = "http://a.test/";
    t.max_depth = 0;
    CHECK_THROWS_AS(t.validate(), UsageError);
    t.max_depth = 1;
    t.scope = {"http://b.test/"};
    CHECK_THROWS_AS(t.validate(), UsageError);
    t.scope = {};
    CHECK_NOTHROW(t.validate());
}

TEST_CASE("in_scope normalizes before comparing")
{
    crawl::Target t;
    t.base_url = "http://T/";
    t.scope = {"http://T/"};
    CHECK(crawl::in_scope("http://T:80/a", t));
    CHECK_FALSE(crawl::in_scope("http://evil.example/", t));
    CHECK(crawl::in_scope("http://t/A", t));
    CHECK(crawl::in_scope("http://T/a/../b", std::vector<std::string>{"http://T/b"}));
    CHECK_FALSE(crawl::in_scope("http://T/bee", std::vector<std::string>{"http://T/b"}));
    CHECK_FALSE(crawl::in_scope("https://T/a", t));
}

TEST_CASE("extract_forms")
{
    SUBCASE("hidden csrf_token marks the form")
    {
        auto forms = crawl::extract_forms(
            R"(<form method="post" action="/save"><input type="hidden" name="csrf_token" value="x"><input name="v"></form>)",
            "http://h.test/p");
        REQUIRE(forms.size() == 1);
        CHECK(forms[0].has_token_like_field);
        CHECK(forms[0].action_url == "http://h.test/save");
    }
    SUBCASE("missing action means the page itself")
    {
        auto forms = crawl::extract_forms("<form><input name=q></form>", "http://h.test/dir/page?x=1");
        REQUIRE(forms.size() == 1);
        CHECK(forms[0].action_url == "http://h.test/dir/page?x=1");
        CHECK(forms[0].method == "GET");
        CHECK_FALSE(forms[0].state_changing);
    }
    SUBCASE("login form")
    {
        auto forms = crawl::extract_forms(
            R"(<FORM METHOD=POST action="login"><input name="user"><input type="password" name="pass"><button>Go</button></FORM>)",
            "http://h.test/app/");
        REQUIRE(forms.size() == 1);
        CHECK(forms[0].state_changing);
        CHECK(forms[0].method == "POST");
        CHECK(forms[0].inputs.size() == 2);
        CHECK(forms[0].has_password());
        CHECK(forms[0].action_url == "http://h.test/app/login");
    }
    SUBCASE("a visible field named token does not count")
    {
        auto forms = crawl::extract_forms(R"(<form method=post><input name="token"></form>)", "http://h.test/");
        CHECK_FALSE(forms[0].has_token_like_field);
    }
    SUBCASE("malformed markup is tolerated")
    {
        auto forms = crawl::extract_forms("<form action=a><input name=x <form action=b>", "http://h.test/");
        CHECK(forms.size() <= 2);
    }
}

TEST_CASE("token name heuristic")
{
    for (auto name : {"csrf_token", "XSRF", "authenticity_token", "_nonce", "anti-csrf", "Token"})
        CHECK(crawl::is_token_like_name(name));
    for (auto name : {"email", "amount", "to", "session"})
        CHECK_FALSE(crawl::is_token_like_name(name));
}

TEST_CASE("tokenizer honors comments and raw text")
{
    auto tokens = crawl::tokenize("<p>a<!-- <b> --></p><textarea><i></textarea><script>x<y</script>");
    int starts = 0;
    for (const auto& t : tokens) {
        if (t.kind == crawl::TokenKind::StartTag)
            ++starts;
    }
    CHECK(starts == 3);   // p, textarea, script
    CHECK(crawl::title_of("<title>Index of /x</title>") == "Index of /x");
    CHECK(crawl::decode_entities("&lt;a&gt;&amp;&#39;") == "<a>&'");
}
