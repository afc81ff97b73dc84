#include <regex>

#include "strategies.hpp"
#include "vapt/crawl/forms.hpp"
#include "vapt/crawl/html.hpp"
#include "vapt/http/tls_probe.hpp"
#include "vapt/http/url.hpp"
#include "vapt/va/auth.hpp"
#include "vapt/va/checks.hpp"
#include "vapt/va/points.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::pt::detail {

namespace {

Outcome transport_failure(const http::HttpTransaction& tx)
{
    return inconclusive({tx.sequence_no}, "transport failure: " + (tx.error() ? tx.error()->message : "no response"));
}

std::string page_or_location(const Probe& p)
{
    auto page = p.detail("page");
    return page.empty() ? p.finding.location.url : page;
}

} // namespace

Outcome verify_auth(const Probe& p)
{
    const auto& catalog = *p.ctx.catalog;
    auto form = va::LoginForm::load(p.finding.details, p.finding.location.url);
    http::CookieJar jar;
    auto attempt = va::attempt_login(p.prober, form, p.detail("user"), p.detail("password"), jar);
    const auto& tx = attempt.response;
    if (!tx.ok())
        return transport_failure(tx);
    if (tx.status() != 200 || !va::contains_any(tx.body(), catalog.success_keywords))
        return refuted({tx.sequence_no}, "no authenticated page after login with " + p.detail("user"));

    auto anonymous = p.prober.send(get(tx.request.url), nullptr, false);
    if (!anonymous.ok())
        return transport_failure(anonymous);
    auto volatile_patterns = va::compile_all(catalog.volatile_patterns);
    if (anonymous.status() == 200 &&
        va::similarity(tx.body(), anonymous.body(), volatile_patterns) >= catalog.similarity_threshold)
        return refuted({tx.sequence_no, anonymous.sequence_no}, "post-login page is also served anonymously");

    std::vector<std::uint64_t> proof{tx.sequence_no, anonymous.sequence_no};
    if (p.finding.location.vector == model::Vector::Cookie) {
        auto name = p.detail("cookie");
        for (const auto& pre : attempt.before) {
            if (pre.name != name)
                continue;
            for (const auto& post : attempt.after) {
                if (post.name == pre.name && post.path == pre.path && post.value == pre.value)
                    return confirmed({attempt.landing.sequence_no, tx.sequence_no, anonymous.sequence_no},
                                     "authenticated session still uses pre-login cookie " + name);
            }
        }
        return refuted(proof, "session cookie " + name + " was rotated at login");
    }
    return confirmed(proof, "logged in as " + p.detail("user") + " and reached a page anonymous users do not get");
}

Outcome verify_misconfig(const Probe& p)
{
    const auto& catalog = *p.ctx.catalog;
    auto check = p.detail("check");
    const auto& loc = p.finding.location;

    if (check == "security-headers") {
        auto tx = p.prober.send(get(page_or_location(p)));
        if (!tx.ok())
            return transport_failure(tx);
        auto missing = va::missing_headers(tx.response()->headers, catalog);
        if (missing.empty())
            return refuted({tx.sequence_no}, "all checklist headers present");
        return confirmed({tx.sequence_no}, "still missing " + missing.front());
    }
    if (check == "directory-listing") {
        auto tx = p.prober.send(get(loc.url, false));
        if (!tx.ok())
            return transport_failure(tx);
        if (tx.status() == 200 && va::strict_directory_listing(tx.body()))
            return confirmed({tx.sequence_no}, "index page with parent-directory link");
        return refuted({tx.sequence_no}, "listing text without an actual index structure");
    }
    if (check == "stack-trace") {
        auto point = va::InjectionPoint::load(p.finding.details, loc);
        auto crafted = p.detail("crafted");
        auto tx = p.prober.send(point.request(catalog.render(crafted, point.value(), p.marker(1))));
        if (!tx.ok())
            return transport_failure(tx);
        if (tx.status() >= 500 && va::contains_any(tx.body(), catalog.stack_trace_signatures))
            return confirmed({tx.sequence_no}, "crafted value reproduces the stack trace");
        return refuted({tx.sequence_no}, "no stack trace on re-probe");
    }
    if (check == "methods") {
        http::HttpRequest req = get(page_or_location(p), false);
        req.method = "OPTIONS";
        auto tx = p.prober.send(req);
        if (!tx.ok())
            return transport_failure(tx);
        auto methods = va::dangerous_methods(tx.response()->headers, catalog);
        if (methods.empty())
            return refuted({tx.sequence_no}, "no dangerous methods advertised");
        return confirmed({tx.sequence_no}, "OPTIONS advertises " + methods.front());
    }
    if (check == "default-path") {
        auto tx = p.prober.send(get(loc.url, false));
        if (!tx.ok())
            return transport_failure(tx);
        if (tx.status() == 200 && va::icontains(tx.body(), p.detail("signature")))
            return confirmed({tx.sequence_no}, "default resource still served");
        return refuted({tx.sequence_no}, "default resource not served");
    }
    return inconclusive({}, "unknown check '" + check + "'", false);
}

Outcome verify_exposure(const Probe& p)
{
    const auto& catalog = *p.ctx.catalog;
    auto check = p.detail("check");
    const auto& loc = p.finding.location;

    if (check == "backup") {
        auto tx = p.prober.send(get(loc.url, false));
        if (!tx.ok())
            return transport_failure(tx);
        if (tx.status() != 200 || !va::contains_any(tx.body(), catalog.source_signatures))
            return refuted({tx.sequence_no}, "backup no longer served");
        // A server that answers every name with the same page is not exposing a file.
        auto control = p.prober.send(get(loc.url + p.marker(1), false));
        if (!control.ok())
            return transport_failure(control);
        auto volatile_patterns = va::compile_all(catalog.volatile_patterns);
        if (control.status() == 200 &&
            va::similarity(tx.body(), control.body(), volatile_patterns) >= catalog.similarity_threshold)
            return refuted({tx.sequence_no, control.sequence_no}, "nonexistent name returns the same content");
        return confirmed({tx.sequence_no, control.sequence_no}, "source served at backup name only");
    }

    auto tx = p.prober.send(get(page_or_location(p)));
    if (!tx.ok())
        return transport_failure(tx);
    std::string body(tx.body());
    bool present = false;
    if (check == "card-number")
        present = !va::card_numbers(body, std::regex(catalog.card_pattern)).empty();
    else if (check == "private-key")
        present = va::strict_private_key(body);
    else if (check == "internal-ip")
        present = std::regex_search(body, std::regex(catalog.internal_ip_pattern));
    else if (check == "stack-trace")
        present = va::contains_any(body, catalog.stack_trace_signatures);
    else
        return inconclusive({}, "unknown check '" + check + "'", false);
    if (present)
        return confirmed({tx.sequence_no}, check + " present on re-fetch");
    return refuted({tx.sequence_no}, check + " not present under the strict check");
}

Outcome verify_comm(const Probe& p)
{
    const auto& loc = p.finding.location;
    if (loc.vector == model::Vector::Channel) {
        auto url = http::Url::parse(loc.url);
        if (!url)
            return inconclusive({}, "bad channel URL", false);
        p.prober.count();
        auto probe = http::tls_probe(p.prober.engine(), url->host, url->port, p.prober.tag());
        if (!probe.info.https_available || !probe.sequence_no)
            return inconclusive({}, "TLS endpoint not reachable");
        p.prober.count();
        std::vector<std::uint64_t> proof{*probe.sequence_no};
        bool present = false;
        if (loc.name == "certificate")
            present = !probe.info.certificate_valid || !probe.info.certificate_host_match;
        else if (loc.name == "hsts")
            present = !probe.info.hsts_present;
        else if (loc.name == "protocol")
            present = probe.info.protocol_version && http::is_legacy_protocol(*probe.info.protocol_version);
        if (present)
            return confirmed(proof, loc.name + " weakness observed again");
        return refuted(proof, loc.name + " weakness not observed");
    }

    auto tx = p.prober.send(get(page_or_location(p)));
    if (!tx.ok())
        return transport_failure(tx);
    // Resolve actions the way a browser does, honouring <base href>.
    std::string resolve_against = tx.request.url;
    if (auto base = crawl::base_href(tx.body())) {
        if (auto page = http::Url::parse(tx.request.url))
            if (auto resolved = page->resolve(*base))
                resolve_against = resolved->str();
    }
    for (const auto& form : crawl::extract_forms(tx.body(), resolve_against)) {
        const auto* input = form.input(loc.name);
        if (input == nullptr || input->kind != "password")
            continue;
        auto action = http::Url::parse(form.action_url);
        if (action && action->scheme == "http")
            return confirmed({tx.sequence_no}, "password posted to " + form.action_url);
    }
    return refuted({tx.sequence_no}, "password field is submitted over https once the page is resolved fully");
}

Outcome verify_inclusion(const Probe& p)
{
    const auto& catalog = *p.ctx.catalog;
    auto point = va::InjectionPoint::load(p.finding.details, p.finding.location);
    auto technique = p.detail("technique");

    if (technique == "remote") {
        if (p.ctx.callbacks == nullptr)
            return inconclusive({}, "no callback listener configured", false);
        auto token = p.marker(1) + "-1";
        auto payload = catalog.render(catalog.lfi_remote.templ, point.value(), p.marker(1), p.ctx.callbacks->base_url(), 1);
        auto tx = p.prober.send(point.request(payload));
        if (p.ctx.callbacks->wait_for(token, std::chrono::milliseconds(p.spec.callback_wait_ms)))
            return confirmed({tx.sequence_no}, "target fetched fresh callback token " + token);
        if (!tx.ok())
            return transport_failure(tx);
        return refuted({tx.sequence_no}, "no callback for token " + token);
    }

    std::regex line(catalog.passwd_line_pattern, std::regex::multiline);
    std::vector<va::NamedTemplate> templates;
    for (const auto& t : catalog.lfi_traversal) {
        if (technique.empty() || t.name == technique)
            templates.push_back(t);
    }
    std::vector<std::uint64_t> seen;
    for (const auto& t : templates) {
        auto tx = p.prober.send(point.request(catalog.render(t.templ, point.value(), p.marker(1))));
        if (!tx.ok())
            return transport_failure(tx);
        seen.push_back(tx.sequence_no);
        auto lines = va::passwd_lines(tx.body(), line);
        if (lines >= p.spec.min_passwd_lines)
            return confirmed({tx.sequence_no}, std::to_string(lines) + " passwd records in the response");
    }
    return refuted(seen, "fewer than " + std::to_string(p.spec.min_passwd_lines) + " passwd records");
}

Outcome verify_csrf(const Probe& p)
{
    if (p.spec.requires_state_change && !p.ctx.allow_state_change)
        return inconclusive({}, "state-changing replay not allowed", false);
    const auto& catalog = *p.ctx.catalog;
    auto page_url = page_or_location(p);

    auto before = p.prober.send(get(page_url));
    if (!before.ok())
        return transport_failure(before);

    auto fields = http::parse_query(p.detail("fields"));
    auto marker = p.marker(1);
    bool planted = false;
    for (auto& [name, value] : fields) {
        if (!crawl::is_token_like_name(name) && !planted) {
            value = marker;
            planted = true;
        }
    }
    if (!planted)
        return inconclusive({before.sequence_no}, "form has no field to carry a marker", false);

    http::HttpRequest forged;
    forged.method = p.detail("method").empty() ? "POST" : p.detail("method");
    forged.url = p.finding.location.url;
    forged.body = http::build_query(fields);
    forged.headers.emplace_back("Content-Type", "application/x-www-form-urlencoded");
    forged.headers.emplace_back("Origin", catalog.csrf_probe_origin);
    forged.headers.emplace_back("Referer", catalog.csrf_probe_origin + "/");
    forged.follow_redirects = false;
    auto post = p.prober.send(forged);
    if (!post.ok())
        return transport_failure(post);

    auto after = p.prober.send(get(page_url));
    if (!after.ok())
        return transport_failure(after);
    if (after.body().find(marker) != std::string_view::npos &&
        before.body().find(marker) == std::string_view::npos)
        return confirmed({post.sequence_no, after.sequence_no}, "cross-origin request changed state to " + marker);
    return refuted({post.sequence_no, after.sequence_no},
                   "cross-origin request was not applied (status " + std::to_string(post.status()) + ")");
}

} // namespace vapt::pt::detail
