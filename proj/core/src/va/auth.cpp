#include "vapt/va/auth.hpp"

#include "common.hpp"
#include "vapt/crawl/html.hpp"
#include "vapt/crawl/forms.hpp"
#include "vapt/va/signals.hpp"

namespace vapt::va {

using namespace detail;

namespace {

bool has_password_prompt(std::string_view body)
{
    for (const auto& t : crawl::tokenize(body)) {
        if (t.kind == crawl::TokenKind::StartTag && t.name == "input" &&
            http::to_lower(t.attr("type").value_or("")) == "password")
            return true;
    }
    return false;
}

} // namespace

http::HttpRequest LoginForm::submit(const std::string& user, const std::string& password) const
{
    http::QueryParams fields = other_fields;
    fields.emplace_back(username_field, user);
    fields.emplace_back(password_field, password);
    http::HttpRequest req;
    req.method = method;
    if (method == "GET") {
        req.url = action_url + "?" + http::build_query(fields);
    } else {
        req.url = action_url;
        req.body = http::build_query(fields);
        req.headers.emplace_back("Content-Type", "application/x-www-form-urlencoded");
    }
    return req;
}

void LoginForm::store(std::map<std::string, std::string>& details) const
{
    details["page"] = page_url;
    details["method"] = method;
    details["username_field"] = username_field;
    details["password_field"] = password_field;
    details["params"] = http::build_query(other_fields);
}

LoginForm LoginForm::load(const std::map<std::string, std::string>& details, const std::string& action_url)
{
    auto get = [&](const char* key) {
        auto it = details.find(key);
        return it == details.end() ? std::string{} : it->second;
    };
    LoginForm f;
    f.action_url = action_url;
    f.page_url = get("page").empty() ? action_url : get("page");
    f.method = get("method").empty() ? "POST" : get("method");
    f.username_field = get("username_field");
    f.password_field = get("password_field");
    f.other_fields = http::parse_query(get("params"));
    return f;
}

std::optional<LoginForm> as_login_form(const crawl::FormDescriptor& form)
{
    LoginForm login;
    login.page_url = form.page_url;
    login.action_url = form.action_url;
    login.method = form.method == "GET" ? "GET" : "POST";
    for (const auto& input : form.inputs) {
        if (input.kind == "password" && login.password_field.empty())
            login.password_field = input.name;
        else if ((input.kind == "text" || input.kind == "email") && login.username_field.empty())
            login.username_field = input.name;
        else if (input.kind != "password")
            login.other_fields.emplace_back(input.name, input.value);
    }
    if (login.password_field.empty() || login.username_field.empty())
        return std::nullopt;
    return login;
}

LoginAttempt attempt_login(Prober& prober, const LoginForm& form, const std::string& user, const std::string& password,
                           http::CookieJar& jar)
{
    LoginAttempt attempt;
    jar.clear();
    http::HttpRequest page;
    page.url = form.page_url;
    attempt.landing = prober.send(page, &jar);
    attempt.before = jar.all();
    attempt.response = prober.send(form.submit(user, password), &jar);
    attempt.after = jar.all();
    return attempt;
}

bool looks_accepted(const http::HttpTransaction& response, const http::HttpTransaction& rejected,
                    const PayloadCatalog& catalog, const std::vector<std::string>& strip)
{
    if (!response.ok() || response.status() >= 400)
        return false;
    auto body = response.body();
    if (has_password_prompt(body) || contains_any(body, catalog.failure_keywords))
        return false;
    if (!rejected.ok())
        return true;
    auto volatile_patterns = compile_all(catalog.volatile_patterns);
    return similarity(body, rejected.body(), volatile_patterns, strip) < catalog.similarity_threshold;
}

DetectorReport detect_broken_auth(const crawl::AttackSurface& surface, const ScanContext& ctx)
{
    DetectorReport report;
    report.cls = model::VulnCode::V3;
    Prober prober(*ctx.engine, tag_for(report.cls));
    const auto& catalog = *ctx.catalog;

    for (const auto& form : surface.forms) {
        auto login = as_login_form(form);
        if (!login)
            continue;
        model::Location creds_location{http::location_key(login->action_url), model::Vector::Form, "default-credentials"};

        http::CookieJar jar;
        auto random_user = "u" + catalog.marker;
        auto random_pass = "p" + catalog.marker;
        auto rejected = attempt_login(prober, *login, random_user, random_pass, jar);

        bool accepted = false;
        for (const auto& [user, password] : catalog.default_credentials) {
            auto attempt = attempt_login(prober, *login, user, password, jar);
            if (!looks_accepted(attempt.response, rejected.response, catalog,
                                {user, password, random_user, random_pass}))
                continue;
            accepted = true;
            auto f = suspect(report.cls, creds_location, "Default credentials accepted",
                             {rejected.response.sequence_no, attempt.response.sequence_no},
                             "login accepted " + user + "/" + password);
            login->store(f.details);
            f.details["user"] = user;
            f.details["password"] = password;
            report.findings.push_back(std::move(f));

            for (const auto& pre : attempt.before) {
                bool kept = std::any_of(attempt.after.begin(), attempt.after.end(), [&](const http::Cookie& c) {
                    return c.name == pre.name && c.path == pre.path && c.value == pre.value;
                });
                if (!kept)
                    continue;
                auto fx = suspect(report.cls, {http::location_key(login->action_url), model::Vector::Cookie, pre.name},
                                  "Session fixation", {attempt.landing.sequence_no, attempt.response.sequence_no},
                                  "cookie " + pre.name + " keeps its pre-login value after authentication");
                login->store(fx.details);
                fx.details["user"] = user;
                fx.details["password"] = password;
                fx.details["cookie"] = pre.name;
                report.findings.push_back(std::move(fx));
            }
            break;
        }
        if (!accepted)
            mark_clean(report, creds_location);
    }
    report.probes_sent = prober.sent();
    report.negative_probe_points = static_cast<int>(report.clean_locations.size());
    return report;
}

} // namespace vapt::va
