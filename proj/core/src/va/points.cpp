#include "vapt/va/points.hpp"

#include <set>
#include <tuple>

namespace vapt::va {

std::string InjectionPoint::value() const
{
    for (const auto& [k, v] : params) {
        if (k == name)
            return v;
    }
    return {};
}

http::HttpRequest InjectionPoint::request(std::string_view injected) const
{
    http::QueryParams fields = params;
    bool found = false;
    for (auto& [k, v] : fields) {
        if (k == name) {
            v = std::string(injected);
            found = true;
        }
    }
    if (!found)
        fields.emplace_back(name, std::string(injected));

    http::HttpRequest req;
    req.method = method;
    if (method == "GET") {
        req.url = url + "?" + http::build_query(fields);
    } else {
        req.url = url;
        req.body = http::build_query(fields);
        req.headers.emplace_back("Content-Type", "application/x-www-form-urlencoded");
    }
    return req;
}

void InjectionPoint::store(std::map<std::string, std::string>& details) const
{
    details["method"] = method;
    details["params"] = http::build_query(params);
    if (!page_url.empty())
        details["page"] = page_url;
}

InjectionPoint InjectionPoint::load(const std::map<std::string, std::string>& details, const model::Location& location)
{
    InjectionPoint p;
    p.url = location.url;
    p.vector = location.vector;
    p.name = location.name;
    auto get = [&](const char* key) {
        auto it = details.find(key);
        return it == details.end() ? std::string{} : it->second;
    };
    p.method = get("method").empty() ? (location.vector == model::Vector::FormField ? "POST" : "GET") : get("method");
    p.params = http::parse_query(get("params"));
    p.page_url = get("page");
    return p;
}

std::string sample_value(const crawl::FormInput& input)
{
    if (!input.value.empty())
        return input.value;
    if (input.kind == "email")
        return "probe@example.com";
    return "1";
}

std::vector<InjectionPoint> injection_points(const crawl::AttackSurface& surface)
{
    std::vector<InjectionPoint> out;
    std::set<std::tuple<std::string, model::Vector, std::string>> seen;
    auto add = [&](InjectionPoint p) {
        if (seen.insert({p.url, p.vector, p.name}).second)
            out.push_back(std::move(p));
    };

    for (const auto& [url, params] : surface.query_samples) {
        for (const auto& [name, value] : params) {
            InjectionPoint p;
            p.url = url;
            p.name = name;
            p.params = params;
            p.page_url = url;
            add(std::move(p));
        }
    }
    for (const auto& form : surface.forms) {
        auto action = http::Url::parse(form.action_url);
        if (!action)
            continue;
        http::QueryParams params;
        for (const auto& input : form.inputs)
            params.emplace_back(input.name, sample_value(input));
        for (const auto& input : form.inputs) {
            InjectionPoint p;
            p.url = action->without_query();
            p.method = form.method == "GET" ? "GET" : "POST";
            p.vector = form.method == "GET" ? model::Vector::Parameter : model::Vector::FormField;
            p.name = input.name;
            p.params = params;
            p.page_url = form.page_url;
            add(std::move(p));
        }
    }
    return out;
}

} // namespace vapt::va
