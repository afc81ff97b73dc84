#include "vapt/va/catalog.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "vapt/data.hpp"
#include "vapt/error.hpp"

namespace vapt::va {

namespace {

using nlohmann::json;

const json& need(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw SchemaError("catalog: missing " + where + "." + key);
    return j.at(key);
}

std::vector<std::string> strings(const json& j, const char* key, const std::string& where)
{
    try {
        return need(j, key, where).get<std::vector<std::string>>();
    } catch (const json::exception&) {
        throw SchemaError("catalog: " + where + "." + key + " must be a list of strings");
    }
}

std::string string(const json& j, const char* key, const std::string& where)
{
    const auto& v = need(j, key, where);
    if (!v.is_string())
        throw SchemaError("catalog: " + where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<SqliPair> pairs(const json& j, const char* key)
{
    std::vector<SqliPair> out;
    for (const auto& p : need(j, key, "sqli"))
        out.push_back({string(p, "context", "sqli pair"), string(p, "true", "sqli pair"), string(p, "false", "sqli pair")});
    return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to)
{
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

} // namespace

PayloadCatalog PayloadCatalog::from_json(const json& doc)
{
    if (!doc.is_object() || doc.value("schema", "") != "vapt.catalog/1")
        throw SchemaError("catalog: expected schema vapt.catalog/1");
    PayloadCatalog c;
    try {
        for (const auto& t : need(need(doc, "xss", ""), "templates", "xss")) {
            XssTemplate x{string(t, "name", "xss template"), string(t, "template", "xss template"),
                          string(t, "marker", "xss template"), t.value("channels", std::vector<std::string>{})};
            if (x.templ.find("{M}") == std::string::npos)
                throw SchemaError("catalog: xss template " + x.name + " lacks {M}");
            c.xss.push_back(std::move(x));
        }

        const auto& sqli = need(doc, "sqli", "");
        for (const auto& p : need(sqli, "error_payloads", "sqli"))
            c.sqli_error.push_back({"", string(p, "template", "sqli error payload")});
        c.sqli_error_signatures = strings(sqli, "error_signatures", "sqli");
        c.sqli_boolean = pairs(sqli, "boolean_pairs");
        c.sqli_confirm = pairs(sqli, "confirm_pairs");
        for (const auto& p : need(sqli, "time_payloads", "sqli"))
            c.sqli_time.push_back({string(p, "context", "sqli time"), string(p, "template", "sqli time")});
        c.similarity_threshold = sqli.value("similarity_threshold", 0.95);
        if (sqli.contains("time")) {
            const auto& t = sqli["time"];
            c.time.delay_seconds = t.value("delay_seconds", c.time.delay_seconds);
            c.time.min_extra_ms = t.value("min_extra_ms", c.time.min_extra_ms);
            c.time.mad_factor = t.value("mad_factor", c.time.mad_factor);
            c.time.baseline_samples = t.value("baseline_samples", c.time.baseline_samples);
            c.time.repeats = t.value("repeats", c.time.repeats);
        }

        const auto& lfi = need(doc, "lfi", "");
        for (const auto& t : need(lfi, "traversal", "lfi"))
            c.lfi_traversal.push_back({string(t, "name", "lfi"), string(t, "template", "lfi")});
        const auto& remote = need(lfi, "remote", "lfi");
        c.lfi_remote = {string(remote, "name", "lfi.remote"), string(remote, "template", "lfi.remote")};
        c.lfi_marker_pattern = string(lfi, "marker_pattern", "lfi");
        c.passwd_line_pattern = string(lfi, "passwd_line_pattern", "lfi");
        c.min_passwd_lines = lfi.value("min_passwd_lines", 3);
        c.callback_grace_ms = lfi.value("callback_grace_ms", 500);

        const auto& auth = need(doc, "auth", "");
        for (const auto& pair : need(auth, "default_credentials", "auth")) {
            if (!pair.is_array() || pair.size() != 2)
                throw SchemaError("catalog: auth.default_credentials entries must be [user, password]");
            c.default_credentials.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
        }
        c.failure_keywords = strings(auth, "failure_keywords", "auth");
        c.success_keywords = strings(auth, "success_keywords", "auth");

        const auto& mis = need(doc, "misconfig", "");
        c.required_headers = strings(mis, "required_headers", "misconfig");
        c.listing_signatures = strings(mis, "listing_signatures", "misconfig");
        c.stack_trace_signatures = strings(mis, "stack_trace_signatures", "misconfig");
        c.crafted_values = strings(mis, "crafted_values", "misconfig");
        c.dangerous_methods = strings(mis, "dangerous_methods", "misconfig");
        for (const auto& p : need(mis, "default_paths", "misconfig"))
            c.default_paths.push_back({string(p, "path", "default path"), string(p, "signature", "default path")});

        const auto& exp = need(doc, "exposure", "");
        c.backup_suffixes = strings(exp, "backup_suffixes", "exposure");
        c.source_signatures = strings(exp, "source_signatures", "exposure");
        c.private_key_pattern = string(exp, "private_key_pattern", "exposure");
        c.internal_ip_pattern = string(exp, "internal_ip_pattern", "exposure");
        c.card_pattern = string(exp, "card_pattern", "exposure");

        if (doc.contains("csrf"))
            c.csrf_probe_origin = doc["csrf"].value("probe_origin", c.csrf_probe_origin);
        c.volatile_patterns = doc.value("volatile_patterns", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw SchemaError(std::string("catalog: ") + e.what());
    }
    if (c.xss.empty() || c.sqli_error.empty() || c.sqli_boolean.empty() || c.lfi_traversal.empty())
        throw SchemaError("catalog: xss, sqli and lfi payload lists must be non-empty");
    return c;
}

PayloadCatalog PayloadCatalog::bundled()
{
    auto text = data::bundled("catalog.json");
    if (!text)
        throw Error("bundled catalog.json missing");
    return from_json(json::parse(*text));
}

std::string PayloadCatalog::render(std::string_view templ, std::string_view value, std::string_view marker_override,
                                   std::string_view callback, int counter) const
{
    std::string out(templ);
    replace_all(out, "{M}", marker_override.empty() ? std::string_view(marker) : marker_override);
    replace_all(out, "{V}", value);
    replace_all(out, "{S}", std::to_string(time.delay_seconds));
    replace_all(out, "{CB}", callback);
    replace_all(out, "{N}", std::to_string(counter));
    return out;
}

std::string make_marker(std::optional<std::uint64_t> seed)
{
    static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::mt19937_64 rng(seed ? *seed : std::random_device{}());
    std::uniform_int_distribution<int> pick(0, 35);
    std::string out = "vx";
    for (int i = 0; i < 8; ++i)
        out += alphabet[pick(rng)];
    return out;
}

} // namespace vapt::va
