#include "vapt/http/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace vapt::http {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_scheme_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

// Splits "scheme:" off a reference; empty when the reference is relative.
std::string_view scheme_of(std::string_view ref)
{
    auto colon = ref.find(':');
    if (colon == std::string_view::npos || colon == 0)
        return {};
    if (!std::isalpha(static_cast<unsigned char>(ref[0])))
        return {};
    for (std::size_t i = 0; i < colon; ++i) {
        if (!is_scheme_char(ref[i]))
            return {};
    }
    return ref.substr(0, colon);
}

std::string merge_paths(const Url& base, std::string_view ref_path)
{
    if (base.path.empty())
        return "/" + std::string(ref_path);
    auto slash = base.path.rfind('/');
    if (slash == std::string::npos)
        return std::string(ref_path);
    return base.path.substr(0, slash + 1) + std::string(ref_path);
}

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace

std::optional<Url> Url::parse(std::string_view text)
{
    // Trim surrounding whitespace, which shows up in scraped attributes.
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);

    auto scheme = lower(scheme_of(text));
    if (scheme != "http" && scheme != "https")
        return std::nullopt;
    std::string_view rest = text.substr(scheme.size() + 1);
    if (rest.substr(0, 2) != "//")
        return std::nullopt;
    rest.remove_prefix(2);

    if (auto hash = rest.find('#'); hash != std::string_view::npos)
        rest = rest.substr(0, hash);

    auto auth_end = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, auth_end);
    std::string_view tail = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

    if (auto at = authority.rfind('@'); at != std::string_view::npos)
        authority.remove_prefix(at + 1);

    Url url;
    url.scheme = scheme;
    std::string_view host = authority;
    std::string_view port_text;
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos)
            return std::nullopt;
        host = authority.substr(0, close + 1);
        if (close + 1 < authority.size()) {
            if (authority[close + 1] != ':')
                return std::nullopt;
            port_text = authority.substr(close + 2);
        }
    } else if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        host = authority.substr(0, colon);
        port_text = authority.substr(colon + 1);
    }
    if (host.empty())
        return std::nullopt;
    url.host = lower(host);
    url.port = url.default_port();
    if (!port_text.empty()) {
        int port = 0;
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port <= 0 || port > 65535)
            return std::nullopt;
        url.port = port;
    }

    auto q = tail.find('?');
    std::string_view path = tail.substr(0, q);
    if (q != std::string_view::npos) {
        url.has_query = true;
        url.query = std::string(tail.substr(q + 1));
    }
    url.path = path.empty() ? "/" : remove_dot_segments(path);
    if (url.path.empty() || url.path.front() != '/')
        url.path.insert(url.path.begin(), '/');
    return url;
}

std::string Url::authority() const
{
    if (port == default_port())
        return host;
    return host + ":" + std::to_string(port);
}

std::string Url::origin() const { return scheme + "://" + authority(); }

std::string Url::str() const
{
    std::string out = origin() + path;
    if (has_query)
        out += "?" + query;
    return out;
}

std::string Url::without_query() const { return origin() + path; }

std::string Url::path_and_query() const
{
    if (has_query)
        return path + "?" + query;
    return path;
}

std::optional<Url> Url::resolve(std::string_view reference) const
{
    while (!reference.empty() && std::isspace(static_cast<unsigned char>(reference.front())))
        reference.remove_prefix(1);
    while (!reference.empty() && std::isspace(static_cast<unsigned char>(reference.back())))
        reference.remove_suffix(1);
    if (auto hash = reference.find('#'); hash != std::string_view::npos)
        reference = reference.substr(0, hash);

    if (!scheme_of(reference).empty())
        return Url::parse(reference);
    if (reference.substr(0, 2) == "//")
        return Url::parse(scheme + ":" + std::string(reference));

    Url out = *this;
    if (reference.empty())
        return out;

    std::string_view ref_path = reference;
    std::string_view ref_query;
    bool has_query = false;
    if (auto q = reference.find('?'); q != std::string_view::npos) {
        ref_path = reference.substr(0, q);
        ref_query = reference.substr(q + 1);
        has_query = true;
    }

    if (ref_path.empty()) {
        if (has_query) {
            out.query = std::string(ref_query);
            out.has_query = true;
        }
        return out;
    }
    if (ref_path.front() == '/')
        out.path = remove_dot_segments(ref_path);
    else
        out.path = remove_dot_segments(merge_paths(*this, ref_path));
    if (out.path.empty() || out.path.front() != '/')
        out.path.insert(out.path.begin(), '/');
    out.query = std::string(ref_query);
    out.has_query = has_query;
    return out;
}

std::string remove_dot_segments(std::string_view input)
{
    std::string in(input);
    std::string out;
    while (!in.empty()) {
        if (in.rfind("../", 0) == 0) {
            in.erase(0, 3);
        } else if (in.rfind("./", 0) == 0) {
            in.erase(0, 2);
        } else if (in.rfind("/./", 0) == 0) {
            in.erase(0, 2);
        } else if (in == "/.") {
            in = "/";
        } else if (in.rfind("/../", 0) == 0 || in == "/..") {
            in = in == "/.." ? "/" : in.substr(3);
            auto slash = out.rfind('/');
            out.erase(slash == std::string::npos ? 0 : slash);
        } else if (in == "." || in == "..") {
            in.clear();
        } else {
            auto start = in.front() == '/' ? 1u : 0u;
            auto next = in.find('/', start);
            out += in.substr(0, next);
            in.erase(0, next == std::string::npos ? in.size() : next);
        }
    }
    return out;
}

std::string canonicalize(const Url& url)
{
    std::string out = url.origin() + url.path;
    if (url.has_query && !url.query.empty()) {
        auto params = parse_query(url.query);
        std::stable_sort(params.begin(), params.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        out += "?" + build_query(params);
    }
    return out;
}

std::optional<std::string> canonicalize(std::string_view url)
{
    auto parsed = Url::parse(url);
    if (!parsed)
        return std::nullopt;
    return canonicalize(*parsed);
}

std::string location_key(std::string_view url)
{
    auto parsed = Url::parse(url);
    if (!parsed)
        return std::string(url);
    return parsed->without_query();
}

std::string percent_encode(std::string_view text)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size() * 3);
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else if (c == ' ') {
            out += '+';
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0x0F];
        }
    }
    return out;
}

std::string percent_decode(std::string_view text, bool plus_as_space)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '+' && plus_as_space) {
            out += ' ';
        } else if (c == '%' && i + 2 < text.size()) {
            int hi = hex_value(text[i + 1]);
            int lo = hex_value(text[i + 2]);
            if (hi < 0 || lo < 0) {
                out += c;
            } else {
                out += static_cast<char>(hi * 16 + lo);
                i += 2;
            }
        } else {
            out += c;
        }
    }
    return out;
}

QueryParams parse_query(std::string_view query)
{
    QueryParams params;
    while (!query.empty()) {
        auto amp = query.find('&');
        std::string_view pair = query.substr(0, amp);
        query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
        if (pair.empty())
            continue;
        auto eq = pair.find('=');
        if (eq == std::string_view::npos)
            params.emplace_back(percent_decode(pair), "");
        else
            params.emplace_back(percent_decode(pair.substr(0, eq)), percent_decode(pair.substr(eq + 1)));
    }
    return params;
}

std::string build_query(const QueryParams& params)
{
    std::string out;
    for (const auto& [name, value] : params) {
        if (!out.empty())
            out += '&';
        out += percent_encode(name);
        out += '=';
        out += percent_encode(value);
    }
    return out;
}

} // namespace vapt::http
