#include "vapt/va/signals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "vapt/crawl/html.hpp"
#include "vapt/http/types.hpp"

namespace vapt::va {

bool icontains(std::string_view haystack, std::string_view needle)
{
    if (needle.empty())
        return true;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
    return it != haystack.end();
}

bool contains_any(std::string_view haystack, const std::vector<std::string>& needles)
{
    return std::any_of(needles.begin(), needles.end(), [&](const std::string& n) { return icontains(haystack, n); });
}

bool reflected_outside_comment(std::string_view body, std::string_view needle)
{
    for (auto pos = body.find(needle); pos != std::string_view::npos; pos = body.find(needle, pos + 1)) {
        auto open = body.rfind("<!--", pos);
        bool in_comment = open != std::string_view::npos && body.find("-->", open) > pos;
        if (!in_comment)
            return true;
    }
    return false;
}

bool executable_reflection(std::string_view body, std::string_view marker)
{
    std::string call = std::string(marker) + "()";
    for (const auto& t : crawl::tokenize(body)) {
        if (t.kind != crawl::TokenKind::StartTag)
            continue;
        for (const auto& [name, value] : t.attributes) {
            if (name.size() > 2 && name.compare(0, 2, "on") == 0 && value.find(call) != std::string::npos)
                return true;
        }
    }
    return false;
}

std::vector<std::regex> compile_all(const std::vector<std::string>& patterns)
{
    std::vector<std::regex> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns)
        out.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
    return out;
}

std::set<std::string> word_tokens(std::string_view text, const std::vector<std::regex>& volatile_patterns)
{
    std::string cleaned = crawl::decode_entities(text);
    for (const auto& re : volatile_patterns)
        cleaned = std::regex_replace(cleaned, re, " ");
    std::set<std::string> tokens;
    std::string current;
    for (char c : cleaned) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            tokens.insert(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.insert(std::move(current));
    return tokens;
}

double similarity(std::string_view a, std::string_view b, const std::vector<std::regex>& volatile_patterns,
                  const std::vector<std::string>& strip)
{
    auto ta = word_tokens(a, volatile_patterns);
    auto tb = word_tokens(b, volatile_patterns);
    for (const auto& s : strip) {
        for (const auto& tok : word_tokens(s, {})) {
            ta.erase(tok);
            tb.erase(tok);
        }
    }
    if (ta.empty() && tb.empty())
        return 1.0;
    std::size_t common = 0;
    for (const auto& t : ta)
        common += tb.count(t);
    return static_cast<double>(common) / static_cast<double>(ta.size() + tb.size() - common);
}

bool luhn_valid(std::string_view digits)
{
    if (digits.size() < 13 || digits.size() > 19)
        return false;
    int sum = 0;
    bool twice = false;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (!std::isdigit(static_cast<unsigned char>(*it)))
            return false;
        int d = *it - '0';
        if (twice) {
            d *= 2;
            if (d > 9)
                d -= 9;
        }
        sum += d;
        twice = !twice;
    }
    return sum % 10 == 0;
}

std::vector<std::string> card_numbers(std::string_view text, const std::regex& pattern)
{
    std::vector<std::string> out;
    std::string s(text);
    for (std::sregex_iterator it(s.begin(), s.end(), pattern), end; it != end; ++it) {
        std::string digits;
        for (char c : it->str()) {
            if (std::isdigit(static_cast<unsigned char>(c)))
                digits += c;
        }
        if (luhn_valid(digits))
            out.push_back(digits);
    }
    return out;
}

int passwd_lines(std::string_view text, const std::regex& line_pattern)
{
    int count = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (std::regex_search(line, line_pattern))
            ++count;
    }
    return count;
}

bool strict_directory_listing(std::string_view body)
{
    auto title = crawl::title_of(body);
    if (!title || title->rfind("Index of", 0) != 0)
        return false;
    for (const auto& ref : crawl::link_references(body)) {
        if (ref == "../" || ref == "..")
            return true;
    }
    return icontains(body, "Parent Directory");
}

bool strict_private_key(std::string_view body)
{
    static const std::regex block(
        "-----BEGIN ((?:RSA |EC |DSA |OPENSSH |ENCRYPTED )?PRIVATE KEY)-----\\r?\\n"
        "((?:[A-Za-z0-9+/=]{16,}\\r?\\n)+)"
        "-----END \\1-----");
    std::string s(body);
    return std::regex_search(s, block);
}

double median(std::vector<double> values)
{
    if (values.empty())
        return 0.0;
    std::sort(values.begin(), values.end());
    auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double median_absolute_deviation(const std::vector<double>& values)
{
    auto m = median(values);
    std::vector<double> dev;
    dev.reserve(values.size());
    for (double v : values)
        dev.push_back(std::abs(v - m));
    return median(std::move(dev));
}

} // namespace vapt::va
