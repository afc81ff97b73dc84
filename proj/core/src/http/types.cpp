#include "vapt/http/types.hpp"

#include <algorithm>
#include <cctype>

namespace vapt::http {

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<std::string> header_value(const Headers& headers, std::string_view name)
{
    for (const auto& [key, value] : headers) {
        if (iequals(key, name))
            return value;
    }
    return std::nullopt;
}

std::vector<std::string> header_values(const Headers& headers, std::string_view name)
{
    std::vector<std::string> out;
    for (const auto& [key, value] : headers) {
        if (iequals(key, name))
            out.push_back(value);
    }
    return out;
}

void set_header(Headers& headers, std::string_view name, std::string value)
{
    std::erase_if(headers, [&](const auto& h) { return iequals(h.first, name); });
    headers.emplace_back(std::string(name), std::move(value));
}

} // namespace vapt::http
