#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vapt::crawl {

struct FormInput {
    std::string name;
    std::string kind;    // input type ("text", "hidden", "password"...), "textarea" or "select"
    std::string value;   // default value as served

    bool operator==(const FormInput&) const = default;
};

struct FormDescriptor {
    std::string page_url;     // page the form was found on
    std::string action_url;   // absolute
    std::string method = "GET";
    std::vector<FormInput> inputs;
    bool state_changing = false;
    bool has_token_like_field = false;

    [[nodiscard]] bool has_password() const;
    [[nodiscard]] const FormInput* input(std::string_view name) const;

    bool operator==(const FormDescriptor&) const = default;
};

/// Hidden-field names treated as anti-CSRF tokens: any of token, csrf, xsrf, nonce,
/// authenticity as a case-insensitive substring.
bool is_token_like_name(std::string_view name);

/// One descriptor per <form>. Relative actions resolve against page_url (a <base>
/// element is deliberately not consulted); a missing or empty action means page_url.
std::vector<FormDescriptor> extract_forms(std::string_view html, std::string_view page_url);

} // namespace vapt::crawl
