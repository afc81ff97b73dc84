#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vapt/crawl/forms.hpp"
#include "vapt/http/cookies.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::va {

/// Field layout of a login form, enough to submit credentials.
struct LoginForm {
    std::string page_url;
    std::string action_url;
    std::string method = "POST";
    std::string username_field;
    std::string password_field;
    http::QueryParams other_fields;

    [[nodiscard]] http::HttpRequest submit(const std::string& user, const std::string& password) const;
    void store(std::map<std::string, std::string>& details) const;
    static LoginForm load(const std::map<std::string, std::string>& details, const std::string& action_url);
};

/// A form with a password input and a user-name-like text input.
std::optional<LoginForm> as_login_form(const crawl::FormDescriptor& form);

struct LoginAttempt {
    http::HttpTransaction landing;   // pre-login GET of the form page
    http::HttpTransaction response;  // final hop after submitting
    std::vector<http::Cookie> before;
    std::vector<http::Cookie> after;
};

/// Loads the form page and submits credentials with a fresh cookie jar (returned in jar).
LoginAttempt attempt_login(Prober& prober, const LoginForm& form, const std::string& user, const std::string& password,
                           http::CookieJar& jar);

/// Heuristic acceptance: no password prompt, no failure wording and a response that
/// differs from the one random credentials got.
bool looks_accepted(const http::HttpTransaction& response, const http::HttpTransaction& rejected,
                    const PayloadCatalog& catalog, const std::vector<std::string>& strip);

} // namespace vapt::va
