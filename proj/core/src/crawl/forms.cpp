#include "vapt/crawl/forms.hpp"

#include <algorithm>
#include <array>

#include "vapt/crawl/html.hpp"
#include "vapt/http/types.hpp"
#include "vapt/http/url.hpp"

namespace vapt::crawl {

namespace {

constexpr std::array<std::string_view, 5> kTokenWords{"token", "csrf", "xsrf", "nonce", "authenticity"};

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

void add_input(FormDescriptor& form, FormInput input)
{
    if (input.name.empty() || form.input(input.name) != nullptr)
        return;
    if (input.kind == "hidden" && is_token_like_name(input.name))
        form.has_token_like_field = true;
    form.inputs.push_back(std::move(input));
}

} // namespace

bool FormDescriptor::has_password() const
{
    return std::any_of(inputs.begin(), inputs.end(), [](const FormInput& i) { return i.kind == "password"; });
}

const FormInput* FormDescriptor::input(std::string_view name) const
{
    for (const auto& i : inputs) {
        if (i.name == name)
            return &i;
    }
    return nullptr;
}

bool is_token_like_name(std::string_view name)
{
    auto lowered = http::to_lower(name);
    return std::any_of(kTokenWords.begin(), kTokenWords.end(),
                       [&](std::string_view w) { return lowered.find(w) != std::string::npos; });
}

std::vector<FormDescriptor> extract_forms(std::string_view html, std::string_view page_url)
{
    std::vector<FormDescriptor> forms;
    auto page = http::Url::parse(page_url);
    if (!page)
        return forms;

    auto tokens = tokenize(html);
    bool open = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind == TokenKind::StartTag && t.name == "form") {
            FormDescriptor form;
            form.page_url = page->str();
            auto action = t.attr("action").value_or("");
            auto resolved = action.empty() ? page : page->resolve(action);
            if (!resolved)
                continue;   // javascript: and other non-http actions
            form.action_url = resolved->str();
            form.method = upper(t.attr("method").value_or("GET"));
            if (form.method.empty())
                form.method = "GET";
            form.state_changing = form.method != "GET";
            forms.push_back(std::move(form));
            open = true;
            continue;
        }
        if (t.kind == TokenKind::EndTag && t.name == "form") {
            open = false;
            continue;
        }
        if (!open || t.kind != TokenKind::StartTag)
            continue;

        auto& form = forms.back();
        if (t.name == "input") {
            auto type = http::to_lower(t.attr("type").value_or("text"));
            if (type == "submit" || type == "button" || type == "reset" || type == "image")
                continue;
            add_input(form, {t.attr("name").value_or(""), type, t.attr("value").value_or("")});
        } else if (t.name == "textarea") {
            std::string value;
            if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Text && !tokens[i + 1].raw_container.empty())
                value = decode_entities(tokens[i + 1].text);
            add_input(form, {t.attr("name").value_or(""), "textarea", value});
        } else if (t.name == "select") {
            std::string value;
            for (std::size_t k = i + 1; k < tokens.size(); ++k) {
                if (tokens[k].kind == TokenKind::EndTag && tokens[k].name == "select")
                    break;
                if (tokens[k].kind == TokenKind::StartTag && tokens[k].name == "option") {
                    value = tokens[k].attr("value").value_or("");
                    break;
                }
            }
            add_input(form, {t.attr("name").value_or(""), "select", value});
        }
    }
    return forms;
}

} // namespace vapt::crawl
