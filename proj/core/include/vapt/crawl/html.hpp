#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vapt::crawl {

enum class TokenKind { StartTag, EndTag, Text, Comment, Doctype };

struct HtmlToken {
    TokenKind kind = TokenKind::Text;
    std::string name;   // lowercase tag name for tags
    std::vector<std::pair<std::string, std::string>> attributes;   // lowercase names, decoded values
    std::string text;   // text/comment content (entities not decoded)
    bool self_closing = false;
    /// Set for Text tokens that sit inside a raw-text or RCDATA element (script, style, textarea, title...).
    std::string raw_container;
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::optional<std::string> attr(std::string_view name) const;
};

/// Tolerant HTML tokenizer following the HTML5 tokenization states closely enough
/// to tell markup from inert text: comments, raw-text elements (script, style, xmp,
/// iframe, noembed, noframes) and RCDATA elements (textarea, title) are honored.
/// Malformed fragments are emitted as text rather than rejected.
std::vector<HtmlToken> tokenize(std::string_view html);

std::string decode_entities(std::string_view text);
std::string escape_html(std::string_view text);

/// Text content of the first <title> element, if any.
std::optional<std::string> title_of(std::string_view html);

/// href/src/action attribute values in document order.
std::vector<std::string> link_references(std::string_view html);

/// The href of the first <base> element, if any.
std::optional<std::string> base_href(std::string_view html);

} // namespace vapt::crawl
