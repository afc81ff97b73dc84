#include "vapt/crawl/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace vapt::crawl {

namespace {

constexpr std::array<std::string_view, 8> kRawContainers{"script", "style",    "xmp",      "iframe",
                                                          "noembed", "noframes", "textarea", "title"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from)
{
    if (needle.empty() || haystack.size() < needle.size())
        return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < needle.size(); ++k) {
            if (lower(haystack[i + k]) != lower(needle[k])) {
                match = false;
                break;
            }
        }
        if (match)
            return i;
    }
    return std::string_view::npos;
}

void append_utf8(std::string& out, unsigned long cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x110000) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Tokenizer {
public:
    explicit Tokenizer(std::string_view html) : html_(html) {}

    std::vector<HtmlToken> run()
    {
        while (pos_ < html_.size()) {
            if (html_[pos_] == '<' && try_markup())
                continue;
            text_until_markup();
        }
        flush_text();
        return std::move(tokens_);
    }

private:
    void text_until_markup()
    {
        if (text_start_ == std::string_view::npos)
            text_start_ = pos_;
        ++pos_;
        while (pos_ < html_.size() && html_[pos_] != '<')
            ++pos_;
    }

    void flush_text()
    {
        if (text_start_ == std::string_view::npos)
            return;
        HtmlToken t;
        t.kind = TokenKind::Text;
        t.begin = text_start_;
        t.end = pos_;
        t.text = std::string(html_.substr(text_start_, pos_ - text_start_));
        tokens_.push_back(std::move(t));
        text_start_ = std::string_view::npos;
    }

    bool try_markup()
    {
        std::string_view rest = html_.substr(pos_);
        if (rest.starts_with("<!--")) {
            flush_text();
            auto close = html_.find("-->", pos_ + 4);
            HtmlToken t;
            t.kind = TokenKind::Comment;
            t.begin = pos_;
            t.end = close == std::string_view::npos ? html_.size() : close + 3;
            auto body_end = close == std::string_view::npos ? html_.size() : close;
            t.text = std::string(html_.substr(pos_ + 4, body_end - std::min(body_end, pos_ + 4)));
            tokens_.push_back(std::move(t));
            pos_ = tokens_.back().end;
            return true;
        }
        if (rest.starts_with("<!") || rest.starts_with("<?")) {
            flush_text();
            auto close = html_.find('>', pos_ + 2);
            HtmlToken t;
            t.kind = ifind(rest.substr(0, 9), "<!doctype", 0) == 0 ? TokenKind::Doctype : TokenKind::Comment;
            t.begin = pos_;
            t.end = close == std::string_view::npos ? html_.size() : close + 1;
            t.text = std::string(html_.substr(pos_ + 2, t.end - pos_ - 2 - (close == std::string_view::npos ? 0 : 1)));
            tokens_.push_back(std::move(t));
            pos_ = tokens_.back().end;
            return true;
        }
        if (rest.size() >= 3 && rest[1] == '/' && is_alpha(rest[2]))
            return end_tag();
        if (rest.size() >= 2 && is_alpha(rest[1]))
            return start_tag();
        return false;
    }

    std::string read_name(std::size_t& i) const
    {
        std::string name;
        while (i < html_.size() && !is_space(html_[i]) && html_[i] != '/' && html_[i] != '>')
            name += lower(html_[i++]);
        return name;
    }

    bool end_tag()
    {
        std::size_t i = pos_ + 2;
        std::string name = read_name(i);
        auto close = html_.find('>', i);
        if (close == std::string_view::npos)
            return false;
        flush_text();
        HtmlToken t;
        t.kind = TokenKind::EndTag;
        t.name = std::move(name);
        t.begin = pos_;
        t.end = close + 1;
        tokens_.push_back(std::move(t));
        pos_ = close + 1;
        return true;
    }

    bool start_tag()
    {
        std::size_t i = pos_ + 1;
        HtmlToken t;
        t.kind = TokenKind::StartTag;
        t.name = read_name(i);
        while (true) {
            while (i < html_.size() && (is_space(html_[i]) || html_[i] == '/')) {
                if (html_[i] == '/' && i + 1 < html_.size() && html_[i + 1] == '>')
                    t.self_closing = true;
                ++i;
            }
            if (i >= html_.size())
                return false;   // EOF inside a tag: the tag is dropped, the bytes stay text
            if (html_[i] == '>')
                break;
            std::string attr_name;
            // The first character may be '=' per the HTML5 attribute-name state.
            attr_name += lower(html_[i++]);
            while (i < html_.size() && !is_space(html_[i]) && html_[i] != '/' && html_[i] != '>' && html_[i] != '=')
                attr_name += lower(html_[i++]);
            while (i < html_.size() && is_space(html_[i]))
                ++i;
            std::string value;
            if (i < html_.size() && html_[i] == '=') {
                ++i;
                while (i < html_.size() && is_space(html_[i]))
                    ++i;
                if (i < html_.size() && (html_[i] == '"' || html_[i] == '\'')) {
                    char quote = html_[i++];
                    auto close = html_.find(quote, i);
                    if (close == std::string_view::npos)
                        return false;
                    value = std::string(html_.substr(i, close - i));
                    i = close + 1;
                } else {
                    while (i < html_.size() && !is_space(html_[i]) && html_[i] != '>')
                        value += html_[i++];
                }
            }
            bool duplicate = std::any_of(t.attributes.begin(), t.attributes.end(),
                                         [&](const auto& a) { return a.first == attr_name; });
            if (!duplicate)
                t.attributes.emplace_back(std::move(attr_name), decode_entities(value));
        }
        flush_text();
        t.begin = pos_;
        t.end = i + 1;
        pos_ = i + 1;
        std::string name = t.name;
        tokens_.push_back(std::move(t));

        if (std::find(kRawContainers.begin(), kRawContainers.end(), name) != kRawContainers.end())
            raw_content(name);
        return true;
    }

    void raw_content(const std::string& container)
    {
        std::size_t search = pos_;
        std::size_t close = std::string_view::npos;
        while (true) {
            close = ifind(html_, "</" + container, search);
            if (close == std::string_view::npos)
                break;
            std::size_t after = close + 2 + container.size();
            if (after >= html_.size() || is_space(html_[after]) || html_[after] == '>' || html_[after] == '/')
                break;
            search = close + 1;
        }
        std::size_t content_end = close == std::string_view::npos ? html_.size() : close;
        if (content_end > pos_) {
            HtmlToken t;
            t.kind = TokenKind::Text;
            t.raw_container = container;
            t.begin = pos_;
            t.end = content_end;
            t.text = std::string(html_.substr(pos_, content_end - pos_));
            tokens_.push_back(std::move(t));
        }
        pos_ = content_end;
    }

    std::string_view html_;
    std::size_t pos_ = 0;
    std::size_t text_start_ = std::string_view::npos;
    std::vector<HtmlToken> tokens_;
};

} // namespace

std::optional<std::string> HtmlToken::attr(std::string_view attr_name) const
{
    for (const auto& [k, v] : attributes) {
        if (k == attr_name)
            return v;
    }
    return std::nullopt;
}

std::vector<HtmlToken> tokenize(std::string_view html) { return Tokenizer(html).run(); }

std::string decode_entities(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out += text[i];
            continue;
        }
        auto semi = text.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += '&';
            continue;
        }
        std::string_view entity = text.substr(i + 1, semi - i - 1);
        if (entity == "amp")
            out += '&';
        else if (entity == "lt")
            out += '<';
        else if (entity == "gt")
            out += '>';
        else if (entity == "quot")
            out += '"';
        else if (entity == "apos")
            out += '\'';
        else if (entity == "nbsp")
            out += ' ';
        else if (entity.size() > 1 && entity[0] == '#') {
            unsigned long cp = 0;
            bool hex = entity[1] == 'x' || entity[1] == 'X';
            try {
                cp = std::stoul(std::string(entity.substr(hex ? 2 : 1)), nullptr, hex ? 16 : 10);
            } catch (...) {
                out += '&';
                continue;
            }
            append_utf8(out, cp);
        } else {
            out += '&';
            continue;
        }
        i = semi;
    }
    return out;
}

std::string escape_html(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

std::optional<std::string> title_of(std::string_view html)
{
    auto tokens = tokenize(html);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].kind == TokenKind::StartTag && tokens[i].name == "title") {
            if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Text)
                return decode_entities(tokens[i + 1].text);
            return std::string{};
        }
    }
    return std::nullopt;
}

std::vector<std::string> link_references(std::string_view html)
{
    std::vector<std::string> out;
    for (const auto& t : tokenize(html)) {
        if (t.kind != TokenKind::StartTag)
            continue;
        for (const char* name : {"href", "src", "action"}) {
            if (auto v = t.attr(name); v && !v->empty())
                out.push_back(*v);
        }
    }
    return out;
}

std::optional<std::string> base_href(std::string_view html)
{
    for (const auto& t : tokenize(html)) {
        if (t.kind == TokenKind::StartTag && t.name == "base") {
            if (auto v = t.attr("href"))
                return v;
        }
    }
    return std::nullopt;
}

} // namespace vapt::crawl
