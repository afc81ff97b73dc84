#include "vapt/testbed/sql.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace vapt::testbed {

const std::vector<Product>& products()
{
    static const std::vector<Product> table{
        {1, "Widget", "tools", 9.99, "Sturdy steel widget for everyday household repairs"},
        {2, "Gadget", "tools", 19.99, "Pocket gadget with seven folding attachments"},
        {3, "Lamp", "home", 24.50, "Adjustable desk lamp with a warm bulb"},
        {4, "Chair", "home", 49.00, "Oak chair with a woven seat and curved back"},
        {5, "Notebook", "office", 3.25, "Ruled paper notebook bound in recycled card"},
    };
    return table;
}

namespace {

enum class Tok { Number, String, Ident, Op, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

[[noreturn]] void fail(std::string_view input, std::size_t pos)
{
    auto rest = input.substr(std::min(pos, input.size()), 40);
    throw SqlError("syntax error near '" + std::string(rest) + "'");
}

std::vector<Token> lex(std::string_view in)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < in.size()) {
        char c = in[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#' || in.substr(i, 2) == "--") {
            break;
        } else if (in.substr(i, 2) == "/*") {
            auto end = in.find("*/", i + 2);
            if (end == std::string_view::npos)
                fail(in, i);
            i = end + 2;
        } else if (c == '\'' || c == '"') {
            std::string value;
            std::size_t j = i + 1;
            while (true) {
                if (j >= in.size())
                    fail(in, i);
                if (in[j] == c) {
                    if (j + 1 < in.size() && in[j + 1] == c) {
                        value += c;
                        j += 2;
                        continue;
                    }
                    break;
                }
                value += in[j++];
            }
            out.push_back({Tok::String, value, i});
            i = j + 1;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < in.size() && (std::isdigit(static_cast<unsigned char>(in[j])) || in[j] == '.'))
                ++j;
            out.push_back({Tok::Number, std::string(in.substr(i, j - i)), i});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < in.size() && (std::isalnum(static_cast<unsigned char>(in[j])) || in[j] == '_'))
                ++j;
            std::string word(in.substr(i, j - i));
            for (auto& ch : word)
                ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            out.push_back({Tok::Ident, word, i});
            i = j;
        } else if (c == '(' || c == ')' || c == ',') {
            out.push_back({c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : Tok::Comma, std::string(1, c), i});
            ++i;
        } else if (c == '=' || c == '<' || c == '>' || c == '!') {
            std::string op(1, c);
            if (i + 1 < in.size() && (in[i + 1] == '=' || (c == '<' && in[i + 1] == '>')))
                op += in[i + 1];
            if (op == "!")
                fail(in, i);
            out.push_back({Tok::Op, op, i});
            i += op.size();
        } else {
            fail(in, i);
        }
    }
    out.push_back({Tok::End, "", in.size()});
    return out;
}

struct Value {
    bool numeric = true;
    double num = 0.0;
    std::string str;

    [[nodiscard]] double as_number() const { return numeric ? num : std::strtod(str.c_str(), nullptr); }
    [[nodiscard]] bool truthy() const { return as_number() != 0.0; }
};

Value number(double n) { return {true, n, {}}; }

int icompare(const std::string& a, const std::string& b)
{
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        int x = std::tolower(static_cast<unsigned char>(a[i]));
        int y = std::tolower(static_cast<unsigned char>(b[i]));
        if (x != y)
            return x < y ? -1 : 1;
    }
    return a.size() == b.size() ? 0 : (a.size() < b.size() ? -1 : 1);
}

class Evaluator {
public:
    Evaluator(std::string_view input, const std::vector<Token>& tokens, const Product& row, bool& slept,
              const Sleeper& sleeper)
        : input_(input), tokens_(tokens), row_(row), slept_(slept), sleeper_(sleeper)
    {
    }

    bool run()
    {
        auto v = disjunction();
        if (peek().kind != Tok::End)
            fail(input_, peek().pos);
        return v.truthy();
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }
    bool keyword(const char* word) const { return peek().kind == Tok::Ident && peek().text == word; }

    Value disjunction()
    {
        auto v = conjunction();
        while (keyword("or")) {
            ++pos_;
            auto rhs = conjunction();
            v = number(v.truthy() || rhs.truthy());
        }
        return v;
    }

    Value conjunction()
    {
        auto v = negation();
        while (keyword("and")) {
            ++pos_;
            auto rhs = negation();
            v = number(v.truthy() && rhs.truthy());
        }
        return v;
    }

    Value negation()
    {
        if (keyword("not")) {
            ++pos_;
            return number(!negation().truthy());
        }
        return comparison();
    }

    Value comparison()
    {
        auto lhs = primary();
        if (peek().kind != Tok::Op)
            return lhs;
        auto op = take().text;
        auto rhs = primary();
        int cmp = 0;
        if (lhs.numeric || rhs.numeric) {
            double a = lhs.as_number();
            double b = rhs.as_number();
            cmp = a < b ? -1 : a > b ? 1 : 0;
        } else {
            cmp = icompare(lhs.str, rhs.str);
        }
        if (op == "=")
            return number(cmp == 0);
        if (op == "<>" || op == "!=")
            return number(cmp != 0);
        if (op == "<")
            return number(cmp < 0);
        if (op == ">")
            return number(cmp > 0);
        if (op == "<=")
            return number(cmp <= 0);
        if (op == ">=")
            return number(cmp >= 0);
        fail(input_, tokens_[pos_ - 1].pos);
    }

    Value primary()
    {
        const auto& t = take();
        switch (t.kind) {
        case Tok::Number: return number(std::strtod(t.text.c_str(), nullptr));
        case Tok::String: return {false, 0.0, t.text};
        case Tok::LParen: {
            auto v = disjunction();
            if (take().kind != Tok::RParen)
                fail(input_, tokens_[pos_ - 1].pos);
            return v;
        }
        case Tok::Ident: break;
        default: fail(input_, t.pos);
        }
        if (t.text == "id")
            return number(row_.id);
        if (t.text == "price")
            return number(row_.price);
        if (t.text == "name")
            return {false, 0.0, row_.name};
        if (t.text == "category")
            return {false, 0.0, row_.category};
        if (t.text == "sleep" && peek().kind == Tok::LParen) {
            ++pos_;
            auto arg = disjunction();
            if (take().kind != Tok::RParen)
                fail(input_, tokens_[pos_ - 1].pos);
            if (!slept_) {
                slept_ = true;
                auto seconds = static_cast<int>(arg.as_number());
                if (seconds > 0 && sleeper_)
                    sleeper_(std::min(seconds, 30));
            }
            return number(0);
        }
        fail(input_, t.pos);
    }

    std::string_view input_;
    const std::vector<Token>& tokens_;
    const Product& row_;
    bool& slept_;
    const Sleeper& sleeper_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<Product> select_where(std::string_view where_clause, const Sleeper& sleeper)
{
    auto tokens = lex(where_clause);
    std::vector<Product> out;
    // A parse-only pass first, so a malformed clause never reaches SLEEP.
    bool slept = true;
    Evaluator(where_clause, tokens, products().front(), slept, sleeper).run();
    slept = false;
    for (const auto& row : products()) {
        if (Evaluator(where_clause, tokens, row, slept, sleeper).run())
            out.push_back(row);
    }
    return out;
}

} // namespace vapt::testbed
