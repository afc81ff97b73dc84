#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vapt::testbed {

struct Product {
    int id = 0;
    std::string name;
    std::string category;
    double price = 0.0;
    std::string description;
};

const std::vector<Product>& products();

class SqlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Called with whole seconds whenever SLEEP(n) is evaluated (at most once per query).
using Sleeper = std::function<void(int)>;

/// Evaluates a WHERE clause over the product table, MySQL-flavoured: numeric and string
/// literals, the columns id/name/category/price, = <> != < > <= >=, AND/OR/NOT,
/// parentheses, SLEEP(n) and the comment forms --, # and /* */. Every operand is
/// evaluated (no short-circuit). Throws SqlError("syntax error near '...'") on bad input.
std::vector<Product> select_where(std::string_view where_clause, const Sleeper& sleeper);

} // namespace vapt::testbed
