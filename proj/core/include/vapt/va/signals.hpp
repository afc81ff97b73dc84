#pragma once

#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vapt::va {

/// Case-insensitive substring search.
bool icontains(std::string_view haystack, std::string_view needle);
bool contains_any(std::string_view haystack, const std::vector<std::string>& needles);

/// Cheap reflection test used at assessment time: needle appears verbatim and the
/// occurrence is not inside an HTML comment. Raw-text and RCDATA elements are not
/// considered, which is what makes this a suspicion rather than a proof.
bool reflected_outside_comment(std::string_view body, std::string_view needle);

/// Strict test: after full tokenization some start tag carries an event-handler attribute
/// whose value invokes marker, i.e. the payload became live markup.
bool executable_reflection(std::string_view body, std::string_view marker);

/// Word tokens (lowercase alphanumeric runs) of text after entity decoding and removal of
/// volatile substrings.
std::set<std::string> word_tokens(std::string_view text, const std::vector<std::regex>& volatile_patterns);

/// Jaccard similarity of the two token sets after dropping every token that occurs in
/// one of the strip strings (payload reflections). Empty vs empty is 1.
double similarity(std::string_view a, std::string_view b, const std::vector<std::regex>& volatile_patterns,
                  const std::vector<std::string>& strip = {});

std::vector<std::regex> compile_all(const std::vector<std::string>& patterns);

bool luhn_valid(std::string_view digits);
/// Checksum-valid card-like numbers in text (separators removed).
std::vector<std::string> card_numbers(std::string_view text, const std::regex& pattern);

/// Lines of text that look like /etc/passwd records.
int passwd_lines(std::string_view text, const std::regex& line_pattern);

/// Title starting with "Index of" plus a link to the parent directory.
bool strict_directory_listing(std::string_view body);

/// A PEM private-key block with BEGIN line, base64 payload and matching END line.
bool strict_private_key(std::string_view body);

double median(std::vector<double> values);
double median_absolute_deviation(const std::vector<double>& values);

} // namespace vapt::va
