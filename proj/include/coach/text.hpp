#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coach::text {

/// Lowercased word tokens. Apostrophes inside a word are dropped ("don't" -> "dont"),
/// other punctuation separates words, and every '?' becomes its own "?" token.
std::vector<std::string> tokenize(std::string_view input);

/// Canonical gist form: lowercase words joined by single spaces, with a trailing
/// '?' kept (attached to the last word) when the text ends in a question mark.
std::string canonicalize(std::string_view input);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_word(std::string_view line, std::string_view word);

/// Words excluding "?" tokens.
std::size_t word_count(std::string_view input);

}  // namespace coach::text
