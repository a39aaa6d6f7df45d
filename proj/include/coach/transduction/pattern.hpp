#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coach/transduction/lexicon.hpp"

namespace coach::transduction {

struct Token {
    std::string word;
    TagSet features;  // closure under the lexicon hierarchy

    bool operator==(const Token&) const = default;
};

struct AnnotatedUtterance {
    std::vector<Token> tokens;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
    bool has_feature(std::string_view tag) const;
    std::string text() const;
};

AnnotatedUtterance annotate(std::string_view utterance, const FeatureLexicon& lexicon);

inline constexpr std::size_t kDefaultGapCap = 10;

struct Literal {
    std::string word;
    bool operator==(const Literal&) const = default;
};
struct Class {
    std::string tag;
    bool operator==(const Class&) const = default;
};
struct Gap {
    std::size_t min = 0;
    std::size_t max = kDefaultGapCap;
    bool operator==(const Gap&) const = default;
};

using PatternElement = std::variant<Literal, Class, Gap>;

/// Sequence of literals, feature classes and bounded gaps that must cover the
/// whole utterance. Text form: `word`, `@TAG`, `*` (0..cap), `+` (1..cap),
/// `*N` (0..N), `*M-N` (M..N).
class Pattern {
public:
    Pattern() = default;

    /// Throws Errc::invalid_pattern unless there is a non-gap element and every
    /// gap satisfies min <= max <= cap.
    static Pattern create(std::vector<PatternElement> elements, std::size_t gap_cap = kDefaultGapCap);
    static Pattern parse(std::string_view source, std::size_t gap_cap = kDefaultGapCap);

    const std::vector<PatternElement>& elements() const { return elements_; }
    /// Number of Class and Gap elements, i.e. the captures a match records.
    std::size_t capture_count() const;
    std::string to_string() const;

private:
    std::vector<PatternElement> elements_;
};

/// Half-open token range [begin, end).
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

struct MatchResult {
    bool matched = false;
    std::vector<Span> captures;  // one per Class/Gap, in pattern order
};

/// Whole-utterance match; among all assignments the one with the
/// lexicographically smallest gap lengths (left to right) wins.
MatchResult match(const Pattern& pattern, const AnnotatedUtterance& input);

std::string span_text(const AnnotatedUtterance& input, Span span);

}  // namespace coach::transduction
