#include "coach/transduction/pattern.hpp"

#include <charconv>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::transduction {

bool AnnotatedUtterance::has_feature(std::string_view tag) const {
    const auto norm = normalize_tag(tag);
    for (const auto& t : tokens)
        if (t.features.count(norm)) return true;
    return false;
}

std::string AnnotatedUtterance::text() const { return span_text(*this, {0, tokens.size()}); }

AnnotatedUtterance annotate(std::string_view utterance, const FeatureLexicon& lexicon) {
    AnnotatedUtterance out;
    for (auto& word : text::tokenize(utterance)) {
        auto features = lexicon.closure_of_word(word);
        out.tokens.push_back({std::move(word), std::move(features)});
    }
    return out;
}

Pattern Pattern::create(std::vector<PatternElement> elements, std::size_t gap_cap) {
    bool has_anchor = false;
    for (const auto& e : elements) {
        if (const auto* g = std::get_if<Gap>(&e)) {
            if (g->min > g->max || g->max > gap_cap)
                throw Error(Errc::invalid_pattern, "gap bounds " + std::to_string(g->min) + ".." +
                                                       std::to_string(g->max) + " outside cap " + std::to_string(gap_cap));
        } else {
            has_anchor = true;
        }
    }
    if (!has_anchor) throw Error(Errc::invalid_pattern, "pattern needs at least one literal or class");
    Pattern p;
    p.elements_ = std::move(elements);
    return p;
}

namespace {

std::size_t parse_count(std::string_view s, std::string_view whole) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::invalid_pattern, "bad gap '" + std::string(whole) + "'");
    return v;
}

}  // namespace

Pattern Pattern::parse(std::string_view source, std::size_t gap_cap) {
    std::vector<PatternElement> elements;
    std::size_t pos = 0;
    while (pos < source.size()) {
        while (pos < source.size() && std::isspace(static_cast<unsigned char>(source[pos]))) ++pos;
        if (pos >= source.size()) break;
        auto end = pos;
        while (end < source.size() && !std::isspace(static_cast<unsigned char>(source[end]))) ++end;
        const auto item = source.substr(pos, end - pos);
        pos = end;
        if (item == "*") {
            elements.emplace_back(Gap{0, gap_cap});
        } else if (item == "+") {
            elements.emplace_back(Gap{1, gap_cap});
        } else if (item.front() == '*') {
            auto range = item.substr(1);
            if (auto dash = range.find('-'); dash != range.npos)
                elements.emplace_back(Gap{parse_count(range.substr(0, dash), item), parse_count(range.substr(dash + 1), item)});
            else
                elements.emplace_back(Gap{0, parse_count(range, item)});
        } else if (item.front() == '@') {
            if (item.size() == 1) throw Error(Errc::invalid_pattern, "empty class '@'");
            elements.emplace_back(Class{normalize_tag(item.substr(1))});
        } else {
            auto tokens = text::tokenize(item);
            if (tokens.size() != 1)
                throw Error(Errc::invalid_pattern, "literal '" + std::string(item) + "' is not a single token");
            elements.emplace_back(Literal{tokens.front()});
        }
    }
    return create(std::move(elements), gap_cap);
}

std::size_t Pattern::capture_count() const {
    std::size_t n = 0;
    for (const auto& e : elements_)
        if (!std::holds_alternative<Literal>(e)) ++n;
    return n;
}

std::string Pattern::to_string() const {
    std::string out;
    for (const auto& e : elements_) {
        if (!out.empty()) out.push_back(' ');
        if (const auto* l = std::get_if<Literal>(&e)) {
            out += l->word;
        } else if (const auto* c = std::get_if<Class>(&e)) {
            out += "@" + c->tag;
        } else {
            const auto& g = std::get<Gap>(e);
            out += "*" + std::to_string(g.min) + "-" + std::to_string(g.max);
        }
    }
    return out;
}

namespace {

class Matcher {
public:
    Matcher(const Pattern& p, const AnnotatedUtterance& u)
        : elems_(p.elements()), toks_(u.tokens), failed_((elems_.size() + 1) * (toks_.size() + 1), false) {}

    bool run(std::vector<Span>& captures) { return step(0, 0, captures); }

private:
    bool step(std::size_t e, std::size_t pos, std::vector<Span>& caps) {
        if (e == elems_.size()) return pos == toks_.size();
        const auto slot = e * (toks_.size() + 1) + pos;
        if (failed_[slot]) return false;
        const auto& el = elems_[e];
        if (const auto* lit = std::get_if<Literal>(&el)) {
            if (pos < toks_.size() && toks_[pos].word == lit->word && step(e + 1, pos + 1, caps)) return true;
        } else if (const auto* cls = std::get_if<Class>(&el)) {
            if (pos < toks_.size() && toks_[pos].features.count(cls->tag)) {
                caps.push_back({pos, pos + 1});
                if (step(e + 1, pos + 1, caps)) return true;
                caps.pop_back();
            }
        } else {
            const auto& gap = std::get<Gap>(el);
            const auto remaining = toks_.size() - pos;
            for (auto len = gap.min; len <= gap.max && len <= remaining; ++len) {
                caps.push_back({pos, pos + len});
                if (step(e + 1, pos + len, caps)) return true;
                caps.pop_back();
            }
        }
        failed_[slot] = true;
        return false;
    }

    const std::vector<PatternElement>& elems_;
    const std::vector<Token>& toks_;
    std::vector<bool> failed_;
};

}  // namespace

MatchResult match(const Pattern& pattern, const AnnotatedUtterance& input) {
    MatchResult r;
    std::vector<Span> caps;
    if (Matcher(pattern, input).run(caps)) {
        r.matched = true;
        r.captures = std::move(caps);
    }
    return r;
}

std::string span_text(const AnnotatedUtterance& input, Span span) {
    std::string out;
    for (auto i = span.begin; i < span.end && i < input.tokens.size(); ++i) {
        if (!out.empty() && input.tokens[i].word != "?") out.push_back(' ');
        out += input.tokens[i].word;
    }
    return out;
}

}  // namespace coach::transduction
