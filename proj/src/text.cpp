#include "coach/text.hpp"

#include <cctype>

#include "coach/error.hpp"

namespace coach {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::parse_error: return "parse-error";
        case Errc::cycle_detected: return "cycle-detected";
        case Errc::duplicate_word_entry: return "duplicate-word-entry";
        case Errc::undeclared_parent_tag: return "undeclared-parent-tag";
        case Errc::invalid_pattern: return "invalid-pattern";
        case Errc::invalid_tree: return "invalid-tree";
        case Errc::unresolved_subschema: return "unresolved-subschema";
        case Errc::dangling_ask: return "dangling-ask";
        case Errc::schema_cycle: return "schema-cycle";
        case Errc::no_topics_remaining: return "no-topics-remaining";
        case Errc::non_monotonic_timestamp: return "non-monotonic-timestamp";
        case Errc::non_finite_feature: return "non-finite-feature";
        case Errc::invalid_model: return "invalid-model";
        case Errc::empty_sequence: return "empty-sequence";
        case Errc::invalid_timeline: return "invalid-timeline";
        case Errc::interval_out_of_span: return "interval-out-of-span";
        case Errc::threshold_exceeds_raters: return "threshold-exceeds-raters";
        case Errc::insufficient_data: return "insufficient-data";
        case Errc::missing_class: return "missing-class";
        case Errc::misaligned_lengths: return "misaligned-lengths";
        case Errc::invalid_config: return "invalid-config";
        case Errc::model_load_failure: return "model-load-failure";
        case Errc::session_not_active: return "session-not-active";
        case Errc::session_expired: return "session-expired";
        case Errc::unknown_session: return "unknown-session";
        case Errc::malformed_message: return "malformed-message";
        case Errc::io_error: return "io-error";
    }
    return "unknown-error";
}

namespace text {

namespace {

bool is_word_char(unsigned char c) {
    // Bytes >= 0x80 are kept so UTF-8 words survive intact.
    return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < input.size(); ++i) {
        const auto c = static_cast<unsigned char>(input[i]);
        if (is_word_char(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == '\'' && !current.empty() && i + 1 < input.size() &&
                   is_word_char(static_cast<unsigned char>(input[i + 1]))) {
            continue;
        } else if (c == '?') {
            flush();
            tokens.emplace_back("?");
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::string canonicalize(std::string_view input) {
    const auto tokens = tokenize(input);
    std::string out;
    for (const auto& t : tokens) {
        if (t == "?") continue;
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    if (!tokens.empty() && tokens.back() == "?" && !out.empty()) out.push_back('?');
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string to_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

bool starts_with_word(std::string_view line, std::string_view word) {
    if (line.substr(0, word.size()) != word) return false;
    return line.size() == word.size() || std::isspace(static_cast<unsigned char>(line[word.size()])) ||
           line[word.size()] == ':';
}

std::size_t word_count(std::string_view input) {
    std::size_t n = 0;
    for (const auto& t : tokenize(input))
        if (t != "?") ++n;
    return n;
}

}  // namespace text
}  // namespace coach
