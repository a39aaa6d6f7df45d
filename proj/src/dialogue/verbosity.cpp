#include "coach/dialogue/verbosity.hpp"

#include <vector>

#include "coach/text.hpp"

namespace coach::dialogue {

std::string_view to_string(Verbosity v) {
    switch (v) {
        case Verbosity::laconic: return "laconic";
        case Verbosity::typical: return "typical";
        case Verbosity::verbose: return "verbose";
    }
    return "typical";
}

VerbosityProfile gauge_verbosity_counts(std::span<const std::size_t> word_counts, const VerbosityPolicy& policy) {
    VerbosityProfile p;
    p.silence_allowance_ms = policy.base_silence_ms;
    if (word_counts.empty() || policy.window == 0) return p;
    const auto n = std::min(policy.window, word_counts.size());
    double sum = 0.0;
    for (auto i = word_counts.size() - n; i < word_counts.size(); ++i) sum += static_cast<double>(word_counts[i]);
    p.mean_words = sum / static_cast<double>(n);
    if (p.mean_words < policy.laconic_below) {
        p.level = Verbosity::laconic;
    } else if (p.mean_words > policy.verbose_above) {
        p.level = Verbosity::verbose;
        p.silence_allowance_ms += policy.verbose_extra_ms;
    }
    return p;
}

VerbosityProfile gauge_verbosity(std::span<const std::string> history, const VerbosityPolicy& policy) {
    std::vector<std::size_t> counts;
    counts.reserve(history.size());
    for (const auto& turn : history) counts.push_back(text::word_count(turn));
    return gauge_verbosity_counts(counts, policy);
}

}  // namespace coach::dialogue
