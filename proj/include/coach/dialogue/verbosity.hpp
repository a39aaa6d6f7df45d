#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace coach::dialogue {

enum class Verbosity { laconic, typical, verbose };

std::string_view to_string(Verbosity v);

struct VerbosityPolicy {
    std::size_t window = 5;
    double laconic_below = 5.0;   // mean words/turn
    double verbose_above = 40.0;
    std::int64_t base_silence_ms = 1200;
    std::int64_t verbose_extra_ms = 800;
};

struct VerbosityProfile {
    Verbosity level = Verbosity::typical;
    double mean_words = 0.0;
    std::int64_t silence_allowance_ms = 1200;
    /// Laconic users get elaboration prompts.
    bool wants_elaboration() const { return level == Verbosity::laconic; }
};

/// Rolling mean of words per turn over the last `window` turns.
VerbosityProfile gauge_verbosity(std::span<const std::string> history, const VerbosityPolicy& policy = {});
VerbosityProfile gauge_verbosity_counts(std::span<const std::size_t> word_counts, const VerbosityPolicy& policy = {});

}  // namespace coach::dialogue
