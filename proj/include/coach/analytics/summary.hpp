#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coach/feedback/icons.hpp"

namespace coach::analytics {

using feedback::Cue;
using feedback::FeedbackEvent;
using feedback::kCueCount;

/// Feedback events over one conversation span [0, span_ms].
struct SessionTimeline {
    std::int64_t span_ms = 0;
    std::vector<FeedbackEvent> events;
};

struct Violation {
    enum class Kind { alternation, ordering, span };
    Kind kind = Kind::alternation;
    std::size_t event_index = 0;
    std::string message;
};

/// First violation of per-cue alternation, timestamp order or span containment.
std::optional<Violation> validate_timeline(const SessionTimeline& timeline);

struct CueSummary {
    int reminders = 0;
    int unresolved = 0;
    int resolved_pairs = 0;
    std::int64_t total_lag_ms = 0;

    std::optional<double> mean_lag_ms() const;
};

/// Post-conversation metrics: Reminders, Best Streak and Response Lag.
struct SessionSummary {
    std::int64_t span_ms = 0;
    std::array<CueSummary, kCueCount> cues;
    std::int64_t best_streak_ms = 0;

    int reminders() const;
    int unresolved() const;
    int resolved_pairs() const;
    /// Mean over every resolved pair of every cue.
    std::optional<double> mean_lag_ms() const;
    const CueSummary& operator[](Cue c) const { return cues[feedback::index(c)]; }
};

/// Throws Errc::invalid_timeline when validation fails. Open red intervals run
/// to the end of the span and count as unresolved reminders without a lag.
SessionSummary compute_summary(const SessionTimeline& timeline);

/// Combines segment summaries: counts and lags add up, spans add up, the best
/// streak is the longest of any segment.
SessionSummary combine_summaries(const std::vector<SessionSummary>& parts);

/// Joins timelines end to end, offsetting each by the spans before it.
SessionTimeline concatenate(const std::vector<SessionTimeline>& parts);

std::string format_duration(std::int64_t ms);

/// Human-readable report using the on-screen metric names.
std::string format_report(const SessionSummary& summary, const std::string& title);

}  // namespace coach::analytics
