#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coach/feedback/filter.hpp"
#include "coach/feedback/frame.hpp"

namespace coach::feedback {

enum class IconColor { green, flashing_red };
std::string_view to_string(IconColor c);

struct CueIcon {
    IconColor color = IconColor::green;
    std::int64_t since_ms = 0;
    /// Start of the current run above the on-threshold while green.
    std::optional<std::int64_t> above_since_ms;
};

struct IconState {
    std::array<CueIcon, kCueCount> cues;

    const CueIcon& operator[](Cue c) const { return cues[index(c)]; }
    static IconState all_green(std::int64_t at_ms);
};

struct FeedbackPolicy {
    double on_threshold = 0.8;
    double off_threshold = 0.4;
    std::int64_t dwell_ms = 500;
    std::int64_t min_red_ms = 1500;
    std::int64_t ack_window_ms = 10000;
    bool positive_ack = true;
};

struct FeedbackEvent {
    enum class Kind { reminder_start, resolved, positive_ack };

    Cue cue = Cue::eye_contact;
    Kind kind = Kind::reminder_start;
    std::int64_t t_ms = 0;
    std::string text;  // praise line on positive_ack

    bool operator==(const FeedbackEvent&) const = default;
};

std::string_view to_string(FeedbackEvent::Kind k);
std::optional<FeedbackEvent::Kind> event_kind_from_string(std::string_view s);

struct IconDecision {
    IconState icons;
    std::vector<FeedbackEvent> events;
};

/// Hysteresis policy: green turns red once P(needs feedback) stays above the
/// on-threshold for the dwell window; red turns green once it falls below the
/// off-threshold and the icon has been red for the minimum duration.
IconDecision decide_icons(const FilterState& state, const IconState& icons, std::int64_t now_ms,
                          const FeedbackPolicy& policy = {});

/// Same policy driven by explicit per-cue probabilities.
IconDecision decide_icons(const std::array<double, kCueCount>& needs, const IconState& icons, std::int64_t now_ms,
                          const FeedbackPolicy& policy = {});

std::string_view praise_line(Cue cue);

/// Praise for a resolution that has held: the icon is still green since the
/// resolution, the window has elapsed and the cue was not yet praised.
std::optional<std::string> emit_positive_ack(const FeedbackEvent& resolved, const CueIcon& icon, std::int64_t now_ms,
                                             bool already_acknowledged, const FeedbackPolicy& policy = {});

/// Tracks pending resolutions and the once-per-segment praise rule.
class AckTracker {
public:
    void observe(const FeedbackEvent& event);
    std::vector<FeedbackEvent> poll(const IconState& icons, std::int64_t now_ms, const FeedbackPolicy& policy);
    /// New conversation segment: praise may be given again.
    void reset();

private:
    std::array<std::optional<FeedbackEvent>, kCueCount> pending_;
    std::array<bool, kCueCount> acknowledged_{};
};

}  // namespace coach::feedback
