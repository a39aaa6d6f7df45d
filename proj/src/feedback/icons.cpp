#include "coach/feedback/icons.hpp"

namespace coach::feedback {

std::string_view to_string(IconColor c) { return c == IconColor::green ? "green" : "red"; }

IconState IconState::all_green(std::int64_t at_ms) {
    IconState s;
    for (auto& c : s.cues) c.since_ms = at_ms;
    return s;
}

std::string_view to_string(FeedbackEvent::Kind k) {
    switch (k) {
        case FeedbackEvent::Kind::reminder_start: return "reminder-start";
        case FeedbackEvent::Kind::resolved: return "resolved";
        case FeedbackEvent::Kind::positive_ack: return "positive-ack";
    }
    return "reminder-start";
}

std::optional<FeedbackEvent::Kind> event_kind_from_string(std::string_view s) {
    for (auto k : {FeedbackEvent::Kind::reminder_start, FeedbackEvent::Kind::resolved, FeedbackEvent::Kind::positive_ack})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

IconDecision decide_icons(const std::array<double, kCueCount>& needs, const IconState& icons, std::int64_t now,
                          const FeedbackPolicy& policy) {
    IconDecision out{icons, {}};
    for (auto c : kCues) {
        auto& icon = out.icons.cues[index(c)];
        const double p = needs[index(c)];
        if (icon.color == IconColor::green) {
            if (p > policy.on_threshold) {
                if (!icon.above_since_ms) icon.above_since_ms = now;
                if (now - *icon.above_since_ms >= policy.dwell_ms) {
                    icon.color = IconColor::flashing_red;
                    icon.since_ms = now;
                    icon.above_since_ms.reset();
                    out.events.push_back({c, FeedbackEvent::Kind::reminder_start, now, {}});
                }
            } else {
                icon.above_since_ms.reset();
            }
        } else if (p < policy.off_threshold && now - icon.since_ms >= policy.min_red_ms) {
            icon.color = IconColor::green;
            icon.since_ms = now;
            out.events.push_back({c, FeedbackEvent::Kind::resolved, now, {}});
        }
    }
    return out;
}

IconDecision decide_icons(const FilterState& state, const IconState& icons, std::int64_t now, const FeedbackPolicy& policy) {
    std::array<double, kCueCount> needs{};
    for (auto c : kCues) needs[index(c)] = state[c].needs_feedback();
    return decide_icons(needs, icons, now, policy);
}

std::string_view praise_line(Cue cue) {
    switch (cue) {
        case Cue::eye_contact: return "You have good eye contact now";
        case Cue::smile: return "You have a nice smile now";
        case Cue::volume: return "Your speaking volume sounds good now";
        case Cue::body_movement: return "You look nice and steady now";
    }
    return "";
}

std::optional<std::string> emit_positive_ack(const FeedbackEvent& resolved, const CueIcon& icon, std::int64_t now,
                                             bool already_acknowledged, const FeedbackPolicy& policy) {
    if (!policy.positive_ack || already_acknowledged || resolved.kind != FeedbackEvent::Kind::resolved) return std::nullopt;
    if (icon.color != IconColor::green || icon.since_ms != resolved.t_ms) return std::nullopt;
    if (now - resolved.t_ms < policy.ack_window_ms) return std::nullopt;
    return std::string(praise_line(resolved.cue));
}

void AckTracker::observe(const FeedbackEvent& event) {
    auto& slot = pending_[index(event.cue)];
    if (event.kind == FeedbackEvent::Kind::resolved) slot = event;
    else if (event.kind == FeedbackEvent::Kind::reminder_start) slot.reset();
}

std::vector<FeedbackEvent> AckTracker::poll(const IconState& icons, std::int64_t now, const FeedbackPolicy& policy) {
    std::vector<FeedbackEvent> out;
    for (auto c : kCues) {
        auto& slot = pending_[index(c)];
        if (!slot) continue;
        if (auto text = emit_positive_ack(*slot, icons[c], now, acknowledged_[index(c)], policy)) {
            out.push_back({c, FeedbackEvent::Kind::positive_ack, now, std::move(*text)});
            acknowledged_[index(c)] = true;
            slot.reset();
        } else if (acknowledged_[index(c)] || icons[c].color != IconColor::green) {
            slot.reset();
        }
    }
    return out;
}

void AckTracker::reset() {
    pending_ = {};
    acknowledged_ = {};
}

}  // namespace coach::feedback
