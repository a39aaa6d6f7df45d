#include "coach/analytics/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "coach/error.hpp"

namespace coach::analytics {

using Kind = FeedbackEvent::Kind;

std::optional<Violation> validate_timeline(const SessionTimeline& tl) {
    // Per cue: 0 = green, 1 = red, 2 = green right after a resolution.
    std::array<int, kCueCount> phase{};
    for (std::size_t i = 0; i < tl.events.size(); ++i) {
        const auto& e = tl.events[i];
        const auto at = " at event " + std::to_string(i);
        if (e.t_ms < 0 || e.t_ms > tl.span_ms)
            return Violation{Violation::Kind::span, i, "event outside span" + at};
        if (i > 0 && e.t_ms < tl.events[i - 1].t_ms)
            return Violation{Violation::Kind::ordering, i, "timestamps decrease" + at};
        auto& p = phase[feedback::index(e.cue)];
        const auto cue = std::string(feedback::to_string(e.cue));
        switch (e.kind) {
            case Kind::reminder_start:
                if (p == 1) return Violation{Violation::Kind::alternation, i, cue + " reminder while already red" + at};
                p = 1;
                break;
            case Kind::resolved:
                if (p != 1) return Violation{Violation::Kind::alternation, i, cue + " resolved without a reminder" + at};
                p = 2;
                break;
            case Kind::positive_ack:
                if (p != 2) return Violation{Violation::Kind::alternation, i, cue + " acknowledgment without a resolution" + at};
                p = 0;
                break;
        }
    }
    return std::nullopt;
}

std::optional<double> CueSummary::mean_lag_ms() const {
    if (resolved_pairs == 0) return std::nullopt;
    return static_cast<double>(total_lag_ms) / resolved_pairs;
}

int SessionSummary::reminders() const {
    int n = 0;
    for (const auto& c : cues) n += c.reminders;
    return n;
}

int SessionSummary::unresolved() const {
    int n = 0;
    for (const auto& c : cues) n += c.unresolved;
    return n;
}

int SessionSummary::resolved_pairs() const {
    int n = 0;
    for (const auto& c : cues) n += c.resolved_pairs;
    return n;
}

std::optional<double> SessionSummary::mean_lag_ms() const {
    std::int64_t total = 0;
    for (const auto& c : cues) total += c.total_lag_ms;
    const int pairs = resolved_pairs();
    if (pairs == 0) return std::nullopt;
    return static_cast<double>(total) / pairs;
}

SessionSummary compute_summary(const SessionTimeline& tl) {
    if (auto v = validate_timeline(tl)) throw Error(Errc::invalid_timeline, v->message);
    SessionSummary s;
    s.span_ms = tl.span_ms;
    std::array<std::optional<std::int64_t>, kCueCount> open{};
    int open_count = 0;
    std::int64_t green_since = 0;
    for (const auto& e : tl.events) {
        auto& cs = s.cues[feedback::index(e.cue)];
        auto& o = open[feedback::index(e.cue)];
        if (e.kind == Kind::reminder_start) {
            ++cs.reminders;
            if (open_count++ == 0) s.best_streak_ms = std::max(s.best_streak_ms, e.t_ms - green_since);
            o = e.t_ms;
        } else if (e.kind == Kind::resolved) {
            ++cs.resolved_pairs;
            cs.total_lag_ms += e.t_ms - *o;
            o.reset();
            if (--open_count == 0) green_since = e.t_ms;
        }
    }
    if (open_count == 0) s.best_streak_ms = std::max(s.best_streak_ms, tl.span_ms - green_since);
    for (std::size_t c = 0; c < kCueCount; ++c)
        if (open[c]) ++s.cues[c].unresolved;
    return s;
}

SessionSummary combine_summaries(const std::vector<SessionSummary>& parts) {
    SessionSummary out;
    for (const auto& p : parts) {
        out.span_ms += p.span_ms;
        out.best_streak_ms = std::max(out.best_streak_ms, p.best_streak_ms);
        for (std::size_t c = 0; c < kCueCount; ++c) {
            out.cues[c].reminders += p.cues[c].reminders;
            out.cues[c].unresolved += p.cues[c].unresolved;
            out.cues[c].resolved_pairs += p.cues[c].resolved_pairs;
            out.cues[c].total_lag_ms += p.cues[c].total_lag_ms;
        }
    }
    return out;
}

SessionTimeline concatenate(const std::vector<SessionTimeline>& parts) {
    SessionTimeline out;
    for (const auto& p : parts) {
        for (auto e : p.events) {
            e.t_ms += out.span_ms;
            out.events.push_back(std::move(e));
        }
        out.span_ms += p.span_ms;
    }
    return out;
}

std::string format_duration(std::int64_t ms) {
    const auto total_s = ms / 1000;
    char buf[64];
    if (total_s >= 60)
        std::snprintf(buf, sizeof buf, "%lld min %lld s", static_cast<long long>(total_s / 60), static_cast<long long>(total_s % 60));
    else
        std::snprintf(buf, sizeof buf, "%.1f s", static_cast<double>(ms) / 1000.0);
    return buf;
}

std::string format_report(const SessionSummary& s, const std::string& title) {
    std::ostringstream out;
    out << title << " (" << format_duration(s.span_ms) << ")\n";
    out << "  Reminders: " << s.reminders();
    out << " (";
    for (auto c : feedback::kCues) {
        out << feedback::display_name(c) << ' ' << s[c].reminders;
        if (c != feedback::Cue::body_movement) out << ", ";
    }
    out << ")";
    if (s.unresolved() > 0) out << ", " << s.unresolved() << " unresolved";
    out << "\n";
    out << "  Best Streak: " << format_duration(s.best_streak_ms) << " (" << s.best_streak_ms << " ms)\n";
    out << "  Response Lag: ";
    if (auto lag = s.mean_lag_ms()) {
        out << format_duration(static_cast<std::int64_t>(*lag + 0.5));
        std::string sep = " (";
        for (auto c : feedback::kCues)
            if (auto cl = s[c].mean_lag_ms()) {
                out << sep << feedback::display_name(c) << ' ' << format_duration(static_cast<std::int64_t>(*cl + 0.5));
                sep = ", ";
            }
        out << ")";
    } else {
        out << "n/a (no resolved reminders)";
    }
    out << "\n";
    return out.str();
}

}  // namespace coach::analytics
