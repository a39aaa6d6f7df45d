#include <doctest.h>

#include <numeric>
#include <random>

#include "coach/analytics/summary.hpp"
#include "coach/error.hpp"
#include "../support/oracles.hpp"

using namespace coach;
using namespace coach::analytics;
using Kind = feedback::FeedbackEvent::Kind;

namespace {

FeedbackEvent ev(Cue c, Kind k, std::int64_t t) { return {c, k, t, {}}; }

SessionTimeline two_reminders() {
    return {300000,
            {ev(Cue::smile, Kind::reminder_start, 10000), ev(Cue::smile, Kind::resolved, 14000),
             ev(Cue::eye_contact, Kind::reminder_start, 100000), ev(Cue::eye_contact, Kind::resolved, 107000)}};
}

}  // namespace

TEST_SUITE("analytics") {

TEST_CASE("timeline validation") {
    CHECK_FALSE(validate_timeline({300000, {}}));
    auto twice = validate_timeline({1000, {ev(Cue::smile, Kind::reminder_start, 10), ev(Cue::smile, Kind::reminder_start, 20)}});
    REQUIRE(twice);
    CHECK(twice->kind == Violation::Kind::alternation);
    CHECK(twice->event_index == 1);
    auto late = validate_timeline({1000, {ev(Cue::smile, Kind::reminder_start, 1001)}});
    REQUIRE(late);
    CHECK(late->kind == Violation::Kind::span);
    auto order = validate_timeline({1000, {ev(Cue::smile, Kind::reminder_start, 50), ev(Cue::volume, Kind::reminder_start, 40)}});
    REQUIRE(order);
    CHECK(order->kind == Violation::Kind::ordering);
    CHECK(validate_timeline({1000, {ev(Cue::smile, Kind::resolved, 5)}})->kind == Violation::Kind::alternation);
    try {
        compute_summary({1000, {ev(Cue::smile, Kind::resolved, 5)}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_timeline);
    }
}

TEST_CASE("empty timeline") {
    auto s = compute_summary({300000, {}});
    CHECK(s.reminders() == 0);
    CHECK(s.best_streak_ms == 300000);
    CHECK_FALSE(s.mean_lag_ms());
}

TEST_CASE("two reminders") {
    auto s = compute_summary(two_reminders());
    CHECK(s.reminders() == 2);
    CHECK(s[Cue::smile].total_lag_ms == 4000);
    CHECK(s[Cue::eye_contact].total_lag_ms == 7000);
    CHECK(*s.mean_lag_ms() == 5500.0);
    CHECK(s.best_streak_ms == 193000);
    CHECK(s.unresolved() == 0);
}

TEST_CASE("overlapping reminders") {
    auto s = compute_summary({300000,
                              {ev(Cue::smile, Kind::reminder_start, 50000), ev(Cue::volume, Kind::reminder_start, 55000),
                               ev(Cue::smile, Kind::resolved, 60000), ev(Cue::volume, Kind::resolved, 70000)}});
    CHECK(s.best_streak_ms == 230000);
    CHECK(s.resolved_pairs() == 2);
}

TEST_CASE("open reminders run to the end of the span") {
    auto s = compute_summary({60000, {ev(Cue::body_movement, Kind::reminder_start, 20000)}});
    CHECK(s.reminders() == 1);
    CHECK(s.unresolved() == 1);
    CHECK_FALSE(s.mean_lag_ms());
    CHECK(s.best_streak_ms == 20000);
}

TEST_CASE("summary matches the millisecond sweep") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        const std::int64_t span = 5000 + static_cast<std::int64_t>(rng() % 60000);
        auto tl = oracle::random_timeline(rng, span);
        REQUIRE_FALSE(validate_timeline(tl));
        const auto got = compute_summary(tl);
        const auto want = oracle::sweep_summary(tl);
        CHECK(got.reminders() == want.reminders);
        CHECK(got.unresolved() == want.unresolved);
        CHECK(got.best_streak_ms == want.best_streak_ms);
        CHECK(got.resolved_pairs() == static_cast<int>(want.lags.size()));
        if (!want.lags.empty()) {
            const double mean = std::accumulate(want.lags.begin(), want.lags.end(), 0.0) / static_cast<double>(want.lags.size());
            CHECK(*got.mean_lag_ms() == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("combining segments") {
    auto a = compute_summary(two_reminders());
    auto b = compute_summary({240000, {ev(Cue::volume, Kind::reminder_start, 1000)}});
    auto all = combine_summaries({a, b});
    CHECK(all.span_ms == 540000);
    CHECK(all.reminders() == 3);
    CHECK(all.unresolved() == 1);
    CHECK(all.best_streak_ms == 193000);
    CHECK(*all.mean_lag_ms() == 5500.0);

    auto joined = concatenate({two_reminders(), {240000, {ev(Cue::volume, Kind::reminder_start, 1000)}}});
    CHECK(joined.span_ms == 540000);
    CHECK(joined.events.back().t_ms == 301000);
}

TEST_CASE("report uses the on-screen names") {
    const auto r = format_report(compute_summary(two_reminders()), "Session");
    CHECK(r.find("Reminders") != std::string::npos);
    CHECK(r.find("Best Streak") != std::string::npos);
    CHECK(r.find("Response Lag") != std::string::npos);
    CHECK(format_duration(193000) == "3 min 13 s");
    CHECK(format_duration(5500) == "5.5 s");
}

}  // TEST_SUITE
