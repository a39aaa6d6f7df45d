#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "coach/error.hpp"
#include "coach/feedback/filter.hpp"
#include "coach/feedback/icons.hpp"
#include "coach/feedback/synthetic.hpp"
#include "coach/feedback/viterbi.hpp"
#include "../support/oracles.hpp"

using namespace coach;
using namespace coach::feedback;

namespace {

// Every cue gets a copy of `base` watching the smile channel.
HmmModel uniform_model(const CueModel& base) {
    HmmModel m;
    for (auto c : kCues) {
        m[c] = base;
        m[c].cue = c;
    }
    return m;
}

CueModel two_state() {
    CueModel m;
    m.features = {FeatureId::parse("smile")};
    m.initial = {0.6, 0.4};
    m.transition = {{0.9, 0.1}, {0.2, 0.8}};
    m.emissions = {{{0.0}, {1.0}}, {{2.0}, {0.5}}};
    return m;
}

FeatureFrame smile_frame(std::int64_t t, double smile) {
    FeatureFrame f;
    f.t_ms = t;
    f.smile = smile;
    return f;
}

Errc code_of(auto fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::io_error;
}

}  // namespace

TEST_SUITE("feedback") {

TEST_CASE("cue names and features") {
    CHECK(cue_from_string("eye contact") == Cue::eye_contact);
    CHECK(cue_from_string("eye-contact") == Cue::eye_contact);
    CHECK(cue_from_string("body_movement") == Cue::body_movement);
    CHECK_FALSE(cue_from_string("posture"));
    FeatureFrame f;
    f.action_units = {0.5};
    CHECK(FeatureId::parse("au:0").value(f) == 0.5);
    CHECK_FALSE(FeatureId::parse("au:3").value(f));
    CHECK_FALSE(FeatureId::parse("pitch_hz").value(f));
    CHECK(FeatureId::parse("head_yaw").name() == "head_yaw");
}

TEST_CASE("identical emissions leave the prediction unchanged") {
    CueModel flat = two_state();
    flat.transition = {{0.5, 0.5}, {0.5, 0.5}};
    flat.emissions = {{{1.0}, {2.0}}, {{1.0}, {2.0}}};
    auto model = uniform_model(flat);
    auto s = FilterState::initial(model);
    s = ingest_frame(s, model, smile_frame(0, 3.0));
    CHECK(s[Cue::smile].posterior[0] == doctest::Approx(0.6).epsilon(1e-12));
    s = ingest_frame(s, model, smile_frame(33, -4.0));
    CHECK(s[Cue::smile].posterior[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s[Cue::smile].posterior[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("three frames match the forward recursion and the path sum") {
    auto cm = two_state();
    auto model = uniform_model(cm);
    const std::vector<double> xs = {0.3, 1.7, 2.4};
    std::vector<Observation> obs;
    auto s = FilterState::initial(model);
    for (std::size_t t = 0; t < xs.size(); ++t) {
        s = ingest_frame(s, model, smile_frame(static_cast<std::int64_t>(t) * 33, xs[t]));
        obs.push_back({xs[t]});
        const auto batch = oracle::forward_marginals(cm, obs).back();
        const auto paths = oracle::sum_over_paths(cm, obs);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(s[Cue::smile].posterior[j] - batch[j]) < 1e-9);
            CHECK(std::abs(s[Cue::smile].posterior[j] - paths[j]) < 1e-9);
        }
    }
}

TEST_CASE("streaming equals batch on random models") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + k % 2, dims = 1 + k % 3;
        auto cm = oracle::random_cue_model(rng, n, dims);
        auto obs = oracle::random_observations(rng, 200, dims);
        const auto batch = oracle::forward_marginals(cm, obs);
        std::vector<double> post = cm.initial;
        double worst = 0.0;
        for (std::size_t t = 0; t < obs.size(); ++t) {
            post = filter_step(cm, post, t == 0, obs[t]);
            for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(post[j] - batch[t][j]));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("path sum agrees with the recursion on short random sequences") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 40; ++k) {
        auto cm = oracle::random_cue_model(rng, 2 + k % 2, 1);
        auto obs = oracle::random_observations(rng, 1 + k % 6, 1);
        const auto a = oracle::forward_marginals(cm, obs).back();
        const auto b = oracle::sum_over_paths(cm, obs);
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-12);
    }
}

TEST_CASE("posteriors stay normalized under extreme inputs") {
    auto model = uniform_model(two_state());
    auto s = FilterState::initial(model);
    const double extremes[] = {0.0, 1e6, -1e9, 1e150, -1e150, 1e-300, 37.0};
    for (std::int64_t t = 0; t < 18000; ++t) {
        auto f = smile_frame(t * 33 + 1, extremes[t % 7]);
        f.volume_db = extremes[(t + 3) % 7];
        if (t % 5) f.pitch_hz = 100.0 + static_cast<double>(t % 90);
        s = ingest_frame(s, model, f);
        if (t % 997 == 0 || t == 17999)
            for (auto c : kCues) {
                double z = 0.0;
                for (double p : s[c].posterior) {
                    REQUIRE(std::isfinite(p));
                    z += p;
                }
                REQUIRE(std::abs(z - 1.0) < 1e-9);
            }
    }
}

TEST_CASE("ingest rejects bad frames") {
    auto model = uniform_model(two_state());
    auto s = ingest_frame(FilterState::initial(model), model, smile_frame(100, 0.0));
    auto nan = smile_frame(200, 0.0);
    nan.volume_db = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of([&] { ingest_frame(s, model, nan); }) == Errc::non_finite_feature);
    CHECK(code_of([&] { ingest_frame(s, model, smile_frame(100, 0.0)); }) == Errc::non_monotonic_timestamp);
    CHECK(code_of([&] { ingest_frame(s, model, smile_frame(50, 0.0)); }) == Errc::non_monotonic_timestamp);
}

TEST_CASE("icon hysteresis") {
    FeedbackPolicy policy;  // 0.8 / 0.4, dwell 500 ms, min red 1500 ms
    std::array<double, kCueCount> p{};
    auto icons = IconState::all_green(0);

    p[index(Cue::smile)] = 0.95;
    std::vector<FeedbackEvent> events;
    for (std::int64_t t = 0; t <= 700; t += 100) {
        auto d = decide_icons(p, icons, t, policy);
        icons = d.icons;
        events.insert(events.end(), d.events.begin(), d.events.end());
    }
    CHECK(icons[Cue::smile].color == IconColor::flashing_red);
    REQUIRE(events.size() == 1);
    CHECK(events[0] == FeedbackEvent{Cue::smile, FeedbackEvent::Kind::reminder_start, 500, {}});

    // Inside the band nothing moves, in either color.
    p[index(Cue::smile)] = 0.5;
    p[index(Cue::volume)] = 0.5;
    auto band = decide_icons(p, icons, 1200, policy);
    CHECK(band.events.empty());
    CHECK(band.icons[Cue::smile].color == IconColor::flashing_red);
    CHECK(band.icons[Cue::volume].color == IconColor::green);

    // Too soon to clear.
    p[index(Cue::smile)] = 0.2;
    CHECK(decide_icons(p, icons, 1500, policy).events.empty());
    auto clear = decide_icons(p, icons, 2500, policy);
    REQUIRE(clear.events.size() == 1);
    CHECK(clear.events[0].kind == FeedbackEvent::Kind::resolved);
    CHECK(clear.icons[Cue::smile].color == IconColor::green);

    // A dip below the on-threshold restarts the dwell.
    auto fresh = IconState::all_green(0);
    std::array<double, kCueCount> q{};
    q[0] = 0.9;
    fresh = decide_icons(q, fresh, 0, policy).icons;
    q[0] = 0.7;
    fresh = decide_icons(q, fresh, 300, policy).icons;
    q[0] = 0.9;
    fresh = decide_icons(q, fresh, 400, policy).icons;
    CHECK(decide_icons(q, fresh, 800, policy).events.empty());
    CHECK(decide_icons(q, fresh, 900, policy).events.size() == 1);
}

TEST_CASE("positive acknowledgment") {
    FeedbackPolicy policy;
    FeedbackEvent resolved{Cue::eye_contact, FeedbackEvent::Kind::resolved, 20000, {}};
    CueIcon green{IconColor::green, 20000, std::nullopt};
    CHECK(emit_positive_ack(resolved, green, 30000, false, policy) == "You have good eye contact now");
    CHECK_FALSE(emit_positive_ack(resolved, green, 29999, false, policy));
    CueIcon red_again{IconColor::flashing_red, 24000, std::nullopt};
    CHECK_FALSE(emit_positive_ack(resolved, red_again, 30000, false, policy));
    CHECK_FALSE(emit_positive_ack(resolved, green, 30000, true, policy));

    AckTracker acks;
    auto icons = IconState::all_green(0);
    icons.cues[0] = green;
    acks.observe(resolved);
    CHECK(acks.poll(icons, 25000, policy).empty());
    auto first = acks.poll(icons, 30000, policy);
    REQUIRE(first.size() == 1);
    CHECK(first[0].kind == FeedbackEvent::Kind::positive_ack);
    CHECK(first[0].text == "You have good eye contact now");

    // Second resolution in the same segment: no praise.
    FeedbackEvent again{Cue::eye_contact, FeedbackEvent::Kind::resolved, 50000, {}};
    icons.cues[0] = {IconColor::green, 50000, std::nullopt};
    acks.observe(again);
    CHECK(acks.poll(icons, 70000, policy).empty());
    acks.reset();
    acks.observe(again);
    CHECK(acks.poll(icons, 70000, policy).size() == 1);
}

TEST_CASE("viterbi matches exhaustive search") {
    std::mt19937_64 rng(21);
    int cases = 0;
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::size_t T = 1; T <= 8; ++T)
            for (int rep = 0; rep < 6; ++rep) {
                auto cm = oracle::random_cue_model(rng, n, 1 + rep % 2);
                auto obs = oracle::random_observations(rng, T, 1 + rep % 2);
                const auto got = viterbi(cm, obs);
                CHECK(got == oracle::exhaustive_viterbi(cm, obs));
                std::vector<int> path(got.begin(), got.end());
                CHECK(std::abs(path_log_score(cm, obs, path) - oracle::path_log(cm, obs, path)) < 1e-9);
                ++cases;
            }
    CHECK(cases == 144);
}

TEST_CASE("viterbi corner cases") {
    CueModel one;
    one.features = {FeatureId::parse("smile")};
    one.initial = {1.0};
    one.transition = {{1.0}};
    one.emissions = {{{0.0}, {1.0}}};
    const std::vector<Observation> obs = {{1.0}, {-2.0}, {5.0}};
    CHECK(viterbi(one, obs) == std::vector<int>{0, 0, 0});

    // Symmetric model: every path scores the same, lowest path wins.
    CueModel sym = two_state();
    sym.initial = {0.5, 0.5};
    sym.transition = {{0.5, 0.5}, {0.5, 0.5}};
    sym.emissions = {{{0.0}, {1.0}}, {{0.0}, {1.0}}};
    CHECK(viterbi(sym, obs) == std::vector<int>{0, 0, 0});

    CHECK(code_of([&] { viterbi(sym, std::vector<Observation>{}); }) == Errc::empty_sequence);

    auto model = uniform_model(two_state());
    std::vector<FeatureFrame> frames = {smile_frame(0, 0.0), smile_frame(33, 2.2), smile_frame(66, 2.1), smile_frame(99, 0.1)};
    auto paths = decode_sequence(model, frames);
    std::vector<Observation> o;
    for (const auto& f : frames) o.push_back({f.smile});
    CHECK(paths[index(Cue::smile)] == oracle::exhaustive_viterbi(two_state(), o));
}

TEST_CASE("model serialization round trips byte for byte") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        HmmModel m;
        for (auto c : kCues) {
            m[c] = oracle::random_cue_model(rng, 2 + k % 2, 1 + k % 3);
            m[c].cue = c;
        }
        const auto text = write_model(m);
        const auto back = read_model(text);
        CHECK(write_model(back) == text);
        CHECK(back[Cue::volume].transition == m[Cue::volume].transition);
        CHECK(back[Cue::volume].emissions[0].mean == m[Cue::volume].emissions[0].mean);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

    auto demo = load_model_file(oracle::demo_model());
    demo.validate();
    CHECK(read_model(write_model(demo))[Cue::smile].features == demo[Cue::smile].features);
}

TEST_CASE("invalid models") {
    auto bad = uniform_model(two_state());
    bad[Cue::smile].transition[0] = {0.7, 0.7};
    CHECK(code_of([&] { bad.validate(); }) == Errc::invalid_model);
    auto tiny = uniform_model(two_state());
    tiny[Cue::volume].emissions[1].var[0] = 1e-9;
    CHECK(code_of([&] { tiny.validate(); }) == Errc::invalid_model);
    CHECK(code_of([] { load_model_file("/nonexistent/model.hmm"); }) == Errc::model_load_failure);
    CHECK_THROWS_AS(read_model("not a model"), Error);
}

TEST_CASE("synthetic stream") {
    BehaviorProfile profile;
    SyntheticStream s(profile, 4);
    std::int64_t last = -1;
    std::array<int, kCueCount> flips{};
    std::array<int, kCueCount> prev{};
    for (int k = 0; k < 30 * 120; ++k) {
        const auto predicted = s.peek_time();
        auto f = s.next();
        CHECK(f.t_ms == predicted);
        CHECK(f.t_ms > last);
        if (last >= 0) CHECK((f.t_ms - last == 33 || f.t_ms - last == 34));
        last = f.t_ms;
        check_finite(f);
        for (auto c : kCues) {
            flips[index(c)] += s.truth()[index(c)] != prev[index(c)];
            prev[index(c)] = s.truth()[index(c)];
        }
    }
    for (int n : flips) CHECK(n > 0);
    s.restart_at(500000);
    CHECK(s.next().t_ms == 500000);
}

}  // TEST_SUITE
