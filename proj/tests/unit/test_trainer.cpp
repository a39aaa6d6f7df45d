#include <doctest.h>

#include <random>
#include <set>

#include "coach/error.hpp"
#include "coach/feedback/viterbi.hpp"
#include "coach/trainer/alpha.hpp"
#include "coach/trainer/fit.hpp"
#include "coach/trainer/marks.hpp"
#include "../support/chain.hpp"
#include "../support/oracles.hpp"

using namespace coach;
using namespace coach::trainer;

namespace {

Errc code_of(auto fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::io_error;
}

MarkMatrix single_cue(const RatingMatrix& m) {
    MarkMatrix out;
    for (std::size_t r = 0; r < m.raters(); ++r) out.raters.push_back("r" + std::to_string(r));
    for (auto& c : out.cues) c.rows.assign(m.raters(), std::vector<std::int8_t>(m.units(), 0));
    out.cues[0] = m;
    return out;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("binning marks") {
    std::vector<RawMark> marks = {{"a", Cue::smile, 1000, 2000}};
    auto m = bin_marks(marks, 500, 5000);
    REQUIRE(m.bins() == 10);
    std::vector<std::int8_t> want(10, 0);
    want[2] = want[3] = 1;
    CHECK(m[Cue::smile].rows[0] == want);
    CHECK(m[Cue::volume].rows[0] == std::vector<std::int8_t>(10, 0));

    // Half a bin is enough, less is not.
    auto half = bin_marks({{"a", Cue::smile, 250, 500}, {"a", Cue::volume, 251, 500}}, 500, 1000);
    CHECK(half[Cue::smile].rows[0][0] == 1);
    CHECK(half[Cue::volume].rows[0][0] == 0);

    auto none = bin_marks({}, 500, 2000, {"a", "b"});
    CHECK(none.raters.size() == 2);
    CHECK(aggregate_labels(none, 1)[Cue::smile] == std::vector<std::uint8_t>(4, 0));

    CHECK(code_of([] { bin_marks({{"a", Cue::smile, 1000, 6000}}, 500, 5000); }) == Errc::interval_out_of_span);
}

TEST_CASE("three of six raters make a label") {
    RatingMatrix m;
    m.rows = {{1, 1, 0}, {1, 1, 0}, {1, 0, 0}, {0, 0, 0}, {0, 0, 1}, {0, 0, 1}};
    auto labels = aggregate_labels(single_cue(m));
    CHECK(labels[Cue::eye_contact] == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(code_of([&] { aggregate_labels(single_cue(m), 7); }) == Errc::threshold_exceeds_raters);
}

TEST_CASE("aggregation matches brute-force counting") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 1000; ++k) {
        RatingMatrix m;
        const std::size_t raters = 3 + rng() % 6, units = 1 + rng() % 30;
        std::bernoulli_distribution mark(0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0);
        m.rows.assign(raters, std::vector<std::int8_t>(units, 0));
        for (auto& row : m.rows)
            for (auto& v : row) v = mark(rng) ? 1 : 0;
        const int threshold = 1 + static_cast<int>(rng() % raters);
        CHECK(aggregate_labels(single_cue(m), threshold)[Cue::eye_contact] == oracle::count_labels(m, threshold));
    }
}

TEST_CASE("krippendorff alpha") {
    RatingMatrix perfect;
    perfect.rows = {{1, 0, 1, 1}, {1, 0, 1, 1}, {1, 0, 1, 1}};
    CHECK(krippendorff_alpha(perfect) == 1.0);

    RatingMatrix worked;
    worked.rows = {{1, 0, 1, 0}, {1, 0, 0, 1}};
    const double hand = oracle::nominal_alpha({{1, 1}, {0, 0}, {1, 0}, {0, 1}});
    CHECK(std::abs(hand - 0.125) < 1e-12);
    CHECK(std::abs(krippendorff_alpha(worked) - hand) < 1e-9);

    RatingMatrix single;
    single.rows = {{1}, {0}};
    CHECK(code_of([&] { krippendorff_alpha(single); }) == Errc::insufficient_data);
    RatingMatrix one_rater;
    one_rater.rows = {{1, 0, 1}};
    CHECK(code_of([&] { krippendorff_alpha(one_rater); }) == Errc::insufficient_data);
}

TEST_CASE("alpha matches the coincidence formula with missing values") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 300; ++k) {
        RatingMatrix m;
        const std::size_t raters = 2 + rng() % 5, units = 3 + rng() % 20;
        m.rows.assign(raters, std::vector<std::int8_t>(units, kMissing));
        std::vector<std::vector<int>> by_unit(units);
        for (std::size_t u = 0; u < units; ++u)
            for (std::size_t r = 0; r < raters; ++r) {
                const auto x = rng() % 4;
                if (x == 3) continue;
                m.rows[r][u] = static_cast<std::int8_t>(x % 2);
                by_unit[u].push_back(static_cast<int>(x % 2));
            }
        double want = 0.0;
        bool defined = true;
        try {
            want = oracle::nominal_alpha(by_unit);
        } catch (...) {
            defined = false;
        }
        std::size_t pairable = 0;
        std::set<int> values;
        for (const auto& u : by_unit)
            if (u.size() >= 2) {
                ++pairable;
                values.insert(u.begin(), u.end());
            }
        if (pairable < 2 || values.size() < 2 || !defined) continue;
        CHECK(std::abs(krippendorff_alpha(m) - want) < 1e-9);
    }
}

TEST_CASE("label files") {
    const std::string text = "rater,cue,start_ms,end_ms\n# comment\nann1,smile,1000,2000\nann2,eye_contact,0,500\n";
    auto marks = parse_label_file(text);
    REQUIRE(marks.size() == 2);
    CHECK(marks[0].rater == "ann1");
    CHECK(marks[1].cue == Cue::eye_contact);
    auto again = parse_label_file(format_label_file(marks));
    CHECK(again.size() == 2);
    CHECK(again[0].end_ms == 2000);
    CHECK(code_of([] { parse_label_file("ann,posture,0,1\n"); }) == Errc::parse_error);
    CHECK(code_of([] { parse_label_file("ann,smile,5,1\n"); }) == Errc::parse_error);
}

TEST_CASE("simulated raters agree with the truth mostly") {
    std::array<std::vector<std::pair<std::int64_t, std::int64_t>>, kCueCount> truth;
    truth[1] = {{10000, 15000}, {40000, 46000}};
    auto marks = simulate_raters(truth, 60000, 6, 3);
    auto m = bin_marks(marks, 500, 60000);
    CHECK(m.raters.size() == 6);
    auto labels = aggregate_labels(m);
    CHECK(labels[Cue::smile][25] == 1);
    CHECK(labels[Cue::smile][60] == 0);
    CHECK(agreement(m).per_cue[1].value() > 0.5);
}

TEST_CASE("transition counts with add-one smoothing") {
    const std::vector<std::vector<int>> zeros = {std::vector<int>(100, 0)};
    auto A = estimate_transitions(zeros, 2);
    CHECK(A[0][0] == doctest::Approx(100.0 / 101.0).epsilon(1e-15));
    CHECK(A[0][1] == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
    CHECK(A[1][0] == 0.5);
    auto pi = estimate_initial(zeros, 2);
    CHECK(pi[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("fit errors") {
    auto g = oracle::known_chain(50, {{0.9, 0.1}, {0.1, 0.9}}, 1);
    auto all_zero = g.data;
    for (auto& l : all_zero.labels.labels) std::fill(l.begin(), l.end(), 0);
    CHECK(code_of([&] { fit_supervised(std::vector<LabeledSequence>{all_zero}); }) == Errc::missing_class);
    auto short_labels = g.data;
    for (auto& l : short_labels.labels.labels) l.pop_back();
    CHECK(code_of([&] { fit_supervised(std::vector<LabeledSequence>{short_labels}); }) == Errc::misaligned_lengths);
    CHECK(code_of([&] { fit_supervised(std::vector<LabeledSequence>{}); }) == Errc::empty_sequence);
}

TEST_CASE("fit recovers a known chain") {
    const std::vector<std::vector<double>> A = {{0.95, 0.05}, {0.10, 0.90}};
    auto g = oracle::known_chain(10000, A, 42);
    const auto model = fit_supervised(std::vector<LabeledSequence>{g.data});
    model.validate();
    for (auto c : feedback::kCues) {
        const auto& m = model[c];
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(m.transition[i][j] - A[i][j]) < 0.05);
    }
    const auto paths = feedback::decode_sequence(model, g.data.frames);
    for (auto c : feedback::kCues) {
        std::size_t hit = 0;
        for (std::size_t t = 0; t < paths[feedback::index(c)].size(); ++t)
            hit += paths[feedback::index(c)][t] == g.states[feedback::index(c)][t];
        CHECK(static_cast<double>(hit) / 10000.0 >= 0.95);
    }
}

}  // TEST_SUITE
