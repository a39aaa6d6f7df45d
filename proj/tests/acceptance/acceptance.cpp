// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coach/analytics/summary.hpp"
#include "coach/feedback/filter.hpp"
#include "coach/feedback/synthetic.hpp"
#include "coach/feedback/viterbi.hpp"
#include "coach/service/record.hpp"
#include "coach/service/session.hpp"
#include "coach/service/simulator.hpp"
#include "coach/trainer/alpha.hpp"
#include "coach/trainer/fit.hpp"
#include "coach/trainer/marks.hpp"
#include "../support/chain.hpp"
#include "../support/oracles.hpp"

using namespace coach;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string run_command(const std::string& cmd) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    char buf[4096];
    while (auto n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    pclose(p);
    return out;
}

feedback::HmmModel uniform_model(const feedback::CueModel& base) {
    feedback::HmmModel m;
    for (auto c : feedback::kCues) {
        m[c] = base;
        m[c].cue = c;
    }
    return m;
}

void hmm_numerics(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + k % 2, dims = 1 + k % 3;
        auto cm = oracle::random_cue_model(rng, n, dims);
        auto obs = oracle::random_observations(rng, 200, dims);
        const auto batch = oracle::forward_marginals(cm, obs);
        std::vector<double> post = cm.initial;
        for (std::size_t t = 0; t < obs.size(); ++t) {
            post = feedback::filter_step(cm, post, t == 0, obs[t]);
            for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(post[j] - batch[t][j]));
        }
    }
    o.require(worst < 1e-9, "streaming vs batch");

    int viterbi_cases = 0, viterbi_bad = 0;
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::size_t T = 1; T <= 8; ++T)
            for (int rep = 0; rep < 20; ++rep) {
                auto cm = oracle::random_cue_model(rng, n, 1 + rep % 2);
                auto obs = oracle::random_observations(rng, T, 1 + rep % 2);
                viterbi_bad += feedback::viterbi(cm, obs) != oracle::exhaustive_viterbi(cm, obs);
                ++viterbi_cases;
            }
    o.require(viterbi_bad == 0, "viterbi vs exhaustive");

    feedback::CueModel base;
    base.features = {feedback::FeatureId::parse("smile")};
    base.initial = {0.6, 0.4};
    base.transition = {{0.9, 0.1}, {0.2, 0.8}};
    base.emissions = {{{0.0}, {1.0}}, {{2.0}, {0.5}}};
    const auto model = uniform_model(base);
    auto s = feedback::FilterState::initial(model);
    const double extremes[] = {0.0, 1e6, -1e9, 1e150, -1e150, 1e-300, 37.0};
    double worst_norm = 0.0;
    bool finite = true;
    const std::int64_t frames = 10 * 60 * 30;
    for (std::int64_t t = 0; t < frames; ++t) {
        feedback::FeatureFrame f;
        f.t_ms = t * 1000 / 30 + 1;
        f.smile = extremes[t % 7];
        f.volume_db = extremes[(t + 3) % 7];
        f.movement = extremes[(t + 5) % 7];
        if (t % 5) f.pitch_hz = 100.0 + static_cast<double>(t % 90);
        s = feedback::ingest_frame(s, model, f);
        for (auto c : feedback::kCues) {
            double z = 0.0;
            for (double p : s[c].posterior) {
                finite = finite && std::isfinite(p);
                z += p;
            }
            worst_norm = std::max(worst_norm, std::abs(z - 1.0));
        }
    }
    o.require(finite && worst_norm < 1e-9, "normalization");
    const double secs = seconds_since(t0);
    o.require(secs < 10.0, "runtime");
    o.detail << "max |stream-batch| " << worst << ", viterbi " << viterbi_cases - viterbi_bad << "/" << viterbi_cases
             << ", " << frames << " extreme frames max |sum-1| " << worst_norm << ", " << secs << " s";
}

void training_recovery(Outcome& o) {
    const auto t0 = Clock::now();
    const std::vector<std::vector<double>> A = {{0.95, 0.05}, {0.10, 0.90}};
    auto g = oracle::known_chain(10000, A, 2024);
    const auto model = trainer::fit_supervised(std::vector<trainer::LabeledSequence>{g.data});
    double worst = 0.0, worst_acc = 1.0;
    const auto paths = feedback::decode_sequence(model, g.data.frames);
    for (auto c : feedback::kCues) {
        const auto ci = feedback::index(c);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(model[c].transition[i][j] - A[i][j]));
        std::size_t hit = 0;
        for (std::size_t t = 0; t < paths[ci].size(); ++t) hit += paths[ci][t] == g.states[ci][t];
        worst_acc = std::min(worst_acc, static_cast<double>(hit) / static_cast<double>(g.states[ci].size()));
    }
    const double secs = seconds_since(t0);
    o.require(worst < 0.05, "transition recovery");
    o.require(worst_acc >= 0.95, "decode accuracy");
    o.require(secs < 30.0, "runtime");
    o.detail << "max |A-A*| " << worst << ", worst decode accuracy " << worst_acc << ", " << secs << " s";
}

void label_pipeline(Outcome& o) {
    std::mt19937_64 rng(303);
    int mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        trainer::RatingMatrix m;
        const std::size_t raters = 3 + rng() % 6, units = 1 + rng() % 40;
        std::bernoulli_distribution mark(0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0);
        m.rows.assign(raters, std::vector<std::int8_t>(units, 0));
        for (auto& row : m.rows)
            for (auto& v : row) v = mark(rng) ? 1 : 0;
        const int threshold = 1 + static_cast<int>(rng() % raters);
        trainer::MarkMatrix mm;
        for (std::size_t r = 0; r < raters; ++r) mm.raters.push_back("r" + std::to_string(r));
        for (auto& c : mm.cues) c = m;
        const auto got = trainer::aggregate_labels(mm, threshold);
        for (auto c : feedback::kCues) mismatches += got[c] != oracle::count_labels(m, threshold);
    }
    o.require(mismatches == 0, "aggregation vs brute force");

    // Default threshold with six raters: bin k is marked by exactly k raters.
    trainer::RatingMatrix six;
    six.rows.assign(6, std::vector<std::int8_t>(7, 0));
    for (std::size_t k = 0; k <= 6; ++k)
        for (std::size_t r = 0; r < k; ++r) six.rows[r][k] = 1;
    trainer::MarkMatrix mm;
    for (int r = 0; r < 6; ++r) mm.raters.push_back("ra" + std::to_string(r));
    for (auto& c : mm.cues) c = six;
    const auto labels = trainer::aggregate_labels(mm);
    o.require(labels[feedback::Cue::smile] == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 1}, "3 of 6 threshold");

    trainer::RatingMatrix perfect;
    perfect.rows.assign(4, std::vector<std::int8_t>(50, 0));
    for (std::size_t u = 0; u < 50; ++u)
        for (auto& row : perfect.rows) row[u] = static_cast<std::int8_t>(u % 3 == 0);
    const double a1 = trainer::krippendorff_alpha(perfect);
    o.require(a1 == 1.0, "perfect agreement");

    trainer::RatingMatrix worked;
    worked.rows = {{1, 0, 1, 0}, {1, 0, 0, 1}};
    const double hand = oracle::nominal_alpha({{1, 1}, {0, 0}, {1, 0}, {0, 1}});
    const double got = trainer::krippendorff_alpha(worked);
    o.require(std::abs(got - hand) < 1e-9 && std::abs(hand - 0.125) < 1e-12, "worked example");
    o.detail << "1000 matrices, " << mismatches << " mismatches; perfect alpha " << a1 << "; worked example " << got
             << " (hand " << hand << ")";
}

void summary_metrics(Outcome& o, const std::string& cli) {
    using Kind = feedback::FeedbackEvent::Kind;
    std::mt19937_64 rng(404);
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
        const std::int64_t span = 5000 + static_cast<std::int64_t>(rng() % 300000);
        auto tl = oracle::random_timeline(rng, span);
        const auto got = analytics::compute_summary(tl);
        const auto want = oracle::sweep_summary(tl);
        double mean = 0.0;
        if (!want.lags.empty())
            mean = std::accumulate(want.lags.begin(), want.lags.end(), 0.0) / static_cast<double>(want.lags.size());
        const bool same = got.reminders() == want.reminders && got.unresolved() == want.unresolved &&
                          got.best_streak_ms == want.best_streak_ms &&
                          got.resolved_pairs() == static_cast<int>(want.lags.size()) &&
                          (want.lags.empty() ? !got.mean_lag_ms() : std::abs(*got.mean_lag_ms() - mean) < 1e-9);
        bad += !same;
    }
    o.require(bad == 0, "random timelines vs sweep");

    const analytics::SessionTimeline worked{300000,
                                            {{feedback::Cue::smile, Kind::reminder_start, 10000, {}},
                                             {feedback::Cue::smile, Kind::resolved, 14000, {}},
                                             {feedback::Cue::eye_contact, Kind::reminder_start, 100000, {}},
                                             {feedback::Cue::eye_contact, Kind::resolved, 107000, {}}}};
    const auto ws = analytics::compute_summary(worked);
    o.require(ws.best_streak_ms == 193000 && oracle::sweep_summary(worked).best_streak_ms == 193000, "193000 ms streak");
    o.require(ws.reminders() == 2 && ws.mean_lag_ms() && *ws.mean_lag_ms() == 5500.0, "worked lag");

    const auto dir = std::filesystem::temp_directory_path() / "coach-acceptance-cli";
    std::filesystem::remove_all(dir);
    const std::string env = "COACH_DATA_DIR='" + dir.string() + "' '" + cli + "' ";
    const auto sim = run_command(env + "simulate --seed 9 --quiet --script '" + oracle::scripts_dir() + "/typical.json' 2>&1");
    const auto sum = run_command(env + "summarize --session sim-9 2>&1");
    std::filesystem::remove_all(dir);
    bool names = true;
    for (const char* name : {"Reminders", "Best Streak", "Response Lag"})
        names = names && sim.find(name) != std::string::npos && sum.find(name) != std::string::npos;
    o.require(names, "names in CLI output");
    o.detail << "100 timelines, " << bad << " mismatches; worked streak " << ws.best_streak_ms
             << " ms; CLI shows Reminders / Best Streak / Response Lag: " << (names ? "yes" : "no");
}

struct SimRun {
    service::SimulationResult result;
    std::vector<std::string> record;
};

std::vector<SimRun> run_sessions(service::AssetsPtr assets, service::ModelPtr model) {
    const char* names[] = {"typical", "laconic", "verbose"};
    std::vector<service::ScriptedUser> users;
    for (const char* n : names) users.push_back(service::load_script(oracle::scripts_dir() + "/" + n + ".json"));
    std::vector<SimRun> runs;
    for (int k = 0; k < 200; ++k) {
        service::SimulationOptions opt;
        opt.seed = static_cast<std::uint64_t>(1000 + k);
        auto sink = std::make_shared<service::MemorySink>();
        auto r = service::simulate(users[static_cast<std::size_t>(k) % users.size()], opt, assets, model, sink);
        runs.push_back({std::move(r), std::move(sink->lines)});
    }
    return runs;
}

void dialogue_engine(Outcome& o, const std::vector<SimRun>& runs, service::AssetsPtr assets, service::ModelPtr model) {
    int repeats = 0, unanswered = 0, mismatched = 0, shallow = 0, errors = 0, replay_bad = 0, max_depth = 0;
    long user_turns = 0;
    for (const auto& r : runs) {
        repeats += r.result.repeated_asks;
        unanswered += r.result.turns_without_reply;
        mismatched += r.result.agent_turns != r.result.user_turns;
        shallow += r.result.max_depth < 2;
        max_depth = std::max(max_depth, r.result.max_depth);
        errors += r.result.errors;
        user_turns += r.result.user_turns;
        replay_bad += !service::replay(r.record, assets, model).identical;
    }
    o.require(repeats == 0, "no repeated questions");
    o.require(max_depth >= 2, "splice depth");
    o.require(unanswered == 0 && mismatched == 0, "one agent turn per user turn");
    o.require(replay_bad == 0, "byte-exact replay");
    o.require(errors == 0, "no session errors");
    o.detail << runs.size() << " sessions, " << user_turns << " user turns, " << repeats << " repeated asks, "
             << unanswered + mismatched << " turn mismatches, max depth " << max_depth << " (" << runs.size() - shallow
             << " sessions reach 2), " << runs.size() - static_cast<std::size_t>(replay_bad) << " identical replays";
}

void session_shape(Outcome& o, const std::vector<SimRun>& runs, service::AssetsPtr assets) {
    const service::SessionConfig config;
    const auto w = config.conversation_windows();
    const bool windows = w.size() == 2 && w[0].start_ms == 0 && w[0].end_ms == 300000 && w[1].start_ms == 420000 &&
                         w[1].end_ms == 660000;
    o.require(windows, "default windows");
    o.require(!runs.empty(), "simulated sessions available");

    std::vector<std::string> expected;
    for (const auto& id : assets->default_topics) expected.push_back(assets->schemas.find(id)->topic);
    int out_of_window = 0, wrong_topics = 0, wrong_spans = 0;
    for (const auto& r : runs) {
        wrong_topics += r.result.topics != expected;
        for (const auto& m : r.result.outputs) {
            std::int64_t t = -1;
            if (const auto* a = std::get_if<dialogue::AgentTurn>(&m.payload)) t = a->t_ms;
            if (const auto* e = std::get_if<feedback::FeedbackEvent>(&m.payload)) t = e->t_ms;
            if (t < 0) continue;
            const bool inside = std::any_of(w.begin(), w.end(), [&](const auto& x) { return t >= x.start_ms && t < x.end_ms; });
            out_of_window += !inside;
        }
        bool spans = false;
        for (const auto& m : r.result.outputs)
            if (const auto* s = std::get_if<service::SummaryMsg>(&m.payload))
                spans = s->segments.size() == 2 && s->segments[0].span_ms == 300000 && s->segments[1].span_ms == 240000;
        wrong_spans += !spans;
    }
    o.require(out_of_window == 0, "outputs inside conversation windows");
    o.require(wrong_spans == 0, "segment spans");
    o.require(wrong_topics == 0, "topic order");
    o.detail << "windows [0,300000) [420000,660000); " << out_of_window << " outputs outside; " << runs.size() - wrong_topics
             << "/" << runs.size() << " sessions covered all " << expected.size() << " topics in order";
}

void latency(Outcome& o, service::AssetsPtr assets, service::ModelPtr model) {
    service::Session session("latency", service::SessionConfig{}, assets, model);
    session.take_pending();
    feedback::BehaviorProfile profile;
    feedback::SyntheticStream stream(profile, 77, 30.0);
    std::vector<double> ms;
    for (const auto& w : session.config().conversation_windows()) {
        stream.restart_at(w.start_ms);
        while (stream.peek_time() < w.end_ms) {
            const auto f = stream.next();
            const auto t0 = Clock::now();
            session.frame(f);
            ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        }
    }
    std::sort(ms.begin(), ms.end());
    const double p99 = ms[static_cast<std::size_t>(0.99 * static_cast<double>(ms.size() - 1))];
    o.require(p99 < 100.0, "p99 under 100 ms");
    o.detail << ms.size() << " frames at 30 Hz, four cues: p50 " << ms[ms.size() / 2] << " ms, p99 " << p99 << " ms, max "
             << ms.back() << " ms";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "coach";
    auto assets = dialogue::load_dialogue_assets(oracle::rules_dir());
    auto model = service::load_model(oracle::demo_model());
    std::vector<SimRun> runs;

    struct Criterion {
        const char* name;
        std::function<void(Outcome&)> check;
    };
    const std::vector<Criterion> criteria = {
        {"hmm-numerics", hmm_numerics},
        {"training-recovery", training_recovery},
        {"label-pipeline", label_pipeline},
        {"summary-metrics", [&](Outcome& o) { summary_metrics(o, cli); }},
        {"dialogue-engine",
         [&](Outcome& o) {
             runs = run_sessions(assets, model);
             dialogue_engine(o, runs, assets, model);
         }},
        {"session-shape", [&](Outcome& o) { session_shape(o, runs, assets); }},
        {"latency", [&](Outcome& o) { latency(o, assets, model); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            c.check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail.str() << std::endl;
    }
    return failed ? 1 : 0;
}
