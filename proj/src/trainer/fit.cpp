#include "coach/trainer/fit.hpp"

#include <algorithm>

#include "coach/error.hpp"

namespace coach::trainer {

using feedback::Cue;
using FK = FeatureId::Kind;

std::array<std::vector<FeatureId>, kCueCount> default_cue_features() {
    std::array<std::vector<FeatureId>, kCueCount> f;
    f[feedback::index(Cue::eye_contact)] = {{FK::head_pitch}, {FK::head_yaw}};
    f[feedback::index(Cue::smile)] = {{FK::smile}, {FK::action_unit, 0}, {FK::action_unit, 1}};
    f[feedback::index(Cue::volume)] = {{FK::volume_db}, {FK::pitch_hz}};
    f[feedback::index(Cue::body_movement)] = {{FK::movement}};
    return f;
}

std::vector<std::vector<double>> estimate_transitions(std::span<const std::vector<int>> seqs, std::size_t n) {
    std::vector<std::vector<double>> counts(n, std::vector<double>(n, 1.0));
    for (const auto& seq : seqs)
        for (std::size_t t = 1; t < seq.size(); ++t)
            counts[static_cast<std::size_t>(seq[t - 1])][static_cast<std::size_t>(seq[t])] += 1.0;
    for (auto& row : counts) {
        double total = 0.0;
        for (double c : row) total += c;
        for (auto& c : row) c /= total;
    }
    return counts;
}

std::vector<double> estimate_initial(std::span<const std::vector<int>> seqs, std::size_t n) {
    std::vector<double> counts(n, 1.0);
    double total = static_cast<double>(n);
    for (const auto& seq : seqs)
        if (!seq.empty()) {
            counts[static_cast<std::size_t>(seq.front())] += 1.0;
            total += 1.0;
        }
    for (auto& c : counts) c /= total;
    return counts;
}

feedback::CueModel fit_cue(Cue cue, std::vector<FeatureId> features, std::span<const std::vector<Observation>> observations,
                           std::span<const std::vector<int>> states, std::size_t n, double variance_floor) {
    const auto dims = features.size();
    // Per state and dimension: count, sum, sum of squares; slot n pools every state.
    std::vector<std::vector<double>> cnt(n + 1, std::vector<double>(dims)), sum = cnt, sq = cnt;
    std::vector<std::size_t> occurrences(n, 0);
    for (std::size_t s = 0; s < observations.size(); ++s) {
        if (observations[s].size() != states[s].size())
            throw Error(Errc::misaligned_lengths, "observation and state sequences differ in length");
        for (std::size_t t = 0; t < states[s].size(); ++t) {
            const auto st = static_cast<std::size_t>(states[s][t]);
            if (st >= n) throw Error(Errc::invalid_config, "state label out of range");
            ++occurrences[st];
            for (std::size_t d = 0; d < dims; ++d) {
                const auto& v = observations[s][t][d];
                if (!v) continue;
                for (auto slot : {st, n}) {
                    cnt[slot][d] += 1.0;
                    sum[slot][d] += *v;
                    sq[slot][d] += *v * *v;
                }
            }
        }
    }
    for (std::size_t st = 0; st < n; ++st)
        if (occurrences[st] == 0)
            throw Error(Errc::missing_class, std::string(feedback::to_string(cue)) + " has no frames labelled " + std::to_string(st));

    feedback::CueModel m;
    m.cue = cue;
    m.features = std::move(features);
    m.initial = estimate_initial(states, n);
    m.transition = estimate_transitions(states, n);
    auto moments = [&](std::size_t slot, std::size_t d) -> std::pair<double, double> {
        const double c = cnt[slot][d];
        const double mean = sum[slot][d] / c;
        return {mean, std::max(variance_floor, sq[slot][d] / c - mean * mean)};
    };
    for (std::size_t st = 0; st < n; ++st) {
        feedback::GaussianEmission e;
        for (std::size_t d = 0; d < dims; ++d) {
            // A dimension never observed in this state falls back to the pooled estimate.
            auto [mean, var] = cnt[st][d] > 0 ? moments(st, d) : cnt[n][d] > 0 ? moments(n, d) : std::pair{0.0, 1.0};
            e.mean.push_back(mean);
            e.var.push_back(var);
        }
        m.emissions.push_back(std::move(e));
    }
    m.validate(variance_floor);
    return m;
}

feedback::HmmModel fit_supervised(std::span<const LabeledSequence> data, const FitOptions& options) {
    if (std::none_of(data.begin(), data.end(), [](const LabeledSequence& s) { return !s.frames.empty(); }))
        throw Error(Errc::empty_sequence, "no labelled frames to train on");
    feedback::HmmModel model;
    model.variance_floor = options.variance_floor;
    for (auto c : feedback::kCues) {
        const auto ci = feedback::index(c);
        std::vector<std::vector<Observation>> obs;
        std::vector<std::vector<int>> states;
        for (const auto& seq : data) {
            const auto& labels = seq.labels.labels[ci];
            if (seq.frames.empty()) continue;
            const auto bin = seq.labels.bin_ms;
            const auto last_bin = static_cast<std::size_t>(seq.frames.back().t_ms / bin);
            if (last_bin + 1 != labels.size())
                throw Error(Errc::misaligned_lengths, std::to_string(labels.size()) + " label bins for frames spanning " +
                                                          std::to_string(last_bin + 1) + " bins");
            auto& o = obs.emplace_back();
            auto& s = states.emplace_back();
            for (const auto& f : seq.frames) {
                if (f.t_ms < 0) throw Error(Errc::misaligned_lengths, "frame before the label track");
                feedback::check_finite(f);
                o.push_back(feedback::observe(options.features[ci], f));
                s.push_back(labels[static_cast<std::size_t>(f.t_ms / bin)]);
            }
        }
        model.cues[ci] = fit_cue(c, options.features[ci], obs, states, 2, options.variance_floor);
    }
    return model;
}

}  // namespace coach::trainer
