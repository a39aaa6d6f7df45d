#include "coach/feedback/viterbi.hpp"

#include <cmath>
#include <limits>

#include "coach/error.hpp"

namespace coach::feedback {

std::vector<int> viterbi(const CueModel& model, std::span<const Observation> obs) {
    if (obs.empty()) throw Error(Errc::empty_sequence, "cannot decode an empty sequence");
    const auto n = model.states();
    const auto T = obs.size();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> log_a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) log_a[i][j] = std::log(model.transition[i][j]);
    std::vector<std::vector<double>> log_b(T);
    for (std::size_t t = 0; t < T; ++t) log_b[t] = model.log_emissions(obs[t]);

    // suffix[t][i]: best log score of observations t+1.. given state i at t.
    std::vector<std::vector<double>> suffix(T, std::vector<double>(n, 0.0));
    for (std::size_t t = T - 1; t-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = kNegInf;
            for (std::size_t j = 0; j < n; ++j) best = std::max(best, log_a[i][j] + log_b[t + 1][j] + suffix[t + 1][j]);
            suffix[t][i] = best;
        }
    }

    std::vector<int> path(T);
    auto choose = [&](auto&& score) {
        int arg = 0;
        double best = kNegInf;
        for (std::size_t j = 0; j < n; ++j) {
            const double s = score(j);
            if (s > best) {
                best = s;
                arg = static_cast<int>(j);
            }
        }
        return arg;
    };
    path[0] = choose([&](std::size_t j) { return std::log(model.initial[j]) + log_b[0][j] + suffix[0][j]; });
    for (std::size_t t = 1; t < T; ++t) {
        const auto prev = static_cast<std::size_t>(path[t - 1]);
        path[t] = choose([&](std::size_t j) { return log_a[prev][j] + log_b[t][j] + suffix[t][j]; });
    }
    return path;
}

double path_log_score(const CueModel& model, std::span<const Observation> obs, std::span<const int> path) {
    double s = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
        const auto j = static_cast<std::size_t>(path[t]);
        s += t == 0 ? std::log(model.initial[j]) : std::log(model.transition[static_cast<std::size_t>(path[t - 1])][j]);
        s += model.emissions[j].log_density(obs[t]);
    }
    return s;
}

CuePaths decode_sequence(const HmmModel& model, std::span<const FeatureFrame> frames) {
    if (frames.empty()) throw Error(Errc::empty_sequence, "cannot decode an empty sequence");
    CuePaths out;
    for (auto c : kCues) {
        std::vector<Observation> obs;
        obs.reserve(frames.size());
        for (const auto& f : frames) {
            check_finite(f);
            obs.push_back(observe(model[c].features, f));
        }
        out[index(c)] = viterbi(model[c], obs);
    }
    return out;
}

}  // namespace coach::feedback
