#include "coach/feedback/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coach/error.hpp"

namespace coach::feedback {

double CueFilter::needs_feedback() const {
    double p = 0.0;
    for (std::size_t s = 1; s < posterior.size(); ++s) p += posterior[s];
    return p;
}

FilterState FilterState::initial(const HmmModel& model) {
    FilterState st;
    for (auto c : kCues) st.cues[index(c)].posterior = model[c].initial;
    return st;
}

double log_sum_exp(std::span<const double> values) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<double> filter_step(const CueModel& model, std::span<const double> prior, bool first, const Observation& obs) {
    const auto n = model.states();
    std::vector<double> log_pred(n);
    if (first) {
        for (std::size_t j = 0; j < n; ++j) log_pred[j] = std::log(model.initial[j]);
    } else {
        std::vector<double> terms(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) terms[i] = std::log(prior[i]) + std::log(model.transition[i][j]);
            log_pred[j] = log_sum_exp(terms);
        }
    }
    const auto log_b = model.log_emissions(obs);
    std::vector<double> log_post(n);
    for (std::size_t j = 0; j < n; ++j) log_post[j] = log_pred[j] + log_b[j];
    double z = log_sum_exp(log_post);
    if (!std::isfinite(z)) {
        log_post = log_pred;
        z = log_sum_exp(log_post);
    }
    std::vector<double> post(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += post[j] = std::exp(log_post[j] - z);
    for (auto& p : post) p /= total;
    return post;
}

FilterState ingest_frame(const FilterState& state, const HmmModel& model, const FeatureFrame& frame) {
    if (state.last_t_ms && frame.t_ms <= *state.last_t_ms)
        throw Error(Errc::non_monotonic_timestamp,
                    "frame at " + std::to_string(frame.t_ms) + " ms after " + std::to_string(*state.last_t_ms) + " ms");
    check_finite(frame);
    FilterState next;
    next.last_t_ms = frame.t_ms;
    for (auto c : kCues) {
        const auto& cm = model[c];
        const auto& cur = state[c];
        auto& out = next.cues[index(c)];
        out.posterior = filter_step(cm, cur.posterior, !cur.started, observe(cm.features, frame));
        out.started = true;
    }
    return next;
}

}  // namespace coach::feedback
