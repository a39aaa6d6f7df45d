#include "coach/feedback/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace coach::feedback {

SyntheticStream::SyntheticStream(const BehaviorProfile& profile, std::uint64_t seed, double rate_hz, std::int64_t start_ms,
                                 std::size_t action_units)
    : profile_(profile), rng_(seed), period_ms_(1000.0 / rate_hz), start_ms_(start_ms), action_units_(action_units) {}

std::int64_t SyntheticStream::peek_time() const {
    return start_ms_ + static_cast<std::int64_t>(std::llround(static_cast<double>(k_) * period_ms_));
}

void SyntheticStream::restart_at(std::int64_t start_ms) {
    start_ms_ = start_ms;
    k_ = 0;
}

FeatureFrame SyntheticStream::next() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (primed_) {
        for (auto c : kCues) {
            auto& s = state_[index(c)];
            const auto& b = profile_.cues[index(c)];
            const double mean = s == 0 ? b.good_mean_ms : b.bad_mean_ms;
            if (mean > 0.0 && u(rng_) < period_ms_ / mean) s = 1 - s;
        }
    }
    primed_ = true;
    const auto t = peek_time();
    ++k_;
    return sample(state_, t, rng_, action_units_);
}

FeatureFrame SyntheticStream::sample(const std::array<int, kCueCount>& state, std::int64_t t_ms, std::mt19937_64& rng,
                                     std::size_t action_units) {
    auto normal = [&](double mean, double sd) { return std::normal_distribution<double>(mean, sd)(rng); };
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureFrame f;
    f.t_ms = t_ms;

    const bool look_away = state[index(Cue::eye_contact)] != 0;
    f.head.pitch = look_away ? normal(-24.0, 6.0) : normal(0.0, 5.0);
    f.head.yaw = look_away ? normal(0.0, 16.0) : normal(0.0, 6.0);
    f.head.roll = normal(0.0, 4.0);

    const bool flat = state[index(Cue::smile)] != 0;
    f.smile = std::max(0.0, flat ? normal(0.1, 0.15) : normal(1.4, 0.45));
    f.action_units.resize(action_units);
    for (std::size_t i = 0; i < action_units; ++i)
        f.action_units[i] = std::max(0.0, flat ? normal(0.2, 0.2) : normal(1.2 + 0.3 * static_cast<double>(i), 0.4));

    const bool quiet = state[index(Cue::volume)] != 0;
    f.volume_db = quiet ? normal(44.0, 4.0) : normal(62.0, 4.0);
    if (u(rng) < (quiet ? 0.3 : 0.75)) f.pitch_hz = std::max(60.0, quiet ? normal(150.0, 30.0) : normal(190.0, 30.0));

    const bool fidget = state[index(Cue::body_movement)] != 0;
    f.movement = std::max(0.0, fidget ? normal(0.9, 0.25) : normal(0.15, 0.08));
    return f;
}

}  // namespace coach::feedback
