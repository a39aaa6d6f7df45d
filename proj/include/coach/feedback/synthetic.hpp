#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "coach/feedback/frame.hpp"

namespace coach::feedback {

/// Mean dwell times of the two-state behaviour process behind one cue.
struct CueBehavior {
    double good_mean_ms = 25000.0;
    double bad_mean_ms = 4000.0;
};

struct BehaviorProfile {
    std::array<CueBehavior, kCueCount> cues;
};

/// Synthetic feature frames standing in for camera and microphone extraction.
/// Each cue alternates between acceptable and needs-feedback behaviour, and
/// frames are drawn from per-behaviour distributions (looking down, not
/// smiling, speaking quietly, fidgeting).
class SyntheticStream {
public:
    SyntheticStream(const BehaviorProfile& profile, std::uint64_t seed, double rate_hz = 30.0, std::int64_t start_ms = 0,
                    std::size_t action_units = 2);

    FeatureFrame next();
    std::int64_t peek_time() const;
    /// Behaviour (0 acceptable, 1 needs feedback) of the frame last returned.
    const std::array<int, kCueCount>& truth() const { return state_; }
    /// Restart the frame clock at `start_ms`, keeping the behaviour process.
    void restart_at(std::int64_t start_ms);
    void force(Cue cue, int state) { state_[index(cue)] = state; }

    static FeatureFrame sample(const std::array<int, kCueCount>& state, std::int64_t t_ms, std::mt19937_64& rng,
                               std::size_t action_units = 2);

private:
    BehaviorProfile profile_;
    std::mt19937_64 rng_;
    double period_ms_;
    std::int64_t start_ms_;
    std::uint64_t k_ = 0;
    std::size_t action_units_;
    std::array<int, kCueCount> state_{};
    bool primed_ = false;
};

}  // namespace coach::feedback
