#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coach/feedback/frame.hpp"
#include "coach/feedback/hmm.hpp"

namespace coach::feedback {

struct CueFilter {
    std::vector<double> posterior;
    bool started = false;  // false until the first frame has been absorbed

    /// Probability mass on the needs-feedback states (every state but 0).
    double needs_feedback() const;
};

struct FilterState {
    std::array<CueFilter, kCueCount> cues;
    std::optional<std::int64_t> last_t_ms;

    /// Posterior set to each cue's initial distribution.
    static FilterState initial(const HmmModel& model);
    const CueFilter& operator[](Cue c) const { return cues[index(c)]; }
};

/// One forward-filter step in log space. The first step weights the initial
/// distribution; later steps propagate the prior through the transition matrix.
/// When every state's likelihood underflows the prediction is kept unchanged.
std::vector<double> filter_step(const CueModel& model, std::span<const double> prior, bool first,
                                const Observation& obs);

/// Throws Errc::non_monotonic_timestamp or Errc::non_finite_feature.
FilterState ingest_frame(const FilterState& state, const HmmModel& model, const FeatureFrame& frame);

double log_sum_exp(std::span<const double> values);

}  // namespace coach::feedback
