#pragma once

#include <array>
#include <span>
#include <vector>

#include "coach/feedback/frame.hpp"
#include "coach/feedback/hmm.hpp"

namespace coach::feedback {

/// Most probable state path in log space. Among equally probable paths the
/// lexicographically lowest one is returned: best-suffix scores are computed
/// backwards, then the path is chosen forwards taking the lowest optimal state
/// at every step. Throws Errc::empty_sequence.
std::vector<int> viterbi(const CueModel& model, std::span<const Observation> observations);

/// Log joint probability of a state path and the observations.
double path_log_score(const CueModel& model, std::span<const Observation> observations, std::span<const int> path);

using CuePaths = std::array<std::vector<int>, kCueCount>;

CuePaths decode_sequence(const HmmModel& model, std::span<const FeatureFrame> frames);

}  // namespace coach::feedback
