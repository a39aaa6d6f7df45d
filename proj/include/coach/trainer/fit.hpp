#pragma once

#include <array>
#include <span>
#include <vector>

#include "coach/feedback/hmm.hpp"
#include "coach/trainer/marks.hpp"

namespace coach::trainer {

using feedback::FeatureFrame;
using feedback::FeatureId;
using feedback::Observation;

/// Feature subvector used for each cue.
std::array<std::vector<FeatureId>, kCueCount> default_cue_features();

struct FitOptions {
    std::array<std::vector<FeatureId>, kCueCount> features = default_cue_features();
    double variance_floor = feedback::kDefaultVarianceFloor;
};

/// Frames of one recording with their aggregated labels; a frame takes the
/// label of the bin containing its timestamp.
struct LabeledSequence {
    std::vector<FeatureFrame> frames;
    LabelTrack labels;
};

/// Row-normalized transition counts with add-one smoothing.
std::vector<std::vector<double>> estimate_transitions(std::span<const std::vector<int>> state_sequences, std::size_t states);
/// Initial-state frequencies with add-one smoothing.
std::vector<double> estimate_initial(std::span<const std::vector<int>> state_sequences, std::size_t states);

/// Supervised maximum-likelihood fit of one cue's HMM from observed states.
/// Missing observation dimensions are left out of the moment estimates.
/// Throws Errc::missing_class when a state never occurs.
feedback::CueModel fit_cue(feedback::Cue cue, std::vector<FeatureId> features,
                           std::span<const std::vector<Observation>> observations,
                           std::span<const std::vector<int>> states, std::size_t state_count = 2,
                           double variance_floor = feedback::kDefaultVarianceFloor);

/// Fits all four cue models. Throws Errc::misaligned_lengths when frames and
/// label bins disagree, Errc::missing_class when a cue lacks either label.
feedback::HmmModel fit_supervised(std::span<const LabeledSequence> data, const FitOptions& options = {});

}  // namespace coach::trainer
