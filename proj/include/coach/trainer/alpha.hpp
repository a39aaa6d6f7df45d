#pragma once

#include <array>
#include <optional>

#include "coach/trainer/marks.hpp"

namespace coach::trainer {

/// Krippendorff's alpha for nominal data via the coincidence matrix:
/// alpha = 1 - (n - 1) * sum_{c != k} o_ck / sum_{c != k} n_c n_k.
/// Units with fewer than two ratings are not pairable and are ignored.
/// Perfect agreement returns exactly 1.0, including the single-category case.
/// Throws Errc::insufficient_data when no unit has two ratings.
double krippendorff_alpha(const RatingMatrix& ratings);

struct AgreementReport {
    std::array<std::optional<double>, kCueCount> per_cue;  // nullopt when a cue is unpairable
    double pooled = 0.0;                                  // every (cue, bin) treated as one unit
    std::optional<double> mean_of_cues;
};

AgreementReport agreement(const MarkMatrix& marks);

}  // namespace coach::trainer
