#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "coach/feedback/frame.hpp"

namespace coach::trainer {

using feedback::Cue;
using feedback::kCueCount;

inline constexpr std::int64_t kDefaultBinMs = 500;
inline constexpr int kDefaultRaterThreshold = 3;
inline constexpr std::int8_t kMissing = -1;

/// One rater's marked feedback moment.
struct RawMark {
    std::string rater;
    Cue cue = Cue::eye_contact;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

/// Raters x units; entries are category codes (0/1 for marks) or kMissing.
struct RatingMatrix {
    std::vector<std::vector<std::int8_t>> rows;

    std::size_t raters() const { return rows.size(); }
    std::size_t units() const { return rows.empty() ? 0 : rows.front().size(); }
};

struct MarkMatrix {
    std::int64_t bin_ms = kDefaultBinMs;
    std::vector<std::string> raters;
    std::array<RatingMatrix, kCueCount> cues;

    std::size_t bins() const { return cues[0].units(); }
    const RatingMatrix& operator[](Cue c) const { return cues[feedback::index(c)]; }
};

struct LabelTrack {
    std::int64_t bin_ms = kDefaultBinMs;
    std::array<std::vector<std::uint8_t>, kCueCount> labels;

    std::size_t bins() const { return labels[0].size(); }
    const std::vector<std::uint8_t>& operator[](Cue c) const { return labels[feedback::index(c)]; }
};

/// A bin is set for a rater when the union of their intervals covers at least
/// half of it. Raters default to everyone appearing in `marks`, sorted.
/// Throws Errc::interval_out_of_span or Errc::invalid_config.
MarkMatrix bin_marks(const std::vector<RawMark>& marks, std::int64_t bin_ms, std::int64_t span_ms,
                     std::vector<std::string> raters = {});

/// Label 1 where at least `threshold` raters marked the bin.
/// Throws Errc::threshold_exceeds_raters.
LabelTrack aggregate_labels(const MarkMatrix& marks, int threshold = kDefaultRaterThreshold);

/// Line-delimited `rater,cue,start_ms,end_ms`; '#' comments and a header line
/// starting with "rater" are skipped.
std::vector<RawMark> parse_label_file(std::string_view source);
std::vector<RawMark> load_label_file(const std::string& path);
std::string format_label_file(const std::vector<RawMark>& marks);

/// Synthetic annotators for a known truth track: each rater catches an episode
/// with `hit_rate`, jitters its edges, and adds occasional false marks.
std::vector<RawMark> simulate_raters(const std::array<std::vector<std::pair<std::int64_t, std::int64_t>>, kCueCount>& truth,
                                     std::int64_t span_ms, int raters, std::uint64_t seed, double hit_rate = 0.75,
                                     double jitter_ms = 250.0);

}  // namespace coach::trainer
