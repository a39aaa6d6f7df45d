#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coach/feedback/frame.hpp"

namespace coach::feedback {

inline constexpr double kDefaultVarianceFloor = 1e-4;
inline constexpr double kStochasticTolerance = 1e-9;

/// Diagonal Gaussian over a cue's feature subvector.
struct GaussianEmission {
    std::vector<double> mean;
    std::vector<double> var;

    /// Log density with nullopt dimensions marginalized out.
    double log_density(const Observation& obs) const;
};

/// HMM for one cue. State 0 is "acceptable"; every other state needs feedback.
struct CueModel {
    Cue cue = Cue::eye_contact;
    std::vector<FeatureId> features;
    std::vector<double> initial;
    std::vector<std::vector<double>> transition;  // row-stochastic, N x N
    std::vector<GaussianEmission> emissions;

    std::size_t states() const { return initial.size(); }
    /// Throws Errc::invalid_model on shape errors, non-stochastic rows or
    /// variances under the floor.
    void validate(double variance_floor = kDefaultVarianceFloor) const;
    std::vector<double> log_emissions(const Observation& obs) const;
};

struct HmmModel {
    double variance_floor = kDefaultVarianceFloor;
    std::array<CueModel, kCueCount> cues;

    const CueModel& operator[](Cue c) const { return cues[index(c)]; }
    CueModel& operator[](Cue c) { return cues[index(c)]; }
    void validate() const;
};

/// Versioned text serialization; doubles use shortest round-trip form so
/// write(read(write(m))) is byte-identical to write(m).
std::string write_model(const HmmModel& model);
HmmModel read_model(std::string_view source);
HmmModel load_model_file(const std::string& path);
void save_model_file(const HmmModel& model, const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace coach::feedback
