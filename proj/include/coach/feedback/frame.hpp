#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coach::feedback {

/// The four monitored nonverbal channels, one icon each.
enum class Cue { eye_contact = 0, smile = 1, volume = 2, body_movement = 3 };

inline constexpr std::array<Cue, 4> kCues = {Cue::eye_contact, Cue::smile, Cue::volume, Cue::body_movement};
inline constexpr std::size_t kCueCount = kCues.size();

inline constexpr std::size_t index(Cue c) { return static_cast<std::size_t>(c); }
std::string_view to_string(Cue c);
/// Display name ("eye contact").
std::string_view display_name(Cue c);
/// Accepts "eye_contact", "eye-contact" and "eye contact".
std::optional<Cue> cue_from_string(std::string_view s);

struct HeadPose {
    double pitch = 0.0;  // degrees
    double yaw = 0.0;
    double roll = 0.0;
};

/// One timestamped feature vector from the sensing front end.
struct FeatureFrame {
    std::int64_t t_ms = 0;
    HeadPose head;
    double smile = 0.0;
    std::vector<double> action_units;
    double volume_db = 0.0;
    std::optional<double> pitch_hz;  // absent when unvoiced
    double movement = 0.0;
};

/// Throws Errc::non_finite_feature when a present value is NaN or infinite.
void check_finite(const FeatureFrame& frame);

/// Named scalar inside a frame: head_pitch, head_yaw, head_roll, smile, au:<i>,
/// volume_db, pitch_hz or movement.
struct FeatureId {
    enum class Kind { head_pitch, head_yaw, head_roll, smile, action_unit, volume_db, pitch_hz, movement };
    Kind kind = Kind::smile;
    std::size_t au = 0;

    static FeatureId parse(std::string_view name);
    std::string name() const;
    /// nullopt for an unvoiced pitch or an action unit beyond the frame's vector.
    std::optional<double> value(const FeatureFrame& frame) const;
    bool operator==(const FeatureId&) const = default;
};

/// Per-dimension observation; nullopt entries are marginalized out.
using Observation = std::vector<std::optional<double>>;

Observation observe(const std::vector<FeatureId>& features, const FeatureFrame& frame);

}  // namespace coach::feedback
