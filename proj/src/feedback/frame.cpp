#include "coach/feedback/frame.hpp"

#include <charconv>
#include <cmath>

#include "coach/error.hpp"

namespace coach::feedback {

std::string_view to_string(Cue c) {
    switch (c) {
        case Cue::eye_contact: return "eye_contact";
        case Cue::smile: return "smile";
        case Cue::volume: return "volume";
        case Cue::body_movement: return "body_movement";
    }
    return "eye_contact";
}

std::string_view display_name(Cue c) {
    switch (c) {
        case Cue::eye_contact: return "eye contact";
        case Cue::smile: return "smile";
        case Cue::volume: return "speaking volume";
        case Cue::body_movement: return "body movement";
    }
    return "eye contact";
}

std::optional<Cue> cue_from_string(std::string_view s) {
    std::string norm(s);
    for (auto& c : norm)
        if (c == '-' || c == ' ') c = '_';
    for (auto cue : kCues)
        if (to_string(cue) == norm) return cue;
    if (norm == "speaking_volume") return Cue::volume;
    return std::nullopt;
}

void check_finite(const FeatureFrame& f) {
    auto check = [&](double v, const char* name) {
        if (!std::isfinite(v))
            throw Error(Errc::non_finite_feature, std::string(name) + " is not finite at t=" + std::to_string(f.t_ms));
    };
    check(f.head.pitch, "head_pitch");
    check(f.head.yaw, "head_yaw");
    check(f.head.roll, "head_roll");
    check(f.smile, "smile");
    for (double au : f.action_units) check(au, "action_unit");
    check(f.volume_db, "volume_db");
    if (f.pitch_hz) check(*f.pitch_hz, "pitch_hz");
    check(f.movement, "movement");
}

FeatureId FeatureId::parse(std::string_view name) {
    using K = Kind;
    if (name == "head_pitch") return {K::head_pitch};
    if (name == "head_yaw") return {K::head_yaw};
    if (name == "head_roll") return {K::head_roll};
    if (name == "smile") return {K::smile};
    if (name == "volume_db") return {K::volume_db};
    if (name == "pitch_hz") return {K::pitch_hz};
    if (name == "movement") return {K::movement};
    if (name.substr(0, 3) == "au:") {
        std::size_t i = 0;
        auto digits = name.substr(3);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) return {K::action_unit, i};
    }
    throw Error(Errc::invalid_model, "unknown feature '" + std::string(name) + "'");
}

std::string FeatureId::name() const {
    switch (kind) {
        case Kind::head_pitch: return "head_pitch";
        case Kind::head_yaw: return "head_yaw";
        case Kind::head_roll: return "head_roll";
        case Kind::smile: return "smile";
        case Kind::action_unit: return "au:" + std::to_string(au);
        case Kind::volume_db: return "volume_db";
        case Kind::pitch_hz: return "pitch_hz";
        case Kind::movement: return "movement";
    }
    return "smile";
}

std::optional<double> FeatureId::value(const FeatureFrame& f) const {
    switch (kind) {
        case Kind::head_pitch: return f.head.pitch;
        case Kind::head_yaw: return f.head.yaw;
        case Kind::head_roll: return f.head.roll;
        case Kind::smile: return f.smile;
        case Kind::action_unit:
            if (au < f.action_units.size()) return f.action_units[au];
            return std::nullopt;
        case Kind::volume_db: return f.volume_db;
        case Kind::pitch_hz: return f.pitch_hz;
        case Kind::movement: return f.movement;
    }
    return std::nullopt;
}

Observation observe(const std::vector<FeatureId>& features, const FeatureFrame& frame) {
    Observation obs;
    obs.reserve(features.size());
    for (const auto& id : features) obs.push_back(id.value(frame));
    return obs;
}

}  // namespace coach::feedback
