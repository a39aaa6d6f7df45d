#include "coach/service/wire.hpp"

#include "coach/error.hpp"

namespace coach::service {

using feedback::Cue;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::malformed_message, what); }

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) malformed(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        malformed(std::string("field '") + key + "' has the wrong type");
    }
}

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    if (!j[key].is_number()) malformed(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

Cue cue_field(const json& j) {
    const auto name = field<std::string>(j, "cue");
    auto cue = feedback::cue_from_string(name);
    if (!cue) malformed("unknown cue '" + name + "'");
    return *cue;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json frame_to_json(const feedback::FeatureFrame& f) {
    json j = {{"t_ms", f.t_ms},          {"head_pitch", f.head.pitch}, {"head_yaw", f.head.yaw},
              {"head_roll", f.head.roll}, {"smile", f.smile},           {"au", f.action_units},
              {"volume_db", f.volume_db}, {"movement", f.movement}};
    j["pitch_hz"] = optional_number(f.pitch_hz);
    return j;
}

feedback::FeatureFrame frame_from_json(const json& j) {
    if (!j.is_object()) malformed("frame must be an object");
    feedback::FeatureFrame f;
    f.t_ms = field<std::int64_t>(j, "t_ms");
    f.head.pitch = number_or(j, "head_pitch", 0.0);
    f.head.yaw = number_or(j, "head_yaw", 0.0);
    f.head.roll = number_or(j, "head_roll", 0.0);
    f.smile = number_or(j, "smile", 0.0);
    f.volume_db = number_or(j, "volume_db", 0.0);
    f.movement = number_or(j, "movement", 0.0);
    if (j.contains("pitch_hz") && !j["pitch_hz"].is_null()) f.pitch_hz = number_or(j, "pitch_hz", 0.0);
    if (j.contains("au")) {
        if (!j["au"].is_array()) malformed("field 'au' must be an array");
        for (const auto& v : j["au"]) {
            if (!v.is_number()) malformed("action units must be numbers");
            f.action_units.push_back(v.get<double>());
        }
    }
    return f;
}

json summary_to_json(const analytics::SessionSummary& s) {
    json cues = json::object();
    for (auto c : feedback::kCues) {
        const auto& cs = s[c];
        cues[std::string(feedback::to_string(c))] = {{"reminders", cs.reminders},
                                                     {"unresolved", cs.unresolved},
                                                     {"resolved_pairs", cs.resolved_pairs},
                                                     {"total_lag_ms", cs.total_lag_ms}};
    }
    return {{"span_ms", s.span_ms},
            {"reminders", s.reminders()},
            {"unresolved", s.unresolved()},
            {"best_streak_ms", s.best_streak_ms},
            {"mean_lag_ms", optional_number(s.mean_lag_ms())},
            {"cues", cues}};
}

analytics::SessionSummary summary_from_json(const json& j) {
    analytics::SessionSummary s;
    s.span_ms = field<std::int64_t>(j, "span_ms");
    s.best_streak_ms = field<std::int64_t>(j, "best_streak_ms");
    const auto cues = field<json>(j, "cues");
    for (auto c : feedback::kCues) {
        const auto name = std::string(feedback::to_string(c));
        if (!cues.contains(name)) malformed("summary lacks cue '" + name + "'");
        const auto& cj = cues[name];
        auto& cs = s.cues[feedback::index(c)];
        cs.reminders = field<int>(cj, "reminders");
        cs.unresolved = field<int>(cj, "unresolved");
        cs.resolved_pairs = field<int>(cj, "resolved_pairs");
        cs.total_lag_ms = field<std::int64_t>(cj, "total_lag_ms");
    }
    return s;
}

json to_json(const ClientMessage& msg) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UserTurnMsg>) {
                return {{"type", "user_turn"}, {"text", m.text}, {"t_ms", m.t_ms}};
            } else if constexpr (std::is_same_v<T, FrameMsg>) {
                auto j = frame_to_json(m.frame);
                j["type"] = "frame";
                return j;
            } else {
                json j = {{"type", "end"}};
                if (m.t_ms) j["t_ms"] = *m.t_ms;
                return j;
            }
        },
        msg);
}

json to_json(const ServerMessage& msg) {
    json j = std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, dialogue::AgentTurn>) {
                return {{"type", "agent_turn"}, {"text", m.text}, {"provenance", dialogue::to_string(m.provenance)},
                        {"t_ms", m.t_ms},       {"asked", m.asked}, {"gists", m.gists}};
            } else if constexpr (std::is_same_v<T, IconMsg>) {
                return {{"type", "icon"}, {"cue", feedback::to_string(m.cue)}, {"color", feedback::to_string(m.color)}, {"t_ms", m.t_ms}};
            } else if constexpr (std::is_same_v<T, feedback::FeedbackEvent>) {
                json e = {{"type", "event"}, {"cue", feedback::to_string(m.cue)}, {"kind", feedback::to_string(m.kind)}, {"t_ms", m.t_ms}};
                if (!m.text.empty()) e["text"] = m.text;
                return e;
            } else if constexpr (std::is_same_v<T, SummaryMsg>) {
                json segs = json::array();
                for (const auto& s : m.segments) segs.push_back(summary_to_json(s));
                const auto& o = m.overall;
                const auto lag = o.mean_lag_ms();
                return {{"type", "summary"},
                        {"overall", summary_to_json(o)},
                        {"segments", segs},
                        {"metrics",
                         {{"Reminders", o.reminders()},
                          {"Best Streak", analytics::format_duration(o.best_streak_ms)},
                          {"Response Lag", lag ? analytics::format_duration(static_cast<std::int64_t>(*lag + 0.5)) : "n/a"}}}};
            } else {
                return {{"type", "error"}, {"code", m.code}, {"message", m.message}};
            }
        },
        msg.payload);
    j["session"] = msg.session;
    j["index"] = msg.index;
    return j;
}

ClientMessage parse_client_message(const json& j) {
    if (!j.is_object()) malformed("message must be an object");
    const auto type = field<std::string>(j, "type");
    if (type == "user_turn") return UserTurnMsg{field<std::string>(j, "text"), field<std::int64_t>(j, "t_ms")};
    if (type == "frame") return FrameMsg{frame_from_json(j)};
    if (type == "end") {
        EndMsg e;
        if (j.contains("t_ms") && !j["t_ms"].is_null()) e.t_ms = field<std::int64_t>(j, "t_ms");
        return e;
    }
    malformed("unknown message type '" + type + "'");
}

ClientMessage parse_client_message(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    return parse_client_message(j);
}

ServerMessage parse_server_message(const json& j) {
    if (!j.is_object()) malformed("message must be an object");
    ServerMessage out;
    out.session = field<std::string>(j, "session");
    out.index = field<std::uint64_t>(j, "index");
    const auto type = field<std::string>(j, "type");
    if (type == "agent_turn") {
        dialogue::AgentTurn t;
        t.text = field<std::string>(j, "text");
        auto p = dialogue::provenance_from_string(field<std::string>(j, "provenance"));
        if (!p) malformed("unknown provenance");
        t.provenance = *p;
        t.t_ms = field<std::int64_t>(j, "t_ms");
        t.asked = j.value("asked", std::vector<std::string>{});
        t.gists = j.value("gists", std::vector<std::string>{});
        out.payload = std::move(t);
    } else if (type == "icon") {
        const auto color = field<std::string>(j, "color");
        if (color != "green" && color != "red") malformed("unknown color '" + color + "'");
        out.payload = IconMsg{cue_field(j), color == "red" ? feedback::IconColor::flashing_red : feedback::IconColor::green,
                              field<std::int64_t>(j, "t_ms")};
    } else if (type == "event") {
        auto kind = feedback::event_kind_from_string(field<std::string>(j, "kind"));
        if (!kind) malformed("unknown event kind");
        out.payload = feedback::FeedbackEvent{cue_field(j), *kind, field<std::int64_t>(j, "t_ms"), j.value("text", std::string{})};
    } else if (type == "summary") {
        SummaryMsg s;
        s.overall = summary_from_json(field<json>(j, "overall"));
        for (const auto& seg : field<json>(j, "segments")) s.segments.push_back(summary_from_json(seg));
        out.payload = std::move(s);
    } else if (type == "error") {
        out.payload = ErrorMsg{field<std::string>(j, "code"), j.value("message", std::string{})};
    } else {
        malformed("unknown message type '" + type + "'");
    }
    return out;
}

std::string encode(const ClientMessage& msg) { return to_json(msg).dump(); }
std::string encode(const ServerMessage& msg) { return to_json(msg).dump(); }

}  // namespace coach::service
