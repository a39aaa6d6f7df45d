#include "coach/service/config.hpp"

#include "coach/error.hpp"

namespace coach::service {

void SessionConfig::validate() const {
    if (segments.empty()) throw Error(Errc::invalid_config, "no segments");
    bool talk = false;
    for (const auto& s : segments) {
        if (s.duration_ms <= 0) throw Error(Errc::invalid_config, "segment durations must be positive");
        talk = talk || s.kind == Segment::Kind::conversation;
    }
    if (!talk) throw Error(Errc::invalid_config, "no conversation segment");
    const auto& f = feedback;
    if (!(f.off_threshold >= 0.0 && f.off_threshold <= f.on_threshold && f.on_threshold <= 1.0))
        throw Error(Errc::invalid_config, "thresholds must satisfy 0 <= off <= on <= 1");
    if (f.dwell_ms < 0 || f.min_red_ms < 0 || f.ack_window_ms < 0)
        throw Error(Errc::invalid_config, "feedback durations must be non-negative");
    if (agent_ms_per_word < 0) throw Error(Errc::invalid_config, "agent_ms_per_word must be non-negative");
}

std::vector<SegmentWindow> SessionConfig::conversation_windows() const {
    std::vector<SegmentWindow> out;
    std::int64_t t = 0;
    for (const auto& s : segments) {
        if (s.kind == Segment::Kind::conversation) out.push_back({out.size(), t, t + s.duration_ms});
        t += s.duration_ms;
    }
    return out;
}

std::int64_t SessionConfig::total_ms() const {
    std::int64_t t = 0;
    for (const auto& s : segments) t += s.duration_ms;
    return t;
}

nlohmann::json to_json(const SessionConfig& c) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : c.segments)
        segs.push_back({{"kind", s.kind == Segment::Kind::conversation ? "conversation" : "break"}, {"ms", s.duration_ms}});
    return {{"segments", segs},
            {"topics", c.topic_order},
            {"model", c.model_path},
            {"feedback",
             {{"on_threshold", c.feedback.on_threshold},
              {"off_threshold", c.feedback.off_threshold},
              {"dwell_ms", c.feedback.dwell_ms},
              {"min_red_ms", c.feedback.min_red_ms},
              {"ack_window_ms", c.feedback.ack_window_ms},
              {"positive_ack", c.feedback.positive_ack}}},
            {"feedback_during_agent_speech", c.feedback_during_agent_speech},
            {"agent_ms_per_word", c.agent_ms_per_word},
            {"seed", c.seed}};
}

SessionConfig config_from_json(const nlohmann::json& j) {
    SessionConfig c;
    try {
        if (!j.is_object()) throw Error(Errc::invalid_config, "config must be an object");
        if (j.contains("segments")) {
            c.segments.clear();
            for (const auto& s : j["segments"]) {
                const auto kind = s.at("kind").get<std::string>();
                if (kind != "conversation" && kind != "break") throw Error(Errc::invalid_config, "unknown segment kind '" + kind + "'");
                c.segments.push_back({kind == "conversation" ? Segment::Kind::conversation : Segment::Kind::pause,
                                      s.at("ms").get<std::int64_t>()});
            }
        }
        c.topic_order = j.value("topics", c.topic_order);
        c.model_path = j.value("model", c.model_path);
        if (j.contains("feedback")) {
            const auto& f = j["feedback"];
            c.feedback.on_threshold = f.value("on_threshold", c.feedback.on_threshold);
            c.feedback.off_threshold = f.value("off_threshold", c.feedback.off_threshold);
            c.feedback.dwell_ms = f.value("dwell_ms", c.feedback.dwell_ms);
            c.feedback.min_red_ms = f.value("min_red_ms", c.feedback.min_red_ms);
            c.feedback.ack_window_ms = f.value("ack_window_ms", c.feedback.ack_window_ms);
            c.feedback.positive_ack = f.value("positive_ack", c.feedback.positive_ack);
        }
        c.feedback_during_agent_speech = j.value("feedback_during_agent_speech", c.feedback_during_agent_speech);
        c.agent_ms_per_word = j.value("agent_ms_per_word", c.agent_ms_per_word);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::invalid_config, e.what());
    }
    c.validate();
    return c;
}

}  // namespace coach::service
