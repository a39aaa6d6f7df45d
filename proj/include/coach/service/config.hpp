#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/feedback/icons.hpp"

namespace coach::service {

struct Segment {
    enum class Kind { conversation, pause };
    Kind kind = Kind::conversation;
    std::int64_t duration_ms = 0;
};

/// Absolute window [start_ms, end_ms) of a conversation segment.
struct SegmentWindow {
    std::size_t ordinal = 0;  // index among conversation segments
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

struct SessionConfig {
    /// Five minutes of conversation, a two minute break, four more minutes.
    std::vector<Segment> segments = {{Segment::Kind::conversation, 300000},
                                     {Segment::Kind::pause, 120000},
                                     {Segment::Kind::conversation, 240000}};
    std::vector<std::string> topic_order;  // empty: the rule set's default order
    std::string model_path;                // empty: the server's default model
    feedback::FeedbackPolicy feedback;
    /// When false, icon decisions are held while the agent is speaking.
    bool feedback_during_agent_speech = true;
    std::int64_t agent_ms_per_word = 350;
    std::uint64_t seed = 0;

    /// Throws Errc::invalid_config.
    void validate() const;
    std::vector<SegmentWindow> conversation_windows() const;
    std::int64_t total_ms() const;
};

nlohmann::json to_json(const SessionConfig& config);
/// Missing keys keep their defaults. Throws Errc::invalid_config.
SessionConfig config_from_json(const nlohmann::json& j);

}  // namespace coach::service
