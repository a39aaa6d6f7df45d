#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/analytics/summary.hpp"
#include "coach/dialogue/gist.hpp"
#include "coach/feedback/frame.hpp"
#include "coach/feedback/icons.hpp"

// JSON messages exchanged with clients. Every message is an object with a
// `type` field; server messages also carry the session id and a per-session
// `index` so clients can drop duplicates.
namespace coach::service {

using nlohmann::json;

struct UserTurnMsg {
    std::string text;
    std::int64_t t_ms = 0;  // end of speech
    bool operator==(const UserTurnMsg&) const = default;
};

struct FrameMsg {
    feedback::FeatureFrame frame;
};

struct EndMsg {
    std::optional<std::int64_t> t_ms;
    bool operator==(const EndMsg&) const = default;
};

using ClientMessage = std::variant<UserTurnMsg, FrameMsg, EndMsg>;

struct IconMsg {
    feedback::Cue cue = feedback::Cue::eye_contact;
    feedback::IconColor color = feedback::IconColor::green;
    std::int64_t t_ms = 0;
    bool operator==(const IconMsg&) const = default;
};

struct SummaryMsg {
    analytics::SessionSummary overall;
    std::vector<analytics::SessionSummary> segments;
};

struct ErrorMsg {
    std::string code;
    std::string message;
};

using ServerPayload = std::variant<dialogue::AgentTurn, IconMsg, feedback::FeedbackEvent, SummaryMsg, ErrorMsg>;

struct ServerMessage {
    std::string session;
    std::uint64_t index = 0;
    ServerPayload payload;
};

json frame_to_json(const feedback::FeatureFrame& frame);
/// Missing features default to zero; a missing or null pitch_hz is unvoiced.
feedback::FeatureFrame frame_from_json(const json& j);

json summary_to_json(const analytics::SessionSummary& summary);
analytics::SessionSummary summary_from_json(const json& j);

json to_json(const ClientMessage& msg);
json to_json(const ServerMessage& msg);

/// Throws Errc::malformed_message.
ClientMessage parse_client_message(const json& j);
ClientMessage parse_client_message(const std::string& text);
ServerMessage parse_server_message(const json& j);

std::string encode(const ClientMessage& msg);
std::string encode(const ServerMessage& msg);

}  // namespace coach::service
