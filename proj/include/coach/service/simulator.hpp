#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/feedback/synthetic.hpp"
#include "coach/service/session.hpp"

namespace coach::service {

/// A scripted conversation partner: canned answers per question context key,
/// speaking and thinking times, and the nonverbal behaviour behind the frames.
struct ScriptedUser {
    std::string name;
    std::map<std::string, std::vector<std::string>> responses;
    std::vector<std::string> fallback = {"okay"};
    double reciprocal_rate = 0.0;  // chance of asking the question back
    std::vector<std::string> reciprocal = {"what about you?"};
    std::int64_t think_min_ms = 600;
    std::int64_t think_max_ms = 2500;
    std::int64_t ms_per_word = 320;
    feedback::BehaviorProfile behavior;
};

/// Throws Errc::parse_error.
ScriptedUser parse_script(const nlohmann::json& j);
ScriptedUser load_script(const std::string& path);

struct SimulationOptions {
    SessionConfig config;
    std::uint64_t seed = 0;
    bool frames = true;
    double frame_rate_hz = 30.0;
};

struct SimulationResult {
    std::string session_id;
    analytics::SessionSummary summary;
    std::vector<ServerMessage> outputs;
    int user_turns = 0;
    int agent_turns = 0;           // agent turns answering user turns
    int turns_without_reply = 0;   // user turns not answered by exactly one agent turn
    int repeated_asks = 0;         // questions whose context key was already answered
    int errors = 0;
    int max_depth = 0;
    std::vector<std::string> topics;  // topic labels in the order they began
};

/// Runs one session on a simulated clock: frames at the configured rate in
/// every conversation segment, user turns timed from the script.
SimulationResult simulate(const ScriptedUser& user, const SimulationOptions& options, AssetsPtr assets, ModelPtr model,
                          std::shared_ptr<RecordSink> sink = nullptr);

}  // namespace coach::service
