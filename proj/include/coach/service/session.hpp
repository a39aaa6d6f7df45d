#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "coach/analytics/summary.hpp"
#include "coach/error.hpp"
#include "coach/dialogue/manager.hpp"
#include "coach/feedback/filter.hpp"
#include "coach/feedback/hmm.hpp"
#include "coach/feedback/icons.hpp"
#include "coach/service/config.hpp"
#include "coach/service/record.hpp"
#include "coach/service/wire.hpp"

namespace coach::service {

using ModelPtr = std::shared_ptr<const feedback::HmmModel>;
using AssetsPtr = std::shared_ptr<const dialogue::DialogueAssets>;

/// One practice session on a session clock measured from its start. Inputs
/// are processed strictly in arrival order; every input and every output is
/// appended to the record sink.
class Session {
public:
    /// Records the header and queues the opening remark.
    Session(std::string id, SessionConfig config, AssetsPtr assets, ModelPtr model, std::shared_ptr<RecordSink> sink = nullptr);

    const std::string& id() const { return id_; }
    const SessionConfig& config() const { return config_; }

    /// Outputs produced since construction and not yet taken (the opening turn).
    std::vector<ServerMessage> take_pending();

    /// Processes one client message. Failures become `error` messages.
    std::vector<ServerMessage> handle(const ClientMessage& msg);

    /// Throwing forms of the three inputs.
    std::vector<ServerMessage> user_turn(std::string text, std::int64_t end_of_speech_ms);
    std::vector<ServerMessage> frame(const feedback::FeatureFrame& frame);
    analytics::SessionSummary end(std::optional<std::int64_t> t_ms = std::nullopt);

    bool ended() const { return ended_; }
    bool in_conversation() const { return active_.has_value(); }
    const dialogue::DialogueManager& dialogue() const { return dialogue_; }
    const feedback::IconState& icons() const { return icons_; }
    const feedback::FilterState& filter() const { return filter_; }
    const std::vector<analytics::SessionTimeline>& timelines() const { return timelines_; }
    const std::vector<ServerMessage>& outputs() const { return outputs_; }

private:
    void emit(ServerPayload payload);
    void enter(std::int64_t t_ms);
    void open_segment(const SegmentWindow& w);
    void close_segment(std::int64_t end_ms);
    void process(const ClientMessage& msg);
    void do_user_turn(const UserTurnMsg& m);
    void do_frame(const feedback::FeatureFrame& f);
    void do_end(std::optional<std::int64_t> t_ms);

    std::string id_;
    SessionConfig config_;
    std::vector<SegmentWindow> windows_;
    AssetsPtr assets_;
    ModelPtr model_;
    std::shared_ptr<RecordSink> sink_;

    dialogue::DialogueManager dialogue_;
    bool dialogue_opened_ = false;
    feedback::FilterState filter_;
    feedback::IconState icons_;
    feedback::AckTracker acks_;

    std::optional<std::size_t> active_;
    std::size_t next_window_ = 0;
    std::int64_t clock_ms_ = 0;
    std::optional<std::int64_t> last_frame_ms_;
    std::int64_t agent_speaking_until_ = 0;

    std::vector<analytics::SessionTimeline> timelines_;
    std::vector<analytics::SessionSummary> segment_summaries_;
    std::optional<analytics::SessionSummary> summary_;
    bool ended_ = false;

    std::uint64_t next_index_ = 0;
    std::vector<ServerMessage> outputs_;
    std::size_t taken_ = 0;
    std::optional<Error> last_error_;
};

struct ReplayResult {
    bool identical = false;
    std::size_t lines = 0;                       // lines in the original record
    std::optional<std::size_t> first_difference;  // 0-based line index
    std::vector<std::string> regenerated;
};

/// Re-runs a record's inputs through a fresh session and compares every
/// regenerated line byte for byte with the original.
ReplayResult replay(const std::vector<std::string>& lines, AssetsPtr assets, ModelPtr default_model);

/// Loads a model file or throws Errc::model_load_failure.
ModelPtr load_model(const std::string& path);

/// Owns the live sessions. Each session is guarded by its own mutex so its
/// inputs are serialized; the assets and models are shared read-only.
class SessionManager {
public:
    using Subscriber = std::function<void(const ServerMessage&)>;

    SessionManager(AssetsPtr assets, ModelPtr default_model, std::optional<RecordStore> store = std::nullopt);

    struct Created {
        std::string id;
        std::vector<ServerMessage> messages;
    };
    /// Throws Errc::invalid_config or Errc::model_load_failure.
    Created create_session(SessionConfig config, std::string id = {});

    /// Processes a message and offers each output to every subscriber in order.
    /// Throws Errc::unknown_session.
    std::vector<ServerMessage> handle(const std::string& id, const ClientMessage& msg);

    /// With `with_history`, earlier outputs are delivered first.
    std::uint64_t subscribe(const std::string& id, Subscriber fn, bool with_history = false);
    void unsubscribe(const std::string& id, std::uint64_t token);

    /// Runs `fn` with the session locked.
    void inspect(const std::string& id, const std::function<void(const Session&)>& fn);
    std::vector<std::string> ids() const;
    const std::optional<RecordStore>& store() const { return store_; }

private:
    struct Entry {
        std::mutex mu;
        std::unique_ptr<Session> session;
        std::map<std::uint64_t, Subscriber> subscribers;
    };
    std::shared_ptr<Entry> find(const std::string& id) const;
    ModelPtr model_for(const std::string& path);

    AssetsPtr assets_;
    ModelPtr default_model_;
    std::optional<RecordStore> store_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::mutex model_mu_;
    std::map<std::string, ModelPtr> models_;
    std::uint64_t counter_ = 0;
    std::atomic<std::uint64_t> next_token_{0};
};

}  // namespace coach::service
