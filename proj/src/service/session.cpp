#include "coach/service/session.hpp"

#include <algorithm>

#include "coach/text.hpp"

namespace coach::service {

using feedback::IconColor;

Session::Session(std::string id, SessionConfig config, AssetsPtr assets, ModelPtr model, std::shared_ptr<RecordSink> sink)
    : id_(std::move(id)),
      config_((config.validate(), std::move(config))),
      windows_(config_.conversation_windows()),
      assets_(std::move(assets)),
      model_(std::move(model)),
      sink_(std::move(sink)),
      dialogue_(assets_, config_.topic_order, config_.seed) {
    if (!model_) throw Error(Errc::model_load_failure, "no model for session " + id_);
    model_->validate();
    filter_ = feedback::FilterState::initial(*model_);
    icons_ = feedback::IconState::all_green(0);
    if (sink_) sink_->append(header_line(id_, config_));
    if (windows_.front().start_ms == 0) open_segment(windows_.front());
}

std::vector<ServerMessage> Session::take_pending() {
    std::vector<ServerMessage> out(outputs_.begin() + static_cast<std::ptrdiff_t>(taken_), outputs_.end());
    taken_ = outputs_.size();
    return out;
}

void Session::emit(ServerPayload payload) {
    outputs_.push_back({id_, next_index_++, std::move(payload)});
    if (sink_) sink_->append(output_line(outputs_.back()));
}

std::vector<ServerMessage> Session::handle(const ClientMessage& msg) {
    if (sink_) sink_->append(input_line(msg));
    last_error_.reset();
    try {
        process(msg);
    } catch (const Error& e) {
        last_error_ = e;
        emit(ErrorMsg{std::string(to_string(e.code())), e.what()});
    }
    return take_pending();
}

std::vector<ServerMessage> Session::user_turn(std::string text, std::int64_t t_ms) {
    auto out = handle(UserTurnMsg{std::move(text), t_ms});
    if (last_error_) throw *last_error_;
    return out;
}

std::vector<ServerMessage> Session::frame(const feedback::FeatureFrame& f) {
    auto out = handle(FrameMsg{f});
    if (last_error_) throw *last_error_;
    return out;
}

analytics::SessionSummary Session::end(std::optional<std::int64_t> t_ms) {
    handle(EndMsg{t_ms});
    if (last_error_) throw *last_error_;
    return *summary_;
}

void Session::process(const ClientMessage& msg) {
    if (const auto* e = std::get_if<EndMsg>(&msg)) return do_end(e->t_ms);
    if (ended_) throw Error(Errc::session_expired, "session " + id_ + " has ended");
    if (const auto* u = std::get_if<UserTurnMsg>(&msg)) return do_user_turn(*u);
    do_frame(std::get<FrameMsg>(msg).frame);
}

void Session::enter(std::int64_t t) {
    if (t < clock_ms_)
        throw Error(Errc::non_monotonic_timestamp, std::to_string(t) + " ms is before " + std::to_string(clock_ms_) + " ms");
    clock_ms_ = t;
    while (active_ && t >= windows_[*active_].end_ms) close_segment(windows_[*active_].end_ms);
    if (active_) return;
    for (auto i = next_window_; i < windows_.size(); ++i)
        if (t >= windows_[i].start_ms && t < windows_[i].end_ms) return open_segment(windows_[i]);
    if (t >= windows_.back().end_ms) throw Error(Errc::session_expired, "the last conversation segment is over");
    throw Error(Errc::session_not_active, "no conversation segment at " + std::to_string(t) + " ms");
}

void Session::open_segment(const SegmentWindow& w) {
    active_ = w.ordinal;
    next_window_ = w.ordinal + 1;
    timelines_.push_back({w.end_ms - w.start_ms, {}});
    for (auto c : feedback::kCues)
        if (icons_[c].color != IconColor::green) emit(IconMsg{c, IconColor::green, w.start_ms});
    icons_ = feedback::IconState::all_green(w.start_ms);
    filter_ = feedback::FilterState::initial(*model_);
    acks_.reset();
    auto turn = dialogue_opened_ ? dialogue_.resume() : dialogue_.open();
    dialogue_opened_ = true;
    turn.t_ms = w.start_ms;
    agent_speaking_until_ = w.start_ms + static_cast<std::int64_t>(text::word_count(turn.text)) * config_.agent_ms_per_word;
    emit(std::move(turn));
}

void Session::close_segment(std::int64_t end_ms) {
    const auto& w = windows_[*active_];
    auto& tl = timelines_.back();
    tl.span_ms = end_ms - w.start_ms;
    segment_summaries_.push_back(analytics::compute_summary(tl));
    active_.reset();
}

void Session::do_user_turn(const UserTurnMsg& m) {
    enter(m.t_ms);
    const auto allowance = dialogue_.profile().silence_allowance_ms;
    auto turn = dialogue_.respond(m.text);
    // The reply never lands after the segment closes.
    turn.t_ms = std::min(m.t_ms + allowance, windows_[*active_].end_ms - 1);
    agent_speaking_until_ = turn.t_ms + static_cast<std::int64_t>(text::word_count(turn.text)) * config_.agent_ms_per_word;
    emit(std::move(turn));
}

void Session::do_frame(const feedback::FeatureFrame& f) {
    if (last_frame_ms_ && f.t_ms <= *last_frame_ms_)
        throw Error(Errc::non_monotonic_timestamp,
                    "frame at " + std::to_string(f.t_ms) + " ms after " + std::to_string(*last_frame_ms_) + " ms");
    feedback::check_finite(f);
    enter(f.t_ms);
    last_frame_ms_ = f.t_ms;
    filter_ = feedback::ingest_frame(filter_, *model_, f);
    if (!config_.feedback_during_agent_speech && f.t_ms < agent_speaking_until_) return;

    const auto& policy = config_.feedback;
    auto decision = feedback::decide_icons(filter_, icons_, f.t_ms, policy);
    const auto start = windows_[*active_].start_ms;
    auto record = [&](const feedback::FeedbackEvent& e) {
        auto rel = e;
        rel.t_ms -= start;
        timelines_.back().events.push_back(std::move(rel));
        emit(e);
    };
    for (const auto& e : decision.events) {
        acks_.observe(e);
        record(e);
    }
    if (policy.positive_ack)
        for (const auto& e : acks_.poll(decision.icons, f.t_ms, policy)) record(e);
    for (auto c : feedback::kCues)
        if (decision.icons[c].color != icons_[c].color) emit(IconMsg{c, decision.icons[c].color, f.t_ms});
    icons_ = decision.icons;
}

void Session::do_end(std::optional<std::int64_t> t_ms) {
    if (!ended_) {
        if (t_ms) {
            if (*t_ms < clock_ms_) throw Error(Errc::non_monotonic_timestamp, "end before the last input");
            clock_ms_ = *t_ms;
            if (active_) close_segment(std::min(*t_ms, windows_[*active_].end_ms));
        } else if (active_) {
            close_segment(windows_[*active_].end_ms);
        }
        summary_ = analytics::combine_summaries(segment_summaries_);
        ended_ = true;
    }
    emit(SummaryMsg{*summary_, segment_summaries_});
}

ReplayResult replay(const std::vector<std::string>& lines, AssetsPtr assets, ModelPtr default_model) {
    auto record = parse_record(lines);
    auto model = record.config.model_path.empty() ? std::move(default_model) : load_model(record.config.model_path);
    auto sink = std::make_shared<MemorySink>();
    Session session(record.id, record.config, std::move(assets), std::move(model), sink);
    for (const auto& in : record.inputs) session.handle(in);

    ReplayResult r;
    r.lines = lines.size();
    r.regenerated = std::move(sink->lines);
    const auto n = std::min(lines.size(), r.regenerated.size());
    for (std::size_t i = 0; i < n && !r.first_difference; ++i)
        if (lines[i] != r.regenerated[i]) r.first_difference = i;
    if (!r.first_difference && lines.size() != r.regenerated.size()) r.first_difference = n;
    r.identical = !r.first_difference;
    return r;
}

ModelPtr load_model(const std::string& path) { return std::make_shared<const feedback::HmmModel>(feedback::load_model_file(path)); }

SessionManager::SessionManager(AssetsPtr assets, ModelPtr default_model, std::optional<RecordStore> store)
    : assets_(std::move(assets)), default_model_(std::move(default_model)), store_(std::move(store)) {}

ModelPtr SessionManager::model_for(const std::string& path) {
    if (path.empty()) {
        if (!default_model_) throw Error(Errc::model_load_failure, "no model configured");
        return default_model_;
    }
    std::lock_guard lock(model_mu_);
    auto& slot = models_[path];
    if (!slot) {
        try {
            slot = load_model(path);
        } catch (...) {
            models_.erase(path);
            throw;
        }
    }
    return slot;
}

SessionManager::Created SessionManager::create_session(SessionConfig config, std::string id) {
    config.validate();
    auto model = model_for(config.model_path);
    std::unique_lock lock(mu_);
    if (id.empty()) {
        do id = "session-" + std::to_string(++counter_);
        while (sessions_.count(id) || (store_ && store_->exists(id)));
    } else if (sessions_.count(id) || (store_ && store_->exists(id))) {
        throw Error(Errc::invalid_config, "session id '" + id + "' already in use");
    }
    std::shared_ptr<RecordSink> sink;
    if (store_) sink = store_->open(id);
    auto entry = std::make_shared<Entry>();
    entry->session = std::make_unique<Session>(id, std::move(config), assets_, std::move(model), std::move(sink));
    Created out{id, entry->session->take_pending()};
    sessions_.emplace(id, std::move(entry));
    return out;
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(Errc::unknown_session, "no session '" + id + "'");
    return it->second;
}

std::vector<ServerMessage> SessionManager::handle(const std::string& id, const ClientMessage& msg) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    auto out = entry->session->handle(msg);
    for (const auto& m : out)
        for (const auto& [token, fn] : entry->subscribers) fn(m);
    return out;
}

std::uint64_t SessionManager::subscribe(const std::string& id, Subscriber fn, bool with_history) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    if (with_history)
        for (const auto& m : entry->session->outputs()) fn(m);
    const auto token = ++next_token_;
    entry->subscribers.emplace(token, std::move(fn));
    return token;
}

void SessionManager::unsubscribe(const std::string& id, std::uint64_t token) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    entry->subscribers.erase(token);
}

void SessionManager::inspect(const std::string& id, const std::function<void(const Session&)>& fn) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    fn(*entry->session);
}

std::vector<std::string> SessionManager::ids() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
}

}  // namespace coach::service
