#include "coach/service/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::service {

ScriptedUser parse_script(const nlohmann::json& j) {
    ScriptedUser u;
    try {
        u.name = j.value("name", std::string("scripted"));
        if (j.contains("responses"))
            for (const auto& [key, v] : j["responses"].items())
                u.responses[key] = v.is_string() ? std::vector<std::string>{v.get<std::string>()} : v.get<std::vector<std::string>>();
        u.fallback = j.value("fallback", u.fallback);
        u.reciprocal_rate = j.value("reciprocal_rate", u.reciprocal_rate);
        u.reciprocal = j.value("reciprocal", u.reciprocal);
        if (j.contains("think_ms")) {
            const auto range = j["think_ms"].get<std::vector<std::int64_t>>();
            if (range.size() != 2 || range[0] < 0 || range[1] < range[0]) throw Error(Errc::parse_error, "think_ms must be [min, max]");
            u.think_min_ms = range[0];
            u.think_max_ms = range[1];
        }
        u.ms_per_word = j.value("ms_per_word", u.ms_per_word);
        if (j.contains("behavior"))
            for (const auto& [name, b] : j["behavior"].items()) {
                auto cue = feedback::cue_from_string(name);
                if (!cue) throw Error(Errc::parse_error, "unknown cue '" + name + "' in behavior");
                auto& cb = u.behavior.cues[feedback::index(*cue)];
                cb.good_mean_ms = b.value("good_mean_ms", cb.good_mean_ms);
                cb.bad_mean_ms = b.value("bad_mean_ms", cb.bad_mean_ms);
                if (cb.good_mean_ms <= 0 || cb.bad_mean_ms <= 0) throw Error(Errc::parse_error, "behavior means must be positive");
            }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string("script: ") + e.what());
    }
    if (u.fallback.empty()) throw Error(Errc::parse_error, "script needs at least one fallback line");
    if (u.reciprocal.empty()) u.reciprocal_rate = 0.0;
    return u;
}

ScriptedUser load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open script '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, path + ": " + e.what());
    }
    return parse_script(j);
}

SimulationResult simulate(const ScriptedUser& user, const SimulationOptions& options, AssetsPtr assets, ModelPtr model,
                          std::shared_ptr<RecordSink> sink) {
    SimulationResult r;
    r.session_id = "sim-" + std::to_string(options.seed);
    auto config = options.config;
    config.seed = options.seed;
    Session s(r.session_id, config, assets, std::move(model), std::move(sink));

    std::mt19937_64 rng(options.seed ^ 0x5eed5eed5eed5eedULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> think(user.think_min_ms, user.think_max_ms);
    feedback::SyntheticStream stream(user.behavior, options.seed + 1, options.frame_rate_hz);

    std::int64_t agent_free_at = 0;
    std::string key;
    auto absorb = [&](std::vector<ServerMessage> out) {
        for (auto& m : out) {
            if (const auto* t = std::get_if<dialogue::AgentTurn>(&m.payload)) {
                agent_free_at = t->t_ms + static_cast<std::int64_t>(text::word_count(t->text)) * config.agent_ms_per_word;
                for (const auto& k : t->asked)
                    if (s.dialogue().memory().has_statement(k)) ++r.repeated_asks;
                if (!t->asked.empty()) key = t->asked.back();
            } else if (std::holds_alternative<ErrorMsg>(m.payload)) {
                ++r.errors;
            }
            r.outputs.push_back(std::move(m));
        }
    };
    auto pick = [&](const std::vector<std::string>& pool) {
        return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    };
    auto feed_until = [&](std::int64_t limit) {
        if (!options.frames) return;
        while (stream.peek_time() < limit) absorb(s.handle(FrameMsg{stream.next()}));
    };

    absorb(s.take_pending());
    // Allow for the longest silence allowance so replies land inside the segment.
    const std::int64_t slack = assets->verbosity.base_silence_ms + assets->verbosity.verbose_extra_ms;
    for (const auto& w : config.conversation_windows()) {
        if (options.frames) stream.restart_at(w.start_ms);
        if (w.ordinal > 0) {
            agent_free_at = w.start_ms;
            feed_until(w.start_ms + 1);
        }
        while (true) {
            auto it = user.responses.find(key);
            auto reply = pick(it != user.responses.end() && !it->second.empty() ? it->second : user.fallback);
            if (unit(rng) < user.reciprocal_rate) reply += " " + pick(user.reciprocal);
            const auto t_user = agent_free_at + think(rng) + static_cast<std::int64_t>(text::word_count(reply)) * user.ms_per_word;
            if (t_user + slack >= w.end_ms) break;
            feed_until(t_user);
            auto out = s.handle(UserTurnMsg{reply, t_user});
            ++r.user_turns;
            const auto replies = std::count_if(out.begin(), out.end(), [&](const ServerMessage& m) {
                const auto* t = std::get_if<dialogue::AgentTurn>(&m.payload);
                return t && t->t_ms >= t_user;
            });
            if (replies == 1) ++r.agent_turns;
            else ++r.turns_without_reply;
            absorb(std::move(out));
        }
        feed_until(w.end_ms);
    }
    absorb(s.handle(EndMsg{}));
    for (auto it = r.outputs.rbegin(); it != r.outputs.rend(); ++it)
        if (const auto* sm = std::get_if<SummaryMsg>(&it->payload)) {
            r.summary = sm->overall;
            break;
        }
    const auto& plan = s.dialogue().plan();
    r.max_depth = plan.max_depth();
    for (const auto& e : plan.events())
        if (r.topics.empty() || r.topics.back() != e.topic) r.topics.push_back(e.topic);
    return r;
}

}  // namespace coach::service
