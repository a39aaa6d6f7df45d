#include "coach/dialogue/plan.hpp"

#include <algorithm>
#include <map>

#include "coach/error.hpp"

namespace coach::dialogue {

DialoguePlan DialoguePlan::from_schema(const Schema& schema) {
    DialoguePlan plan;
    plan.current_topic_ = schema.topic;
    for (const auto& e : schema.events) plan.events_.push_back({e, 0, schema.id, schema.topic});
    return plan;
}

void DialoguePlan::begin_topic(std::string_view topic, const SchemaLibrary& library) {
    const Schema* schema = nullptr;
    for (const auto& t : topics_)
        if (t.label == topic) schema = library.find(t.schema_id);
    if (!schema) schema = library.find_topic(topic);
    if (!schema) throw Error(Errc::unresolved_subschema, "no schema for topic '" + std::string(topic) + "'");
    for (const auto& e : schema->events) events_.push_back({e, 0, schema->id, schema->topic});
    mark_visited(topic);
    current_topic_ = std::string(topic);
}

void DialoguePlan::record_engagement(std::size_t words) {
    for (auto& t : topics_)
        if (t.label == current_topic_) {
            t.words += words;
            ++t.turns;
        }
}

void DialoguePlan::mark_visited(std::string_view topic, std::size_t words, std::size_t turns) {
    for (auto& t : topics_)
        if (t.label == topic) {
            t.visited = true;
            t.words += words;
            t.turns += turns;
        }
}

int DialoguePlan::max_depth() const {
    int d = 0;
    for (const auto& e : events_) d = std::max(d, e.depth);
    return d;
}

void DialoguePlan::jump_to(std::size_t index) {
    if (index < cursor_) throw Error(Errc::invalid_config, "plan cursor cannot move backwards");
    cursor_ = std::min(index, events_.size());
}

void DialoguePlan::splice_after_cursor(const Schema& schema) {
    const auto& at = events_.at(cursor_);
    const int depth = at.depth + 1;
    const auto topic = at.topic;
    std::vector<PlanEvent> inserted;
    for (const auto& e : schema.events) inserted.push_back({e, depth, schema.id, topic});
    events_.insert(events_.begin() + static_cast<std::ptrdiff_t>(cursor_) + 1, inserted.begin(), inserted.end());
}

bool LastTurn::satisfies(const Guard& guard) const {
    if (guard.kind == Guard::Kind::tag) return utterance != nullptr && utterance->has_feature(guard.value);
    return std::any_of(gists.begin(), gists.end(), [&](const auto& g) { return !g.is_question() && g.key == guard.value; });
}

AdvanceStatus settle_plan(DialoguePlan& plan, const GistMemory& memory, const LastTurn& last, const SchemaLibrary& library) {
    while (const auto* ev = plan.current()) {
        if (const auto* ask = std::get_if<AgentAsk>(&ev->event); ask && memory.has_statement(ask->key)) {
            // Skip the question and everything through its expect.
            auto i = plan.cursor() + 1;
            const auto& events = plan.events();
            while (i < events.size()) {
                const auto* ex = std::get_if<ExpectUser>(&events[i].event);
                ++i;
                if (ex && ex->key == ask->key) break;
            }
            plan.jump_to(i);
            continue;
        }
        if (const auto* sub = std::get_if<InsertSubschema>(&ev->event)) {
            if (last.satisfies(sub->guard)) {
                const auto* schema = library.find(sub->schema_id);
                if (!schema) throw Error(Errc::unresolved_subschema, "unknown subschema '" + sub->schema_id + "'");
                plan.splice_after_cursor(*schema);
            }
            plan.step();
            continue;
        }
        return AdvanceStatus::ok;
    }
    return AdvanceStatus::exhausted;
}

AdvanceStatus advance_plan(DialoguePlan& plan, const GistMemory& memory, const LastTurn& last, const SchemaLibrary& library) {
    if (plan.exhausted()) return AdvanceStatus::exhausted;
    plan.step();
    return settle_plan(plan, memory, last, library);
}

std::string select_next_topic(const DialoguePlan& plan, const VerbosityProfile& profile, const TopicPolicy& policy) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> by_category;
    for (const auto& t : plan.topics()) {
        if (!t.visited || t.turns == 0) continue;
        auto& [words, turns] = by_category[t.category];
        words += t.words;
        turns += t.turns;
    }
    auto indifferent = [&](const TopicEntry& t) {
        if (profile.level == Verbosity::laconic || t.category.empty()) return false;
        auto it = by_category.find(t.category);
        if (it == by_category.end()) return false;
        const auto [words, turns] = it->second;
        return static_cast<double>(words) / static_cast<double>(turns) < policy.indifference_below;
    };
    const TopicEntry* deferred = nullptr;
    for (const auto& t : plan.topics()) {
        if (t.visited) continue;
        if (!indifferent(t)) return t.label;
        if (!deferred) deferred = &t;
    }
    if (deferred) return deferred->label;
    throw Error(Errc::no_topics_remaining, "every topic has been visited");
}

}  // namespace coach::dialogue
