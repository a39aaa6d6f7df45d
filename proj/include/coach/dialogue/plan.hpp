#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coach/dialogue/gist.hpp"
#include "coach/dialogue/schema.hpp"
#include "coach/dialogue/verbosity.hpp"

namespace coach::dialogue {

struct PlanEvent {
    SchemaEvent event;
    int depth = 0;
    std::string schema_id;
    std::string topic;
};

struct TopicEntry {
    std::string label;
    std::string category;
    std::string schema_id;
    bool visited = false;
    std::size_t words = 0;
    std::size_t turns = 0;
};

/// Flattened event list with a forward-only cursor. Topics are appended as the
/// conversation reaches them; subschemas are spliced in after their insertion event.
class DialoguePlan {
public:
    DialoguePlan() = default;
    explicit DialoguePlan(std::vector<TopicEntry> topics) : topics_(std::move(topics)) {}

    /// Plan holding a single schema's events at depth 0.
    static DialoguePlan from_schema(const Schema& schema);

    /// Appends the schema for `topic` at the end and marks the topic visited.
    void begin_topic(std::string_view topic, const SchemaLibrary& library);

    const std::vector<PlanEvent>& events() const { return events_; }
    std::size_t cursor() const { return cursor_; }
    bool exhausted() const { return cursor_ >= events_.size(); }
    const PlanEvent* current() const { return exhausted() ? nullptr : &events_[cursor_]; }

    const std::vector<TopicEntry>& topics() const { return topics_; }
    const std::string& current_topic() const { return current_topic_; }
    void record_engagement(std::size_t words);
    void mark_visited(std::string_view topic, std::size_t words = 0, std::size_t turns = 0);
    int max_depth() const;

    // Cursor primitives; forward only.
    void step() { if (cursor_ < events_.size()) ++cursor_; }
    void jump_to(std::size_t index);
    void splice_after_cursor(const Schema& schema);

private:
    std::vector<PlanEvent> events_;
    std::size_t cursor_ = 0;
    std::vector<TopicEntry> topics_;
    std::string current_topic_;
};

/// The user turn most recently completed, for guard evaluation.
struct LastTurn {
    const transduction::AnnotatedUtterance* utterance = nullptr;
    std::vector<GistClause> gists;

    bool satisfies(const Guard& guard) const;
};

enum class AdvanceStatus { ok, exhausted };

/// Steps past the current event, then settles: questions whose key already has
/// a statement gist are skipped through their matching expect, and subschema
/// insertions whose guard holds are spliced in at depth + 1.
AdvanceStatus advance_plan(DialoguePlan& plan, const GistMemory& memory, const LastTurn& last,
                           const SchemaLibrary& library);

/// Settles the event under the cursor without stepping first.
AdvanceStatus settle_plan(DialoguePlan& plan, const GistMemory& memory, const LastTurn& last,
                          const SchemaLibrary& library);

struct TopicPolicy {
    double indifference_below = 5.0;  // mean words/turn on a category
};

/// Next unvisited topic in configured order; topics in a category the user
/// seemed indifferent to go last. Laconic users are exempt from deferral since
/// every category looks indifferent for them.
std::string select_next_topic(const DialoguePlan& plan, const VerbosityProfile& profile,
                              const TopicPolicy& policy = {});

}  // namespace coach::dialogue
