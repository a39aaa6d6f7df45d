#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coach/dialogue/gist.hpp"
#include "coach/dialogue/plan.hpp"
#include "coach/dialogue/schema.hpp"
#include "coach/dialogue/verbosity.hpp"

namespace coach::dialogue {

/// Read-only rule assets shared by every session.
struct DialogueAssets {
    RuleSet rules;
    SchemaLibrary schemas;
    std::vector<std::string> default_topics;  // schema ids in session order
    VerbosityPolicy verbosity;
    TopicPolicy topic_policy;
};

/// Loads `lexicon.txt`, every `*.trees` file, `schemas/*.schema` and
/// `dialogue.json` (topic order, fixed lines, thresholds) from a rules directory.
std::shared_ptr<const DialogueAssets> load_dialogue_assets(const std::string& rules_dir);

/// One conversation's dialogue state: plan, gist memory and user history.
class DialogueManager {
public:
    DialogueManager(std::shared_ptr<const DialogueAssets> assets, std::vector<std::string> topic_order,
                    std::uint64_t seed);

    /// Opening turn: the scheduled events of the first topic up to its first expect.
    AgentTurn open();
    /// Exactly one agent turn per user turn.
    AgentTurn respond(std::string_view user_text);
    /// Greeting after a break, re-asking the pending question if any.
    AgentTurn resume();

    bool finished() const { return closed_; }
    const DialoguePlan& plan() const { return plan_; }
    const GistMemory& memory() const { return memory_; }
    VerbosityProfile profile() const;
    const std::vector<std::string>& history() const { return history_; }
    std::optional<GistContext> question_in_force() const;

private:
    struct Scheduled {
        std::vector<std::string> lines;
        std::vector<std::string> asked;
    };
    Scheduled run_scheduled(const LastTurn& last);

    std::shared_ptr<const DialogueAssets> assets_;
    DialoguePlan plan_;
    GistMemory memory_;
    Rng rng_;
    std::vector<std::string> history_;
    std::vector<std::size_t> word_counts_;
    std::optional<GistContext> asked_;
    std::optional<std::size_t> elaborated_at_;
    bool closed_ = false;
};

}  // namespace coach::dialogue
