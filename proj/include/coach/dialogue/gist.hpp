#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coach/transduction/lexicon.hpp"
#include "coach/transduction/pattern.hpp"
#include "coach/transduction/tree.hpp"

namespace coach::dialogue {

using Rng = std::mt19937_64;

struct GistClause {
    enum class Kind { statement, question };

    std::string text;  // canonical form
    Kind kind = Kind::statement;
    std::string key;
    std::size_t turn = 0;

    static GistClause make(std::string_view raw, std::string key, std::size_t turn);
    bool is_question() const { return kind == Kind::question; }
};

class GistMemory {
public:
    /// Returns false when a clause with the same canonical text is already stored.
    bool insert(const GistClause& gist);
    bool contains(std::string_view text) const;
    bool has_statement(std::string_view key) const;
    std::vector<GistClause> for_key(std::string_view key) const;
    const std::vector<GistClause>& all() const { return gists_; }
    std::size_t size() const { return gists_.size(); }

private:
    std::vector<GistClause> gists_;
    std::set<std::string, std::less<>> texts_;
    std::multimap<std::string, std::size_t, std::less<>> by_key_;
};

/// Fixed lines the manager falls back on.
struct DialogueLines {
    std::string neutral_prompt = "I see. Thanks for telling me.";
    std::string fallback_answer = "Good question! I'm not sure I have a great answer, but I'm enjoying our chat.";
    std::string elaboration_prompt = "Could you tell me a little more about that?";
    std::string resume = "Welcome back! Let's keep chatting.";
    std::string closing = "It was really nice talking with you. Thanks for chatting with me!";
};

/// Shared, immutable rule assets: lexicon and the three kinds of trees.
struct RuleSet {
    transduction::FeatureLexicon lexicon;
    std::vector<transduction::TransductionTree> trees;
    DialogueLines lines;

    std::vector<const transduction::TransductionTree*> trees_for(transduction::TreeKind kind, std::string_view context) const;
};

struct GistContext {
    std::string key;       // context key of the question in force; empty when none
    std::string question;  // the question's text
};

/// Gist extraction: trees naming the context key (or "fallback" trees when none
/// do), then trees applying to every context. A trailing '?' with no rule-made
/// question gist yields a question gist from the final clause.
std::vector<GistClause> extract_gist(const transduction::AnnotatedUtterance& input, const GistContext& context,
                                     const RuleSet& rules, std::size_t turn = 0);

struct AgentTurn {
    enum class Provenance { reaction, answer, scheduled_event, prompt };

    std::string text;
    Provenance provenance = Provenance::prompt;
    std::vector<std::string> gists;   // canonical gist texts the turn responds to
    std::vector<std::string> asked;   // context keys of questions asked in this turn
    std::int64_t t_ms = 0;
};

std::string_view to_string(AgentTurn::Provenance p);
std::optional<AgentTurn::Provenance> provenance_from_string(std::string_view s);

/// Second transduction stage. A question gist is answered; otherwise the first
/// statement gist gets a reaction; otherwise the neutral prompt. Every gist is
/// stored in memory. When a leaf offers several lines, `rng` picks one.
AgentTurn generate_reaction(const std::vector<GistClause>& gists, GistMemory& memory, const RuleSet& rules,
                            Rng* rng = nullptr);

}  // namespace coach::dialogue
