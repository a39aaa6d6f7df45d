#include "coach/dialogue/gist.hpp"

#include <algorithm>
#include <array>

#include "coach/text.hpp"

namespace coach::dialogue {

using transduction::AnnotatedUtterance;
using transduction::TransductionTree;
using transduction::TreeKind;

GistClause GistClause::make(std::string_view raw, std::string key, std::size_t turn) {
    GistClause g;
    g.text = text::canonicalize(raw);
    g.kind = !g.text.empty() && g.text.back() == '?' ? Kind::question : Kind::statement;
    g.key = std::move(key);
    g.turn = turn;
    return g;
}

bool GistMemory::insert(const GistClause& gist) {
    if (gist.text.empty()) return false;
    if (!texts_.insert(gist.text).second) return false;
    by_key_.emplace(gist.key, gists_.size());
    gists_.push_back(gist);
    return true;
}

bool GistMemory::contains(std::string_view t) const { return texts_.count(text::canonicalize(t)) != 0; }

bool GistMemory::has_statement(std::string_view key) const {
    auto [lo, hi] = by_key_.equal_range(key);
    for (auto it = lo; it != hi; ++it)
        if (!gists_[it->second].is_question()) return true;
    return false;
}

std::vector<GistClause> GistMemory::for_key(std::string_view key) const {
    std::vector<GistClause> out;
    auto [lo, hi] = by_key_.equal_range(key);
    for (auto it = lo; it != hi; ++it) out.push_back(gists_[it->second]);
    return out;
}

std::vector<const TransductionTree*> RuleSet::trees_for(TreeKind kind, std::string_view context) const {
    std::vector<const TransductionTree*> specific, fallback, general;
    for (const auto& t : trees) {
        if (t.kind != kind) continue;
        for (const auto& c : t.contexts) {
            if (c == "*") {
                general.push_back(&t);
                break;
            }
            if (!context.empty() && c == context) {
                specific.push_back(&t);
                break;
            }
            if (c == "fallback") {
                fallback.push_back(&t);
                break;
            }
        }
    }
    auto out = specific.empty() ? fallback : specific;
    out.insert(out.end(), general.begin(), general.end());
    return out;
}

namespace {

constexpr std::array<std::string_view, 20> kQuestionOpeners = {
    "what", "how", "why", "where", "when", "who", "which", "do", "does", "did",
    "are", "is", "can", "could", "would", "will", "have", "has", "should", "whats"};

std::optional<std::string> trailing_question(const AnnotatedUtterance& input) {
    if (input.empty() || input.tokens.back().word != "?") return std::nullopt;
    std::size_t start = input.size() - 1;
    while (start > 0 && input.tokens[start - 1].word != "?") --start;
    std::size_t opener = input.size();
    for (auto i = start; i + 1 < input.size(); ++i)
        if (std::find(kQuestionOpeners.begin(), kQuestionOpeners.end(), input.tokens[i].word) != kQuestionOpeners.end())
            opener = i;
    if (opener == input.size()) opener = start;
    if (opener + 1 >= input.size()) return std::nullopt;
    return transduction::span_text(input, {opener, input.size()});
}

std::string pick(const std::vector<std::string>& options, Rng* rng) {
    if (options.size() == 1 || rng == nullptr) return options.front();
    return options[(*rng)() % options.size()];
}

}  // namespace

std::vector<GistClause> extract_gist(const AnnotatedUtterance& input, const GistContext& context, const RuleSet& rules,
                                     std::size_t turn) {
    std::vector<GistClause> out;
    if (input.empty()) return out;
    std::set<std::string> seen;
    for (const auto* tree : rules.trees_for(TreeKind::gist, context.key)) {
        for (auto& o : transduction::transduce_outputs(*tree, input)) {
            auto g = GistClause::make(o.text, o.key.empty() ? context.key : o.key, turn);
            if (g.text.empty() || !seen.insert(g.text).second) continue;
            out.push_back(std::move(g));
        }
    }
    const bool has_question = std::any_of(out.begin(), out.end(), [](const auto& g) { return g.is_question(); });
    if (!has_question) {
        if (auto q = trailing_question(input)) {
            auto g = GistClause::make(*q, context.key, turn);
            if (g.is_question() && seen.insert(g.text).second) out.push_back(std::move(g));
        }
    }
    return out;
}

std::string_view to_string(AgentTurn::Provenance p) {
    switch (p) {
        case AgentTurn::Provenance::reaction: return "reaction";
        case AgentTurn::Provenance::answer: return "answer";
        case AgentTurn::Provenance::scheduled_event: return "scheduled-event";
        case AgentTurn::Provenance::prompt: return "prompt";
    }
    return "prompt";
}

std::optional<AgentTurn::Provenance> provenance_from_string(std::string_view s) {
    for (auto p : {AgentTurn::Provenance::reaction, AgentTurn::Provenance::answer, AgentTurn::Provenance::scheduled_event,
                   AgentTurn::Provenance::prompt})
        if (to_string(p) == s) return p;
    return std::nullopt;
}

AgentTurn generate_reaction(const std::vector<GistClause>& gists, GistMemory& memory, const RuleSet& rules, Rng* rng) {
    AgentTurn turn;
    auto respond = [&](const GistClause& g, TreeKind kind) -> std::optional<std::string> {
        const auto annotated = transduction::annotate(g.text, rules.lexicon);
        for (const auto* tree : rules.trees_for(kind, g.key)) {
            auto options = transduction::transduce(*tree, annotated);
            if (!options.empty()) return pick(options, rng);
        }
        return std::nullopt;
    };

    const auto question = std::find_if(gists.rbegin(), gists.rend(), [](const auto& g) { return g.is_question(); });
    const auto statement = std::find_if(gists.begin(), gists.end(), [](const auto& g) { return !g.is_question(); });
    if (question != gists.rend()) {
        turn.provenance = AgentTurn::Provenance::answer;
        turn.text = respond(*question, TreeKind::answer).value_or(rules.lines.fallback_answer);
        turn.gists.push_back(question->text);
    } else if (statement != gists.end()) {
        if (auto r = respond(*statement, TreeKind::reaction)) {
            turn.provenance = AgentTurn::Provenance::reaction;
            turn.text = std::move(*r);
        } else {
            turn.provenance = AgentTurn::Provenance::prompt;
            turn.text = rules.lines.neutral_prompt;
        }
        turn.gists.push_back(statement->text);
    } else {
        turn.provenance = AgentTurn::Provenance::prompt;
        turn.text = rules.lines.neutral_prompt;
    }
    for (const auto& g : gists) memory.insert(g);
    return turn;
}

}  // namespace coach::dialogue
