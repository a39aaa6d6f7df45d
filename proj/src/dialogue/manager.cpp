#include "coach/dialogue/manager.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "coach/error.hpp"
#include "coach/text.hpp"
#include "coach/transduction/lexicon.hpp"
#include "coach/transduction/tree.hpp"

namespace coach::dialogue {

namespace fs = std::filesystem;

std::shared_ptr<const DialogueAssets> load_dialogue_assets(const std::string& rules_dir) {
    auto assets = std::make_shared<DialogueAssets>();
    const fs::path root(rules_dir);
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error(Errc::io_error, "rules directory '" + rules_dir + "' not found");

    assets->rules.lexicon = transduction::load_lexicon_file((root / "lexicon.txt").string());
    std::vector<fs::path> tree_files;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.path().extension() == ".trees") tree_files.push_back(entry.path());
    std::sort(tree_files.begin(), tree_files.end());
    for (const auto& f : tree_files)
        for (auto& t : transduction::load_trees_file(f.string())) assets->rules.trees.push_back(std::move(t));
    assets->schemas = load_schema_dir((root / "schemas").string());

    std::ifstream in(root / "dialogue.json");
    if (!in) throw Error(Errc::io_error, "missing dialogue.json in '" + rules_dir + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string("dialogue.json: ") + e.what());
    }
    for (const auto& id : j.at("topics")) {
        auto s = id.get<std::string>();
        if (!assets->schemas.find(s)) throw Error(Errc::unresolved_subschema, "topic schema '" + s + "' not found");
        assets->default_topics.push_back(std::move(s));
    }
    if (j.contains("lines")) {
        const auto& l = j["lines"];
        auto& lines = assets->rules.lines;
        lines.neutral_prompt = l.value("neutral_prompt", lines.neutral_prompt);
        lines.fallback_answer = l.value("fallback_answer", lines.fallback_answer);
        lines.elaboration_prompt = l.value("elaboration_prompt", lines.elaboration_prompt);
        lines.resume = l.value("resume", lines.resume);
        lines.closing = l.value("closing", lines.closing);
    }
    if (j.contains("verbosity")) {
        const auto& v = j["verbosity"];
        auto& p = assets->verbosity;
        p.window = v.value("window", p.window);
        p.laconic_below = v.value("laconic_below", p.laconic_below);
        p.verbose_above = v.value("verbose_above", p.verbose_above);
        p.base_silence_ms = v.value("base_silence_ms", p.base_silence_ms);
        p.verbose_extra_ms = v.value("verbose_extra_ms", p.verbose_extra_ms);
    }
    assets->topic_policy.indifference_below = j.value("indifference_below", assets->topic_policy.indifference_below);
    return assets;
}

namespace {

std::vector<TopicEntry> topic_entries(const DialogueAssets& assets, const std::vector<std::string>& order) {
    std::vector<TopicEntry> out;
    for (const auto& id : order) {
        const auto* schema = assets.schemas.find(id);
        if (!schema) throw Error(Errc::invalid_config, "unknown topic schema '" + id + "'");
        out.push_back({schema->topic, schema->category, schema->id});
    }
    return out;
}

}  // namespace

DialogueManager::DialogueManager(std::shared_ptr<const DialogueAssets> assets, std::vector<std::string> topic_order,
                                 std::uint64_t seed)
    : assets_(std::move(assets)),
      plan_(topic_entries(*assets_, topic_order.empty() ? assets_->default_topics : topic_order)),
      rng_(seed) {}

VerbosityProfile DialogueManager::profile() const { return gauge_verbosity_counts(word_counts_, assets_->verbosity); }

std::optional<GistContext> DialogueManager::question_in_force() const {
    const auto* ev = plan_.current();
    if (!ev) return std::nullopt;
    const auto* ex = std::get_if<ExpectUser>(&ev->event);
    if (!ex) return std::nullopt;
    if (asked_ && asked_->key == ex->key) return asked_;
    return GistContext{ex->key, ""};
}

DialogueManager::Scheduled DialogueManager::run_scheduled(const LastTurn& last) {
    Scheduled out;
    const auto& lib = assets_->schemas;
    while (true) {
        if (settle_plan(plan_, memory_, last, lib) == AdvanceStatus::exhausted) {
            const bool remaining = std::any_of(plan_.topics().begin(), plan_.topics().end(),
                                               [](const TopicEntry& t) { return !t.visited; });
            if (remaining) {
                plan_.begin_topic(select_next_topic(plan_, profile(), assets_->topic_policy), lib);
                continue;
            }
            if (!closed_) {
                out.lines.push_back(assets_->rules.lines.closing);
                closed_ = true;
            }
            return out;
        }
        const auto& ev = plan_.current()->event;
        if (const auto* say = std::get_if<AgentSay>(&ev)) {
            out.lines.push_back(say->text);
        } else if (const auto* ask = std::get_if<AgentAsk>(&ev)) {
            out.lines.push_back(ask->text);
            out.asked.push_back(ask->key);
            asked_ = GistContext{ask->key, ask->text};
        } else {
            return out;  // waiting on the user
        }
        plan_.step();
    }
}

AgentTurn DialogueManager::open() {
    auto scheduled = run_scheduled(LastTurn{});
    AgentTurn turn;
    turn.provenance = AgentTurn::Provenance::scheduled_event;
    turn.text = text::join(scheduled.lines, " ");
    turn.asked = std::move(scheduled.asked);
    return turn;
}

AgentTurn DialogueManager::resume() {
    AgentTurn turn;
    turn.provenance = AgentTurn::Provenance::scheduled_event;
    std::vector<std::string> lines{assets_->rules.lines.resume};
    if (auto q = question_in_force(); q && !q->question.empty() && !memory_.has_statement(q->key)) {
        lines.push_back(q->question);
        turn.asked.push_back(q->key);
    }
    turn.text = text::join(lines, " ");
    return turn;
}

AgentTurn DialogueManager::respond(std::string_view user_text) {
    history_.emplace_back(user_text);
    const auto words = text::word_count(user_text);
    word_counts_.push_back(words);
    const auto turn_index = history_.size();
    const auto annotated = transduction::annotate(user_text, assets_->rules.lexicon);
    const auto context = question_in_force();
    auto gists = extract_gist(annotated, context.value_or(GistContext{}), assets_->rules, turn_index);
    plan_.record_engagement(words);

    const bool answered = context && std::any_of(gists.begin(), gists.end(), [&](const GistClause& g) {
                              return !g.is_question() && g.key == context->key;
                          });
    const bool asked_back = std::any_of(gists.begin(), gists.end(), [](const GistClause& g) { return g.is_question(); });
    if (context && !answered && !asked_back && profile().wants_elaboration() && elaborated_at_ != plan_.cursor()) {
        elaborated_at_ = plan_.cursor();
        for (const auto& g : gists) memory_.insert(g);
        AgentTurn turn;
        turn.provenance = AgentTurn::Provenance::prompt;
        turn.text = assets_->rules.lines.elaboration_prompt;
        for (const auto& g : gists) turn.gists.push_back(g.text);
        return turn;
    }

    auto turn = generate_reaction(gists, memory_, assets_->rules, &rng_);
    LastTurn last{&annotated, gists};
    if (context) advance_plan(plan_, memory_, last, assets_->schemas);
    auto scheduled = run_scheduled(last);
    if (!scheduled.lines.empty()) turn.text += " " + text::join(scheduled.lines, " ");
    turn.asked = std::move(scheduled.asked);
    return turn;
}

}  // namespace coach::dialogue
