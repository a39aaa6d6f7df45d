#include "coach/transduction/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::transduction {

namespace {

const TagSet kEmpty;

bool valid_tag(std::string_view tag) {
    if (tag.empty()) return false;
    for (char c : tag) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '-' || c == '_')) return false;
    }
    return true;
}

}  // namespace

std::string normalize_tag(std::string_view tag) { return text::to_upper(text::trim(tag)); }

FeatureLexicon FeatureLexicon::build(const std::vector<std::pair<std::string, TagSet>>& word_entries,
                                     const std::vector<std::pair<std::string, TagSet>>& parent_entries) {
    FeatureLexicon lex;
    for (const auto& [word, tags] : word_entries) {
        auto key = text::to_lower(word);
        if (lex.word_features_.count(key))
            throw Error(Errc::duplicate_word_entry, "word '" + key + "' listed twice");
        TagSet normalized;
        for (const auto& t : tags) normalized.insert(normalize_tag(t));
        lex.tags_.insert(normalized.begin(), normalized.end());
        lex.word_features_.emplace(std::move(key), std::move(normalized));
    }
    for (const auto& [tag, parents] : parent_entries) {
        auto key = normalize_tag(tag);
        lex.tags_.insert(key);
        auto& slot = lex.parents_[key];
        for (const auto& p : parents) slot.insert(normalize_tag(p));
    }
    for (const auto& [tag, parents] : lex.parents_)
        for (const auto& p : parents)
            if (!lex.tags_.count(p))
                throw Error(Errc::undeclared_parent_tag, "parent '" + p + "' of '" + tag + "' is never declared");

    // Depth-first search with colouring; the grey stack names the offending chain.
    std::map<std::string, int, std::less<>> colour;
    std::vector<std::string> stack;
    auto visit = [&](auto&& self, const std::string& tag) -> void {
        colour[tag] = 1;
        stack.push_back(tag);
        for (const auto& p : lex.parents(tag)) {
            const int c = colour[p];
            if (c == 1) {
                std::string chain;
                auto it = std::find(stack.begin(), stack.end(), p);
                for (; it != stack.end(); ++it) chain += *it + " < ";
                throw Error(Errc::cycle_detected, chain + p);
            }
            if (c == 0) self(self, p);
        }
        stack.pop_back();
        colour[tag] = 2;
    };
    for (const auto& tag : lex.tags_)
        if (colour[tag] == 0) visit(visit, tag);

    for (const auto& [word, tags] : lex.word_features_) lex.word_closures_.emplace(word, lex.closure(tags));
    return lex;
}

const TagSet& FeatureLexicon::features(std::string_view word) const {
    auto it = word_features_.find(word);
    return it == word_features_.end() ? kEmpty : it->second;
}

const TagSet& FeatureLexicon::closure_of_word(std::string_view word) const {
    auto it = word_closures_.find(word);
    return it == word_closures_.end() ? kEmpty : it->second;
}

const TagSet& FeatureLexicon::parents(std::string_view tag) const {
    auto it = parents_.find(tag);
    return it == parents_.end() ? kEmpty : it->second;
}

bool FeatureLexicon::declared(std::string_view tag) const { return tags_.count(normalize_tag(tag)) != 0; }

TagSet FeatureLexicon::closure(const TagSet& tags) const {
    TagSet out;
    std::vector<std::string> work(tags.begin(), tags.end());
    while (!work.empty()) {
        auto tag = std::move(work.back());
        work.pop_back();
        if (!out.insert(tag).second) continue;
        for (const auto& p : parents(tag)) work.push_back(p);
    }
    return out;
}

FeatureLexicon load_lexicon(std::string_view source) {
    std::vector<std::pair<std::string, TagSet>> words;
    std::vector<std::pair<std::string, TagSet>> parents;
    std::size_t line_no = 0;
    std::istringstream in{std::string(source)};
    std::string raw;
    auto tag_list = [&](std::string_view list) {
        TagSet tags;
        if (text::trim(list).empty()) return tags;
        for (const auto& t : text::split(list, ',')) {
            if (!valid_tag(t))
                throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": bad tag '" + t + "'");
            tags.insert(normalize_tag(t));
        }
        return tags;
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        if (auto colon = line.find(':'); colon != line.npos) {
            auto word = text::trim(line.substr(0, colon));
            if (word.empty() || word.find(' ') != word.npos)
                throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": bad word '" + std::string(word) + "'");
            auto tags = tag_list(line.substr(colon + 1));
            if (tags.empty())
                throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": word without tags");
            words.emplace_back(text::to_lower(word), std::move(tags));
        } else if (auto lt = line.find('<'); lt != line.npos) {
            auto tag = text::trim(line.substr(0, lt));
            if (!valid_tag(tag))
                throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": bad tag '" + std::string(tag) + "'");
            parents.emplace_back(normalize_tag(tag), tag_list(line.substr(lt + 1)));
        } else {
            throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 'word : TAGS' or 'TAG < PARENTS'");
        }
    }
    return FeatureLexicon::build(words, parents);
}

FeatureLexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open lexicon '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_lexicon(buf.str());
}

}  // namespace coach::transduction
