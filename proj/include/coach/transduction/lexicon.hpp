#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coach::transduction {

/// Feature tags are stored uppercased; ordered so annotation output is deterministic.
using TagSet = std::set<std::string>;

/// Word -> feature tags, plus a DAG of tag -> parent tags. Immutable once built.
///
/// A tag is declared when it is attached to a word or appears on the left of a
/// parent line (`TAG <` with no parents declares a root). Parents must be
/// declared somewhere in the same source.
class FeatureLexicon {
public:
    FeatureLexicon() = default;

    /// Validates and precomputes closures. Throws coach::Error on duplicate words,
    /// undeclared parents or a cycle in the tag hierarchy.
    static FeatureLexicon build(const std::vector<std::pair<std::string, TagSet>>& word_entries,
                                const std::vector<std::pair<std::string, TagSet>>& parent_entries);

    /// Direct tags for a word; unknown words yield the empty set.
    const TagSet& features(std::string_view word) const;

    /// Transitive closure of the word's tags under the parent relation.
    const TagSet& closure_of_word(std::string_view word) const;

    /// Transitive closure of an arbitrary tag set. Unknown tags are kept as-is.
    TagSet closure(const TagSet& tags) const;

    const TagSet& parents(std::string_view tag) const;
    bool declared(std::string_view tag) const;
    std::size_t word_count() const { return word_features_.size(); }
    const TagSet& tags() const { return tags_; }

private:
    std::map<std::string, TagSet, std::less<>> word_features_;
    std::map<std::string, TagSet, std::less<>> word_closures_;
    std::map<std::string, TagSet, std::less<>> parents_;
    TagSet tags_;
};

/// Parses the line-oriented lexicon format:
///   word : TAG1, TAG2
///   TAG < PARENT1, PARENT2
///   # comment
FeatureLexicon load_lexicon(std::string_view source);
FeatureLexicon load_lexicon_file(const std::string& path);

std::string normalize_tag(std::string_view tag);

}  // namespace coach::transduction
