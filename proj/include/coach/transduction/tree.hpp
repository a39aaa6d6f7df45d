#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coach/transduction/pattern.hpp"

namespace coach::transduction {

enum class TreeKind { gist, reaction, answer };

std::string_view to_string(TreeKind kind);

/// Output template: literal text interleaved with 1-based slot references into
/// the captures accumulated along the root-to-leaf path.
class Template {
public:
    using Piece = std::variant<std::string, std::size_t>;

    static Template parse(std::string_view source);

    std::string instantiate(const AnnotatedUtterance& input, const std::vector<Span>& captures) const;
    std::size_t max_slot() const;
    const std::vector<Piece>& pieces() const { return pieces_; }

    /// Optional context key attached by `out <key>:`; empty when absent.
    std::string key;

private:
    std::vector<Piece> pieces_;
};

struct TreeNode {
    Pattern pattern;
    std::vector<TreeNode> children;
    std::vector<Template> outputs;  // non-empty only on leaves
};

struct TransductionOutput {
    std::string text;
    std::string key;

    bool operator==(const TransductionOutput&) const = default;
};

/// A forest of top-level nodes under an implicit always-matching root.
class TransductionTree {
public:
    std::string id;
    TreeKind kind = TreeKind::gist;
    /// Context keys the tree applies to. "*" means every context; "fallback"
    /// marks trees used when no tree names the context in force.
    std::vector<std::string> contexts;
    std::vector<TreeNode> roots;

    bool applies_to(std::string_view context) const;
    /// Throws Errc::invalid_tree when a slot reference has no capture on its path
    /// or a node carries both children and outputs.
    void validate() const;
};

/// Depth-first descent into the first matching child at each level; the leaf
/// reached contributes all of its templates. Empty when nothing matches.
std::vector<TransductionOutput> transduce_outputs(const TransductionTree& tree, const AnnotatedUtterance& input);
std::vector<std::string> transduce(const TransductionTree& tree, const AnnotatedUtterance& input);

/// Tree file: `tree <id> <gist|reaction|answer> [contexts...]` headers followed by
/// indentation-nested `pattern:` and `out:` / `out <key>:` lines.
std::vector<TransductionTree> load_trees(std::string_view source, std::size_t gap_cap = kDefaultGapCap);
std::vector<TransductionTree> load_trees_file(const std::string& path, std::size_t gap_cap = kDefaultGapCap);

}  // namespace coach::transduction
