#include "coach/transduction/tree.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::transduction {

std::string_view to_string(TreeKind kind) {
    switch (kind) {
        case TreeKind::gist: return "gist";
        case TreeKind::reaction: return "reaction";
        case TreeKind::answer: return "answer";
    }
    return "gist";
}

Template Template::parse(std::string_view source) {
    Template t;
    std::string lit;
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source[i] == '$' && i + 1 < source.size() && std::isdigit(static_cast<unsigned char>(source[i + 1]))) {
            std::size_t slot = 0;
            while (i + 1 < source.size() && std::isdigit(static_cast<unsigned char>(source[i + 1])))
                slot = slot * 10 + static_cast<std::size_t>(source[++i] - '0');
            if (slot == 0) throw Error(Errc::invalid_tree, "slot $0 in template '" + std::string(source) + "'");
            if (!lit.empty()) t.pieces_.emplace_back(std::move(lit));
            lit.clear();
            t.pieces_.emplace_back(slot);
        } else {
            lit.push_back(source[i]);
        }
    }
    if (!lit.empty()) t.pieces_.emplace_back(std::move(lit));
    return t;
}

std::string Template::instantiate(const AnnotatedUtterance& input, const std::vector<Span>& captures) const {
    std::string raw;
    for (const auto& piece : pieces_) {
        if (const auto* s = std::get_if<std::string>(&piece)) {
            raw += *s;
        } else {
            const auto slot = std::get<std::size_t>(piece);
            if (slot <= captures.size()) raw += span_text(input, captures[slot - 1]);
        }
    }
    // Collapse runs of whitespace left by empty captures.
    std::string out;
    bool space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
        } else {
            if (space && c != '?' && c != '.' && c != ',' && c != '!') out.push_back(' ');
            space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::size_t Template::max_slot() const {
    std::size_t m = 0;
    for (const auto& piece : pieces_)
        if (const auto* s = std::get_if<std::size_t>(&piece)) m = std::max(m, *s);
    return m;
}

bool TransductionTree::applies_to(std::string_view context) const {
    return std::any_of(contexts.begin(), contexts.end(), [&](const auto& c) { return c == "*" || c == context; });
}

namespace {

void validate_node(const TreeNode& node, std::size_t captures_above, const std::string& tree_id) {
    const auto available = captures_above + node.pattern.capture_count();
    if (!node.children.empty() && !node.outputs.empty())
        throw Error(Errc::invalid_tree, tree_id + ": node '" + node.pattern.to_string() + "' has both children and outputs");
    if (node.children.empty() && node.outputs.empty())
        throw Error(Errc::invalid_tree, tree_id + ": leaf '" + node.pattern.to_string() + "' has no output");
    for (const auto& out : node.outputs)
        if (out.max_slot() > available)
            throw Error(Errc::invalid_tree, tree_id + ": slot $" + std::to_string(out.max_slot()) + " exceeds " +
                                                std::to_string(available) + " captures");
    for (const auto& child : node.children) validate_node(child, available, tree_id);
}

void descend(const std::vector<TreeNode>& nodes, const AnnotatedUtterance& input, std::vector<Span>& captures,
             std::vector<TransductionOutput>& out) {
    for (const auto& node : nodes) {
        auto m = match(node.pattern, input);
        if (!m.matched) continue;
        const auto mark = captures.size();
        captures.insert(captures.end(), m.captures.begin(), m.captures.end());
        if (node.children.empty()) {
            for (const auto& tpl : node.outputs) {
                auto s = tpl.instantiate(input, captures);
                if (!s.empty()) out.push_back({std::move(s), tpl.key});
            }
        } else {
            descend(node.children, input, captures, out);
        }
        captures.resize(mark);
        return;
    }
}

}  // namespace

void TransductionTree::validate() const {
    for (const auto& node : roots) validate_node(node, 0, id);
}

std::vector<TransductionOutput> transduce_outputs(const TransductionTree& tree, const AnnotatedUtterance& input) {
    std::vector<TransductionOutput> out;
    std::vector<Span> captures;
    descend(tree.roots, input, captures, out);
    return out;
}

std::vector<std::string> transduce(const TransductionTree& tree, const AnnotatedUtterance& input) {
    std::vector<std::string> out;
    for (auto& o : transduce_outputs(tree, input)) out.push_back(std::move(o.text));
    return out;
}

namespace {

std::size_t indent_of(std::string_view line, std::size_t line_no) {
    std::size_t n = 0;
    for (char c : line) {
        if (c == ' ') ++n;
        else if (c == '\t') throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": tabs are not allowed for indentation");
        else break;
    }
    return n;
}

}  // namespace

std::vector<TransductionTree> load_trees(std::string_view source, std::size_t gap_cap) {
    std::vector<TransductionTree> trees;
    // Stack of (indent, node) for the tree being built.
    std::vector<std::pair<std::size_t, TreeNode*>> stack;
    std::istringstream in{std::string(source)};
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) { throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": " + msg); };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view view = raw;
        if (auto hash = view.find('#'); hash != view.npos) view = view.substr(0, hash);
        if (text::trim(view).empty()) continue;
        const auto indent = indent_of(view, line_no);
        const auto line = text::trim(view);

        if (text::starts_with_word(line, "tree")) {
            if (indent != 0) fail("tree header must not be indented");
            std::istringstream hs{std::string(line.substr(4))};
            TransductionTree t;
            std::string kind;
            hs >> t.id >> kind;
            if (t.id.empty() || kind.empty()) fail("expected 'tree <id> <kind> [contexts...]'");
            if (kind == "gist") t.kind = TreeKind::gist;
            else if (kind == "reaction") t.kind = TreeKind::reaction;
            else if (kind == "answer") t.kind = TreeKind::answer;
            else fail("unknown tree kind '" + kind + "'");
            for (std::string ctx; hs >> ctx;) t.contexts.push_back(ctx);
            if (t.contexts.empty()) t.contexts.emplace_back("*");
            trees.push_back(std::move(t));
            stack.clear();
            continue;
        }
        if (trees.empty()) fail("node before any tree header");
        auto& tree = trees.back();
        while (!stack.empty() && stack.back().first >= indent) stack.pop_back();

        if (text::starts_with_word(line, "pattern")) {
            const auto colon = line.find(':');
            if (colon == line.npos) fail("expected 'pattern: ...'");
            TreeNode node;
            node.pattern = Pattern::parse(line.substr(colon + 1), gap_cap);
            auto& siblings = stack.empty() ? tree.roots : stack.back().second->children;
            if (!stack.empty() && !stack.back().second->outputs.empty()) fail("pattern under a node that already has outputs");
            siblings.push_back(std::move(node));
            stack.emplace_back(indent, &siblings.back());
        } else if (text::starts_with_word(line, "out")) {
            const auto colon = line.find(':');
            if (colon == line.npos) fail("expected 'out: ...'");
            if (stack.empty()) fail("output outside a pattern node");
            auto tpl = Template::parse(text::trim(line.substr(colon + 1)));
            tpl.key = std::string(text::trim(line.substr(3, colon - 3)));
            auto* parent = stack.back().second;
            if (!parent->children.empty()) fail("output on a node with children");
            parent->outputs.push_back(std::move(tpl));
        } else {
            fail("expected 'tree', 'pattern:' or 'out:'");
        }
    }
    for (const auto& t : trees) t.validate();
    return trees;
}

std::vector<TransductionTree> load_trees_file(const std::string& path, std::size_t gap_cap) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open tree file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_trees(buf.str(), gap_cap);
}

}  // namespace coach::transduction
