#include <doctest.h>

#include <random>

#include "coach/error.hpp"
#include "coach/text.hpp"
#include "coach/transduction/lexicon.hpp"
#include "coach/transduction/pattern.hpp"
#include "coach/transduction/tree.hpp"
#include "../support/oracles.hpp"

using namespace coach;
using namespace coach::transduction;

namespace {

FeatureLexicon linguistics_lexicon() {
    return load_lexicon("happy : GOODPRED\nlinguistics : SOCIAL-SCIENCE\nSOCIAL-SCIENCE < ACADEMIC-SUBJECT\nACADEMIC-SUBJECT <\n");
}

template <class Fn>
Errc code_of(Fn fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::io_error;
}

std::vector<std::string> texts(const AnnotatedUtterance& in, const std::vector<Span>& spans) {
    std::vector<std::string> out;
    for (auto s : spans) out.push_back(span_text(in, s));
    return out;
}

}  // namespace

TEST_SUITE("transduction") {

TEST_CASE("tokenize and canonicalize") {
    CHECK(text::tokenize("Don't STOP, now?") == std::vector<std::string>{"dont", "stop", "now", "?"});
    CHECK(text::tokenize("what about you?") == std::vector<std::string>{"what", "about", "you", "?"});
    CHECK(text::canonicalize("  What about   you ? ") == "what about you?");
    CHECK(text::canonicalize("I play games.") == "i play games");
    CHECK(text::word_count("and you ?") == 2);
}

TEST_CASE("lexicon lookups") {
    auto lex = linguistics_lexicon();
    CHECK(lex.features("happy") == TagSet{"GOODPRED"});
    CHECK(lex.closure_of_word("linguistics") == TagSet{"SOCIAL-SCIENCE", "ACADEMIC-SUBJECT"});
    CHECK(lex.features("zxqv").empty());

    auto empty = load_lexicon("");
    CHECK(empty.word_count() == 0);
    CHECK(empty.closure_of_word("anything").empty());
}

TEST_CASE("lexicon errors") {
    CHECK(code_of([] {
              load_lexicon("linguistics : SOCIAL-SCIENCE\nSOCIAL-SCIENCE < ACADEMIC-SUBJECT\nACADEMIC-SUBJECT < SOCIAL-SCIENCE\n");
          }) == Errc::cycle_detected);
    CHECK(code_of([] { load_lexicon("happy : GOODPRED\nhappy : BADPRED\n"); }) == Errc::duplicate_word_entry);
    CHECK(code_of([] { load_lexicon("happy : GOODPRED\nGOODPRED < NOWHERE\n"); }) == Errc::undeclared_parent_tag);
    CHECK(code_of([] { load_lexicon("this is not a line\n"); }) == Errc::parse_error);
}

TEST_CASE("annotate") {
    auto lex = linguistics_lexicon();
    auto a = annotate("happy", lex);
    REQUIRE(a.size() == 1);
    CHECK(a.tokens[0] == Token{"happy", {"GOODPRED"}});
    auto b = annotate("linguistics", lex);
    CHECK(b.tokens[0].features == TagSet{"ACADEMIC-SUBJECT", "SOCIAL-SCIENCE"});
    auto c = annotate("zxqv", lex);
    CHECK(c.tokens[0] == Token{"zxqv", {}});
    CHECK(b.has_feature("ACADEMIC-SUBJECT"));
    CHECK_FALSE(c.has_feature("GOODPRED"));
}

TEST_CASE("pattern parsing") {
    auto p = Pattern::parse("* @GOODPRED + *3 *2-4 hello");
    REQUIRE(p.elements().size() == 6);
    CHECK(p.elements()[0] == PatternElement{Gap{0, kDefaultGapCap}});
    CHECK(p.elements()[1] == PatternElement{Class{"GOODPRED"}});
    CHECK(p.elements()[2] == PatternElement{Gap{1, kDefaultGapCap}});
    CHECK(p.elements()[3] == PatternElement{Gap{0, 3}});
    CHECK(p.elements()[4] == PatternElement{Gap{2, 4}});
    CHECK(p.elements()[5] == PatternElement{Literal{"hello"}});
    CHECK(p.capture_count() == 5);
    CHECK(Pattern::parse(p.to_string()).elements() == p.elements());
    CHECK(Pattern::parse("what about you ?").elements().back() == PatternElement{Literal{"?"}});

    CHECK(code_of([] { Pattern::parse("* +"); }) == Errc::invalid_pattern);
    CHECK(code_of([] { Pattern::parse("*20 x"); }) == Errc::invalid_pattern);
    CHECK(code_of([] { Pattern::create({Gap{3, 2}, Literal{"x"}}); }) == Errc::invalid_pattern);
}

TEST_CASE("match examples") {
    FeatureLexicon lex = linguistics_lexicon();
    auto in = annotate("i am happy today", lex);
    auto r = match(Pattern::create({Gap{0, 10}, Class{"GOODPRED"}, Gap{0, 10}}), in);
    CHECK(r.matched);
    CHECK(texts(in, r.captures) == std::vector<std::string>{"i am", "happy", "today"});

    auto hello = annotate("hello", lex);
    auto h = match(Pattern::parse("hello"), hello);
    CHECK(h.matched);
    CHECK(h.captures.empty());
    CHECK_FALSE(match(Pattern::parse("hello"), annotate("goodbye", lex)).matched);
}

TEST_CASE("match agrees with exhaustive enumeration") {
    auto lex = load_lexicon("a : X\nb : X, Y\nc : Y\n");
    std::mt19937_64 rng(11);
    const std::vector<std::string> words = {"a", "b", "c", "d"};
    std::uniform_int_distribution<int> pick_word(0, 3), len(0, 7), plen(1, 5), kind(0, 4), gmax(0, 4);
    int matched = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        std::string utter;
        for (int i = 0, n = len(rng); i < n; ++i) utter += words[pick_word(rng)] + " ";
        std::vector<PatternElement> els;
        bool anchor = false;
        for (int i = 0, n = plen(rng); i < n; ++i) {
            switch (kind(rng)) {
                case 0: els.push_back(Literal{words[pick_word(rng)]}); anchor = true; break;
                case 1: els.push_back(Class{pick_word(rng) % 2 ? "X" : "Y"}); anchor = true; break;
                default: {
                    const auto hi = static_cast<std::size_t>(gmax(rng));
                    els.push_back(Gap{std::min<std::size_t>(hi, static_cast<std::size_t>(kind(rng) % 2)), hi});
                }
            }
        }
        if (!anchor) els.push_back(Literal{"a"});
        const auto p = Pattern::create(els);
        const auto in = annotate(utter, lex);
        const auto got = match(p, in);
        const auto want = oracle::brute_match(p, in);
        REQUIRE(got.matched == want.matched);
        if (want.matched) {
            ++matched;
            CHECK(got.captures == want.captures);
        }
    }
    CHECK(matched > 100);
}

TEST_CASE("templates") {
    auto t = Template::parse("user feels $2 , really ?");
    CHECK(t.max_slot() == 2);
    auto lex = linguistics_lexicon();
    auto in = annotate("i am happy", lex);
    auto r = match(Pattern::parse("* @GOODPRED"), in);
    CHECK(t.instantiate(in, r.captures) == "user feels happy, really?");
    CHECK(code_of([] { Template::parse("bad $0"); }) == Errc::invalid_tree);
}

TEST_CASE("transduce examples") {
    auto lex = linguistics_lexicon();
    auto trees = load_trees(
        "tree feel gist *\n"
        "  pattern: * @GOODPRED *\n"
        "    out: user feels $2\n"
        "tree siblings gist *\n"
        "  pattern: * happy *\n"
        "    out: first\n"
        "  pattern: * @GOODPRED *\n"
        "    out: second\n"
        "tree nested reaction *\n"
        "  pattern: user feels *\n"
        "    pattern: user feels @GOODPRED\n"
        "      out: glad you feel $2\n"
        "      out: great that you feel $2\n");
    REQUIRE(trees.size() == 3);
    CHECK(transduce(trees[0], annotate("i am happy", lex)) == std::vector<std::string>{"user feels happy"});
    CHECK(transduce(trees[0], annotate("zxqv", lex)).empty());
    CHECK(transduce(trees[1], annotate("so happy", lex)) == std::vector<std::string>{"first"});
    CHECK(transduce(trees[2], annotate("user feels happy", lex)) ==
          std::vector<std::string>{"glad you feel happy", "great that you feel happy"});
    CHECK(trees[2].kind == TreeKind::reaction);
    CHECK(trees[0].applies_to("anything"));
}

TEST_CASE("out key") {
    auto trees = load_trees("tree t gist free-time\n  pattern: * games *\n    out hobby: user plays games\n");
    auto outs = transduce_outputs(trees[0], annotate("i play games", FeatureLexicon{}));
    REQUIRE(outs.size() == 1);
    CHECK(outs[0] == TransductionOutput{"user plays games", "hobby"});
    CHECK(trees[0].applies_to("free-time"));
    CHECK_FALSE(trees[0].applies_to("movies"));
}

TEST_CASE("tree validation") {
    CHECK(code_of([] { load_trees("tree t gist *\n  pattern: hello\n    out: $1\n"); }) == Errc::invalid_tree);
    CHECK(code_of([] { load_trees("tree t gist *\n  pattern: hello\n"); }) == Errc::invalid_tree);
    CHECK(code_of([] { load_trees("tree t gist *\n\tpattern: hello\n"); }) == Errc::parse_error);
    CHECK(code_of([] { load_trees("  pattern: hello\n"); }) == Errc::parse_error);
}

}  // TEST_SUITE
