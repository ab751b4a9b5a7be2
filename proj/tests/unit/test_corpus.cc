#include <sstream>

#include "doctest.h"
#include "slm/error.h"
#include "slm/text.h"
#include "slm/treebank.h"
#include "slm/vocabulary.h"
#include "synthetic.h"

using namespace slm;

TEST_SUITE("corpus") {

TEST_CASE("retokenize applies rules pointwise") {
  RewriteTable rules;
  rules.Add("don't", {"do", "n't"});
  CHECK(Retokenize({"don't"}, rules) == Sentence{"do", "n't"});
  CHECK(Retokenize({"flight"}, rules) == Sentence{"flight"});
  CHECK(Retokenize({"i", "don't", "fly"}, rules) == Sentence{"i", "do", "n't", "fly"});
}

TEST_CASE("rewrite table file format") {
  std::istringstream in("don't\tdo n't\n\ncan't\tca n't\n");
  RewriteTable rules = RewriteTable::Parse(in);
  CHECK(rules.size() == 2);
  REQUIRE(rules.Find("can't") != nullptr);
  CHECK(*rules.Find("can't") == std::vector<std::string>{"ca", "n't"});
  std::istringstream bad("no-tab-here\n");
  CHECK_THROWS_AS(RewriteTable::Parse(bad), Error);
}

TEST_CASE("map to vocabulary") {
  Vocabulary v;
  const WordId flight = v.AddWord("flight");
  CHECK(MapToVocabulary({"flight"}, v) == IndexedSentence{flight});
  CHECK(MapToVocabulary({"zyzzyva"}, v) == IndexedSentence{Vocabulary::kUnk});
  CHECK(MapToVocabulary({}, v).empty());
}

TEST_CASE("vocabulary markers and stable indices") {
  Vocabulary v;
  CHECK(v.WordString(Vocabulary::kBos) == "<s>");
  CHECK(v.WordString(Vocabulary::kEos) == "</s>");
  CHECK(v.WordString(Vocabulary::kUnk) == "<unk>");
  const WordId a = v.AddWord("a");
  CHECK(v.AddWord("a") == a);
  CHECK(v.Word("a") == a);
  CHECK(v.Word("nothing") == Vocabulary::kUnk);
  std::istringstream in("# comment\nflight\n<unk>\nfare\n");
  Vocabulary f = Vocabulary::ReadWordFile(in);
  CHECK(f.num_words() == 5);
  CHECK(f.Word("fare") == 4);
}

TEST_CASE("oov rate is the unknown fraction") {
  std::vector<IndexedSentence> s{{3, Vocabulary::kUnk}, {Vocabulary::kUnk, 4, 5, 6}};
  CHECK(OovRate(s) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(OovRate({}) == 0.0);
}

TEST_CASE("parse bracketed trees") {
  BracketedTree t = ParseBracketed("(S (NP (NN flight)))");
  CHECK(t.label == "S");
  REQUIRE(t.children.size() == 1);
  CHECK(t.children[0].label == "NP");
  REQUIRE(t.children[0].children.size() == 1);
  CHECK(t.children[0].children[0].label == "NN");
  CHECK(t.children[0].children[0].word == "flight");

  BracketedTree s = ParseBracketed("(S (NP (DT a) (NN flight)) (VP (VB leaves)))");
  CHECK(s.children.size() == 2);
  CHECK(Yield(s) == std::vector<std::string>{"a", "flight", "leaves"});
}

TEST_CASE("bracketed parse errors carry offsets") {
  try {
    ParseBracketed("(S (NP");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);
    CHECK(e.code() == ErrorCode::kFormat);
  }
  CHECK_THROWS_AS(ParseBracketed("()"), ParseError);
  CHECK_THROWS_AS(ParseBracketed("(NN a b)"), ParseError);
  CHECK_THROWS_AS(ParseBracketed("(S (NN a)) extra"), ParseError);
  CHECK_THROWS_AS(ParseBracketed("(S (NN a)))"), ParseError);
}

TEST_CASE("canonical serialization round-trips") {
  const char* canonical[] = {"(S (NP (NN flight)))", "(S (NP (DT a) (NN flight)) (VP (VB leaves)))"};
  for (const char* text : canonical) CHECK(Serialize(ParseBracketed(text)) == text);
  CHECK(Serialize(ParseBracketed("  (S\n (NP   (NN flight) ) )")) == "(S (NP (NN flight)))");
  for (const auto& tree : slm_test::GenerateTreebank(slm_test::TravelLexicon(), 200, 5)) {
    const std::string text = Serialize(tree);
    CHECK(Serialize(ParseBracketed(text)) == text);
  }
}

TEST_CASE("annotation stripping") {
  BracketedTree t = ParseBracketed("(S (NP-SBJ-1 (PRP i)) (VP (VB fly) (NP (-NONE- *T*))))");
  CHECK(Serialize(StripAnnotations(t)) == "(S (NP (PRP i)) (VP (VB fly)))");
}

TEST_CASE("head percolation") {
  const HeadRules rules = HeadRules::Default();
  HeadTree leaf = PercolateHeadwords(ParseBracketed("(NN flight)"), rules);
  CHECK(leaf.head == Head{"flight", "NN"});
  HeadTree np = PercolateHeadwords(ParseBracketed("(NP (DT a) (NN flight))"), rules);
  CHECK(np.head == Head{"flight", "NN"});
  CHECK(np.head_child == 1);
  HeadTree s = PercolateHeadwords(
      ParseBracketed("(S (NP (DT a) (NN flight)) (VP (VB leaves)))"), rules);
  CHECK(s.head == Head{"leaves", "VP"});
}

TEST_CASE("head rule file and fallback") {
  std::istringstream in("NP right NN\n* right\n");
  HeadRules rules = HeadRules::Parse(in);
  HeadTree x = PercolateHeadwords(ParseBracketed("(X (A a) (B b))"), rules);
  CHECK(x.head == Head{"b", "B"});
  HeadTree np = PercolateHeadwords(ParseBracketed("(NP (NN a) (DT b))"), rules);
  CHECK(np.head == Head{"a", "NN"});
  std::istringstream bad("NP sideways NN\n");
  CHECK_THROWS_AS(HeadRules::Parse(bad), Error);
}

TEST_CASE("binarization") {
  const HeadRules rules = HeadRules::Default();
  auto bin = [&](const char* text) {
    return Binarize(PercolateHeadwords(ParseBracketed(text), rules));
  };
  BinarizedTree two = bin("(NP (DT a) (NN flight))");
  CHECK(Serialize(two) == "(NP (DT a) (NN flight))");
  CHECK_FALSE(two.head_is_left);

  BinarizedTree three = bin("(NP (DT the) (JJ cheapest) (NN flight))");
  CHECK(Serialize(three) == "(NP (DT the) (NP (JJ cheapest) (NN flight)))");
  CHECK(three.head.word == "flight");
  CHECK(three.right().head.word == "flight");

  BinarizedTree unary = bin("(S (NP (DT a) (NN flight)))");
  CHECK(Serialize(unary) == "(S (DT a) (NN flight))");
  CHECK(unary.head == Head{"flight", "NN"});

  BinarizedTree onto_leaf = bin("(NP (NN flight))");
  CHECK(onto_leaf.is_leaf());
  CHECK(onto_leaf.head == Head{"flight", "NN"});

  BinarizedTree vp = bin("(VP (VB book) (NP (DT a) (NN seat)) (PP (IN to) (NP (NNP denver))))");
  CHECK(Serialize(vp) == "(VP (VP (VB book) (NP (DT a) (NN seat))) (PP (IN to) (NNP denver)))");
  CHECK(vp.head.word == "book");
}

TEST_CASE("binarization preserves yield and head inheritance") {
  const HeadRules rules = HeadRules::Default();
  for (const auto& tree : slm_test::GenerateTreebank(slm_test::TravelLexicon(), 300, 11)) {
    BinarizedTree b = Binarize(PercolateHeadwords(tree, rules));
    CHECK(Yield(b) == Yield(tree));
    std::string why;
    CHECK_MESSAGE(CheckBinarized(b, &why), why);
  }
}

TEST_CASE("parse file reading skips blank lines") {
  std::istringstream in("(S (NN a))\n\n(S (NN b))\n");
  CHECK(ReadParseFile(in).size() == 2);
  std::istringstream bad("(S (NN a))\n(S (NN\n");
  CHECK_THROWS_AS(ReadParseFile(bad), Error);
}

}  // TEST_SUITE
