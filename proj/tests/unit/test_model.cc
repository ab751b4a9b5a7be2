#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "enumerator.h"
#include "slm/component_model.h"
#include "slm/error.h"
#include "slm/estimation.h"
#include "slm/parse_state.h"
#include "slm/slm_model.h"
#include "slm/text_io.h"
#include "synthetic.h"
#include "toy_model.h"

using namespace slm;

namespace {

Context Ctx(int32_t a, int32_t b = kUnusedField) {
  Context c;
  c.fields[0] = a;
  c.fields[1] = b;
  return c;
}

ContextSchema OneLevel() { return {{"x"}, {{0}}}; }

double SumDistribution(const ComponentModel& m, const Context& c) {
  std::vector<double> dist(m.num_outcomes());
  m.Distribution(c, dist);
  double total = 0.0;
  for (double p : dist) total += p;
  return total;
}

// Component with random fractional counts and weights.
ComponentModel RandomComponent(slm_test::Rng& rng) {
  ContextSchema schema{{"a", "b"}, {{0, 1}, {0}, {}}};
  const int32_t outcomes = 2 + static_cast<int32_t>(rng.Below(6));
  ComponentModel m(schema, outcomes);
  EventCounts events;
  const size_t n = 1 + rng.Below(60);
  for (size_t i = 0; i < n; ++i) {
    events.Add(Ctx(static_cast<int32_t>(rng.Below(4)), static_cast<int32_t>(rng.Below(3))),
               static_cast<int32_t>(rng.Below(outcomes)), 0.1 + rng.Uniform() * 3.0);
  }
  m.SetCounts(events);
  std::map<BucketId, std::vector<double>> weights;
  for (BucketId b = 0; b < 12; ++b) {
    if (rng.Bernoulli(0.3)) continue;
    std::vector<double> w(4, 0.0);
    double total = 0.0;
    for (int l = m.FirstSeenLevel(b); l < 4; ++l) total += (w[l] = rng.Uniform() + 1e-3);
    for (double& x : w) x /= total;
    weights[b] = w;
  }
  m.SetWeights(weights);
  return m;
}

Vocabulary FlightVocab() {
  Vocabulary v;
  v.AddWord("flight");
  v.AddWord("leaves");
  v.AddTag("NN");
  v.AddTag("VB");
  v.AddLabel("NP");
  v.AddLabel("VP");
  return v;
}

WordParsePrefix TwoHeads(const Vocabulary& v) {
  WordParsePrefix p = WordParsePrefix::Initial(v);
  p = ShiftWord(p, v.Word("flight"), v.Tag("NN"));
  p = ApplyAction(p, ParserAction::Null(), v, ParserMode::kFull);
  p = ShiftWord(p, v.Word("leaves"), v.Tag("VB"));
  return p;
}

// All complete derivations reachable through LegalActions/ApplyAction.
void ExpandAll(const StructuredLm& model, const std::vector<WordId>& words, size_t k,
               const WordParsePrefix& p, std::set<ParseDerivation>* out) {
  const Vocabulary& v = model.vocab();
  if (!p.closed) {
    for (const auto& a : LegalActions(p, v, model.mode()))
      ExpandAll(model, words, k, ApplyAction(p, a, v, model.mode()), out);
    return;
  }
  if (p.at_sentence_end()) {
    if (p.complete()) out->insert(p.derivation);
    return;
  }
  const WordId w = k < words.size() ? words[k] : Vocabulary::kEos;
  for (CategoryId t = 0; t < v.num_tags(); ++t)
    ExpandAll(model, words, k + 1, ShiftWord(p, w, t), out);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("component probability: uniform floor") {
  ComponentModel m(OneLevel(), 4);
  CHECK(m.Prob(0, Ctx(7)) == 0.25);
  CHECK(m.Bucket(Ctx(7)) == 4);
  CHECK(SumDistribution(m, Ctx(7)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("component probability: interpolation arithmetic") {
  ComponentModel m(OneLevel(), 2);
  EventCounts events;
  events.Add(Ctx(1), 0, 3.0);
  events.Add(Ctx(1), 1, 1.0);
  m.SetCounts(events);
  const BucketId b = m.Bucket(Ctx(1));
  CHECK(b == CountRange(4.0));
  m.SetWeights({{b, {0.5, 0.5}}});
  CHECK(m.Prob(0, Ctx(1)) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(m.Prob(1, Ctx(1)) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("count ranges and buckets") {
  CHECK(CountRange(1) == 0);
  CHECK(CountRange(2) == 1);
  CHECK(CountRange(4) == 1);
  CHECK(CountRange(5) == 2);
  CHECK(CountRange(15) == 2);
  CHECK(CountRange(16) == 3);
  ComponentModel m({{"a", "b"}, {{0, 1}, {0}, {}}}, 3);
  EventCounts e;
  e.Add(Ctx(1, 1), 0, 20.0);
  e.Add(Ctx(1, 2), 1, 1.0);
  m.SetCounts(e);
  CHECK(m.Bucket(Ctx(1, 1)) == 3);
  CHECK(m.Bucket(Ctx(1, 2)) == 0);
  CHECK(m.Bucket(Ctx(1, 3)) == 4 + CountRange(21.0));
  CHECK(m.FirstSeenLevel(m.Bucket(Ctx(1, 3))) == 1);
}

TEST_CASE("component distributions sum to one for random models") {
  slm_test::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    ComponentModel m = RandomComponent(rng);
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 4; ++b) {
        const double total = SumDistribution(m, Ctx(a, b));
        CHECK(std::abs(total - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("component file round trip") {
  slm_test::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    ComponentModel m = RandomComponent(rng);
    std::stringstream s;
    m.Write("x", s);
    const std::string first = s.str();
    LineReader reader(s);
    ComponentModel back = ComponentModel::Read("x", reader);
    CHECK(back == m);
    std::stringstream again;
    back.Write("x", again);
    CHECK(again.str() == first);
  }
}

TEST_CASE("count parameters") {
  ComponentModel empty(OneLevel(), 2);
  CHECK(CountParameters(empty) == 0);
  ComponentModel m(OneLevel(), 2);
  EventCounts e;
  e.Add(Ctx(1), 0);
  e.Add(Ctx(1), 1);
  e.Add(Ctx(2), 0);
  e.Add(Ctx(2), 0);
  m.SetCounts(e);
  CHECK(CountParameters(m) == 3);
}

TEST_CASE("legal actions") {
  const Vocabulary v = FlightVocab();
  WordParsePrefix one = ShiftWord(WordParsePrefix::Initial(v), v.Word("flight"), v.Tag("NN"));
  auto legal = LegalActions(one, v.num_labels(), ParserMode::kFull);
  CHECK(legal == std::vector<ParserAction>{ParserAction::Null()});

  WordParsePrefix two = TwoHeads(v);
  legal = LegalActions(two, v.num_labels(), ParserMode::kFull);
  std::set<ParserAction> expected{ParserAction::Null()};
  for (int l = 0; l < v.num_labels(); ++l) {
    expected.insert(ParserAction::AdjoinLeft(l));
    expected.insert(ParserAction::AdjoinRight(l));
  }
  CHECK(std::set<ParserAction>(legal.begin(), legal.end()) == expected);
  CHECK(legal.size() == expected.size());

  legal = LegalActions(two, true, v.num_labels(), ParserMode::kFull);
  CHECK(std::find(legal.begin(), legal.end(), ParserAction::Null()) == legal.end());
  CHECK(legal.size() == 2u * v.num_labels());

  legal = LegalActions(one, true, v.num_labels(), ParserMode::kFull);
  CHECK(legal == std::vector<ParserAction>{ParserAction::Null()});

  legal = LegalActions(two, v.num_labels(), ParserMode::kNullOnly);
  CHECK(legal == std::vector<ParserAction>{ParserAction::Null()});
  legal = LegalActions(two, true, v.num_labels(), ParserMode::kNullOnly);
  CHECK(legal == std::vector<ParserAction>{ParserAction::AdjoinLeft(0)});
}

TEST_CASE("the root label is reserved for the final adjoin") {
  Vocabulary v;
  v.AddWord("flight");
  v.AddWord("leaves");
  for (auto t : {"NN", "VB", "SE"}) v.AddTag(t);
  for (auto l : {"NP", "VP", "TOP"}) v.AddLabel(l);
  const int32_t top = v.RootLabel();
  REQUIRE(top == 2);
  const ParserAction top_left = ParserAction::AdjoinLeft(top);

  const WordParsePrefix two = TwoHeads(v);
  auto legal = LegalActions(two, v, ParserMode::kFull);
  CHECK(legal.size() == 5);
  CHECK(std::find(legal.begin(), legal.end(), top_left) == legal.end());
  CHECK_THROWS_AS(ApplyAction(two, top_left, v, ParserMode::kFull), Error);

  WordParsePrefix end = ApplyAction(two, ParserAction::Null(), v, ParserMode::kFull);
  end = ShiftWord(end, Vocabulary::kEos, v.Tag(kSentenceEndTag));
  REQUIRE(end.open_fragments() == 3);
  legal = LegalActions(end, v, ParserMode::kFull);
  CHECK(legal.size() == 4);
  CHECK(std::find(legal.begin(), legal.end(), top_left) == legal.end());

  end = ApplyAction(end, ParserAction::AdjoinRight(0), v, ParserMode::kFull);
  CHECK(LegalActions(end, v, ParserMode::kFull) == std::vector<ParserAction>{top_left});
  end = ApplyAction(end, top_left, v, ParserMode::kFull);
  CHECK(LegalActions(end, v, ParserMode::kFull) == std::vector<ParserAction>{ParserAction::Null()});

  v.CollapseLabels();
  CHECK(v.RootLabel() == kNoSymbol);
}

TEST_CASE("stripping the sentence end") {
  Vocabulary v;
  v.AddWord("a");
  v.AddWord("b");
  for (auto t : {"T", "SE"}) v.AddTag(t);
  for (auto l : {"X", "TOP"}) v.AddLabel(l);
  const CategoryId t = v.Tag("T"), se = v.Tag("SE"), x = v.Label("X"), top = v.Label("TOP");
  const ParseTreePtr a = MakeLeaf(v.Word("a"), t), b = MakeLeaf(v.Word("b"), t);
  const ParseTreePtr end = MakeLeaf(Vocabulary::kEos, se);
  const ParseTreePtr ab = MakeInternal(a, b, true, x);
  CHECK(StripSentenceEnd(MakeInternal(ab, end, true, top)) == ab);
  const ParseTreePtr deep = MakeInternal(a, MakeInternal(b, end, false, x), true, top);
  CHECK(FormatTree(*StripSentenceEnd(deep), v) == "(TOP (T a) (T b))");
  CHECK(StripSentenceEnd(end) == nullptr);
  CHECK(StripSentenceEnd(a) == a);
}

TEST_CASE("apply action builds heads and fragments") {
  const Vocabulary v = FlightVocab();
  const WordParsePrefix two = TwoHeads(v);
  WordParsePrefix right = ApplyAction(two, ParserAction::AdjoinRight(v.LabelIndex(v.Label("VP"))),
                                      v, ParserMode::kFull);
  CHECK(right.h0() == ExposedHead{v.Word("leaves"), v.Label("VP")});
  CHECK(right.heads.size() == 2);
  CHECK(right.fragments.size() == right.heads.size());
  CHECK(FormatTree(*right.fragments.back(), v) == "(VP (NN flight) (VB leaves))");

  WordParsePrefix left = ApplyAction(two, ParserAction::AdjoinLeft(v.LabelIndex(v.Label("NP"))),
                                     v, ParserMode::kFull);
  CHECK(left.h0() == ExposedHead{v.Word("flight"), v.Label("NP")});

  WordParsePrefix null = ApplyAction(two, ParserAction::Null(), v, ParserMode::kFull);
  CHECK(null.heads == two.heads);
  CHECK(null.closed);

  WordParsePrefix one = ShiftWord(WordParsePrefix::Initial(v), v.Word("flight"), v.Tag("NN"));
  CHECK_THROWS_AS(ApplyAction(one, ParserAction::AdjoinLeft(0), v, ParserMode::kFull), Error);
  try {
    ApplyAction(one, ParserAction::AdjoinLeft(0), v, ParserMode::kFull);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIllegalAction);
  }
  CHECK_THROWS_AS(ApplyAction(two, ParserAction::AdjoinLeft(9), v, ParserMode::kFull), Error);
}

TEST_CASE("shift word") {
  const Vocabulary v = FlightVocab();
  WordParsePrefix p = WordParsePrefix::Initial(v);
  CHECK(p.heads.size() == 1);
  p = ShiftWord(p, v.Word("flight"), v.Tag("NN"));
  CHECK(p.heads.size() == 2);
  CHECK(p.h0() == ExposedHead{v.Word("flight"), v.Tag("NN")});
  CHECK_FALSE(p.closed);
  CHECK_THROWS_AS(ShiftWord(p, v.Word("leaves"), v.Tag("VB")), Error);
  p = ApplyAction(p, ParserAction::Null(), v, ParserMode::kFull);
  p = ShiftWord(p, v.Word("leaves"), v.Tag("VB"));
  CHECK(p.heads.size() == 3);
  CHECK(p.h1() == ExposedHead{v.Word("flight"), v.Tag("NN")});
}

TEST_CASE("joint probability of a one-word sentence under uniform components") {
  Vocabulary v;
  v.AddWord("a");
  v.AddTag("T");
  v.AddLabel("L");
  StructuredLm model(v, ParserMode::kFull);
  CHECK(model.NumOutcomes(Component::kPredictor) == 3);
  CHECK(model.NumOutcomes(Component::kParser) == 3);
  const ParseDerivation d = TreeToDerivation(*MakeLeaf(v.Word("a"), 0), v);
  std::vector<TraceEntry> trace;
  const double lp = model.JointLogProb({v.Word("a")}, d, &trace);
  // P(a) * P(T) * [null forced] * P(</s>) * P(T) * P(adjoin | adjoins) * [null forced]
  CHECK(lp == doctest::Approx(std::log(1.0 / 3 * 1.0 / 3 * 0.5)).epsilon(1e-14));
  double sum = 0.0;
  for (const auto& e : trace) sum += e.logprob;
  CHECK(sum == doctest::Approx(lp).epsilon(1e-15));
  CHECK(trace.size() == 7);
}

TEST_CASE("sentence-end adjoins stay normalized when null dominates") {
  const Vocabulary v = FlightVocab();
  StructuredLm model(v, ParserMode::kFull);
  WordParsePrefix p = ApplyAction(TwoHeads(v), ParserAction::Null(), v, ParserMode::kFull);
  p = ShiftWord(p, Vocabulary::kEos, v.Tag("NN"));
  REQUIRE(p.at_sentence_end());

  ComponentModel& parser = model.mutable_component(Component::kParser);
  EventCounts events;
  events.Add(ParserContext(p), 0, 1000.0);
  parser.SetCounts(events);
  const BucketId bucket = parser.Bucket(ParserContext(p));
  std::vector<double> w(parser.num_levels() + 1, 0.0);
  w[0] = 1.0;
  w.back() = 1e-18;
  parser.SetWeights({{bucket, w}});
  REQUIRE(parser.Prob(0, ParserContext(p)) == 1.0);

  const auto legal = LegalActions(p, v.num_labels(), ParserMode::kFull);
  const auto probs = model.LegalActionProbs(p, legal);
  REQUIRE(legal.size() == 4);
  for (size_t i = 0; i < legal.size(); ++i) {
    CHECK(probs[i] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(model.ActionProb(p, legal[i]) == probs[i]);
  }
}

TEST_CASE("joint probability rejects invalid derivations") {
  Vocabulary v;
  v.AddWord("a");
  v.AddTag("T");
  v.AddLabel("L");
  StructuredLm model(v, ParserMode::kFull);
  ParseDerivation d = TreeToDerivation(*MakeLeaf(v.Word("a"), 0), v);
  CHECK_THROWS_AS(model.JointLogProb({v.Word("a"), v.Word("a")}, d), Error);
  d.positions.back().actions.pop_back();
  try {
    model.JointLogProb({v.Word("a")}, d);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidDerivation);
  }
}

TEST_CASE("joint probability equals the replayed accumulation") {
  const StructuredLm model = slm_test::RandomToyModel(4, 2, 2, 60, 9);
  const std::vector<WordId> words{3, 5, 4};
  for (const auto& parse : slm_test::EnumerateCompleteParses(model, words)) {
    const double lp = model.JointLogProb(words, parse.derivation);
    CHECK(std::abs(lp - parse.logprob) <= 1e-12);
  }
}

TEST_CASE("exhaustive derivations are exactly all binary trees") {
  const StructuredLm model = slm_test::RandomToyModel(2, 1, 2, 20, 4);
  for (int n = 0; n <= 5; ++n) {
    std::vector<WordId> words;
    for (int i = 0; i < n; ++i) words.push_back(3 + (i % 2));
    std::set<ParseDerivation> reached;
    ExpandAll(model, words, 0, WordParsePrefix::Initial(model.vocab()), &reached);
    std::set<ParseDerivation> enumerated;
    for (const auto& p : slm_test::EnumerateCompleteParses(model, words))
      enumerated.insert(p.derivation);
    CHECK(reached.size() == slm_test::ClosedFormCompleteCount(n, 1, 2));
    CHECK(reached == enumerated);
  }
}

TEST_CASE("adjoins inherit a child's headword") {
  const StructuredLm model = slm_test::RandomToyModel(3, 2, 2, 20, 6);
  const std::vector<WordId> words{3, 4, 5};
  for (const auto& parse : slm_test::EnumerateCompleteParses(model, words)) {
    WordParsePrefix p = WordParsePrefix::Initial(model.vocab());
    for (const auto& pos : parse.derivation.positions) {
      p = ShiftWord(p, pos.word, pos.tag);
      for (const auto& a : pos.actions) {
        const ExposedHead left = p.heads.size() >= 2 ? p.heads[p.heads.size() - 2] : ExposedHead{};
        const ExposedHead right = p.h0();
        p = ApplyAction(p, a, model.vocab(), model.mode());
        if (a.is_null()) continue;
        CHECK(p.h0().word == (a.kind == ParserAction::Kind::kAdjoinLeft ? left.word : right.word));
      }
    }
  }
}

TEST_CASE("model file round trip is byte identical") {
  const StructuredLm model = slm_test::RandomToyModel(5, 3, 2, 80, 12);
  std::stringstream s;
  model.Write(s);
  const std::string text = s.str();
  StructuredLm back = StructuredLm::Read(s);
  std::stringstream again;
  back.Write(again);
  CHECK(again.str() == text);
  std::istringstream bad("#slm-model 2\n");
  CHECK_THROWS_AS(StructuredLm::Read(bad), Error);
}

}  // TEST_SUITE
