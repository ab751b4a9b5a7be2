#include "slm/slm_model.h"

#include <cmath>
#include <sstream>

#include "slm/error.h"
#include "slm/text_io.h"

namespace slm {

const char* ComponentName(Component c) {
  switch (c) {
    case Component::kPredictor: return "predictor";
    case Component::kTagger: return "tagger";
    case Component::kParser: return "parser";
  }
  return "?";
}

ContextSchema PredictorSchema() {
  return {{"h0.word", "h0.cat", "h-1.word", "h-1.cat"}, {{0, 1, 2, 3}, {0, 1}, {1}, {}}};
}

ContextSchema TaggerSchema() {
  return {{"w", "h0.cat", "h-1.cat"}, {{0, 1, 2}, {0}, {}}};
}

ContextSchema ParserSchema() { return PredictorSchema(); }

ContextSchema CanonicalSchema(Component c) {
  switch (c) {
    case Component::kPredictor: return PredictorSchema();
    case Component::kTagger: return TaggerSchema();
    case Component::kParser: return ParserSchema();
  }
  return {};
}

Context PredictorContext(const WordParsePrefix& prefix) {
  const ExposedHead& h0 = prefix.h0();
  const ExposedHead h1 = prefix.h1();
  Context c;
  c.fields = {h0.word, h0.category, h1.word, h1.category};
  return c;
}

Context TaggerContext(const WordParsePrefix& prefix, WordId word) {
  Context c;
  c.fields = {word, prefix.h0().category, prefix.h1().category, kUnusedField};
  return c;
}

Context ParserContext(const WordParsePrefix& prefix) { return PredictorContext(prefix); }

void ForEachEvent(const ParseDerivation& derivation, const Vocabulary& vocab, ParserMode mode,
                  const EventVisitor& visit) {
  WordParsePrefix p = WordParsePrefix::Initial(vocab);
  try {
    for (const auto& pos : derivation.positions) {
      if (pos.actions.empty() || !pos.actions.back().is_null())
        throw Error(ErrorCode::kInvalidDerivation, "position does not end with null");
      if (pos.word <= Vocabulary::kBos || pos.word >= vocab.num_words())
        throw Error(ErrorCode::kInvalidDerivation, "word id out of range");
      if (!vocab.IsTag(pos.tag))
        throw Error(ErrorCode::kInvalidDerivation, "tag id out of range");
      visit(Component::kPredictor, PredictorContext(p), WordOutcome(pos.word), p);
      visit(Component::kTagger, TaggerContext(p, pos.word), pos.tag, p);
      p = ShiftWord(p, pos.word, pos.tag);
      for (const auto& a : pos.actions) {
        visit(Component::kParser, ParserContext(p), a.Code(), p);
        p = ApplyAction(p, a, vocab, mode);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidDerivation) throw;
    throw Error(ErrorCode::kInvalidDerivation, std::string("replay failed: ") + e.what());
  }
}

StructuredLm::StructuredLm(Vocabulary vocab, ParserMode mode)
    : vocab_(std::move(vocab)), mode_(mode) {
  for (int c = 0; c < kNumComponents; ++c) {
    auto comp = static_cast<Component>(c);
    components_.emplace_back(CanonicalSchema(comp), NumOutcomes(comp));
  }
}

int32_t StructuredLm::NumOutcomes(Component c) const {
  switch (c) {
    case Component::kPredictor: return vocab_.num_words() - 1;
    case Component::kTagger: return vocab_.num_tags();
    case Component::kParser: return ParserAction::NumCodes(vocab_.num_labels());
  }
  return 0;
}

double StructuredLm::WordProb(const WordParsePrefix& prefix, WordId word) const {
  if (word <= Vocabulary::kBos || word >= vocab_.num_words()) return 0.0;
  return component(Component::kPredictor).Prob(WordOutcome(word), PredictorContext(prefix));
}

double StructuredLm::TagProb(const WordParsePrefix& prefix, WordId word, CategoryId tag) const {
  if (!vocab_.IsTag(tag)) return 0.0;
  return component(Component::kTagger).Prob(tag, TaggerContext(prefix, word));
}

void StructuredLm::TagDistribution(const WordParsePrefix& prefix, WordId word,
                                   std::span<double> out) const {
  component(Component::kTagger).Distribution(TaggerContext(prefix, word), out);
}

std::vector<double> StructuredLm::LegalActionProbs(
    const WordParsePrefix& prefix, const std::vector<ParserAction>& legal) const {
  std::vector<double> probs(legal.size(), 1.0);
  if (mode_ == ParserMode::kNullOnly || legal.size() <= 1) return probs;
  const ComponentModel& parser = component(Component::kParser);
  std::vector<double> dist(parser.num_outcomes());
  parser.Distribution(ParserContext(prefix), dist);
  // Sum the legal actions directly; 1 - P(excluded) cancels when null dominates.
  double norm = 0.0;
  for (const auto& a : legal) norm += dist[a.Code()];
  for (size_t i = 0; i < legal.size(); ++i)
    probs[i] = norm > 0.0 ? dist[legal[i].Code()] / norm : 0.0;
  return probs;
}

double StructuredLm::ActionProb(const WordParsePrefix& prefix, const ParserAction& action) const {
  const auto legal = LegalActions(prefix, vocab_, mode_);
  for (size_t i = 0; i < legal.size(); ++i) {
    if (legal[i] != action) continue;
    if (mode_ == ParserMode::kNullOnly || legal.size() == 1) return 1.0;
    return LegalActionProbs(prefix, legal)[i];
  }
  return 0.0;
}

double StructuredLm::JointLogProb(const std::vector<WordId>& words,
                                  const ParseDerivation& derivation,
                                  std::vector<TraceEntry>* trace) const {
  const auto& positions = derivation.positions;
  if (positions.size() != words.size() + 1 || positions.back().word != Vocabulary::kEos)
    throw Error(ErrorCode::kInvalidDerivation,
                "derivation does not cover the sentence followed by </s>");
  for (size_t i = 0; i < words.size(); ++i) {
    if (positions[i].word != words[i])
      throw Error(ErrorCode::kInvalidDerivation, "derivation words differ from the sentence");
  }
  double total = 0.0;
  WordParsePrefix last;
  ForEachEvent(derivation, vocab_, mode_,
               [&](Component c, const Context&, int32_t outcome, const WordParsePrefix& before) {
                 double p = 0.0;
                 switch (c) {
                   case Component::kPredictor:
                     p = WordProb(before, OutcomeWord(outcome));
                     break;
                   case Component::kTagger:
                     p = TagProb(before, positions[before.words.size() - 1].word, outcome);
                     break;
                   case Component::kParser:
                     p = ActionProb(before, ParserAction::FromCode(outcome));
                     break;
                 }
                 const double lp = std::log(p);
                 total += lp;
                 if (trace) trace->push_back({c, outcome, lp});
               });
  const WordParsePrefix final_prefix = Replay(derivation, vocab_, mode_);
  if (!final_prefix.complete())
    throw Error(ErrorCode::kInvalidDerivation, "derivation does not end in a complete parse");
  return total;
}

void StructuredLm::Write(std::ostream& out) const {
  out << "#slm-model 1\n";
  out << "source " << source << '\n';
  out << "iteration " << iteration << '\n';
  out << "parser-mode " << (mode_ == ParserMode::kFull ? "full" : "null-only") << '\n';
  out << "split-seed " << split_seed << '\n';
  out << "pool-check " << (pool_check ? 1 : 0) << '\n';
  vocab_.Write(out);
  for (int c = 0; c < kNumComponents; ++c)
    components_[c].Write(ComponentName(static_cast<Component>(c)), out);
}

StructuredLm StructuredLm::Read(std::istream& in) {
  LineReader reader(in);
  auto header = reader.Tokens();
  if (header.size() != 2 || header[0] != "#slm-model")
    reader.Fail("not an SLM model file");
  if (header[1] != "1") reader.Fail("unsupported model file version " + header[1]);
  StructuredLm model;
  auto args = reader.Expect("source");
  if (args.size() != 1) reader.Fail("malformed 'source' line");
  model.source = args[0];
  args = reader.Expect("iteration");
  if (args.size() != 1) reader.Fail("malformed 'iteration' line");
  model.iteration = static_cast<int>(ParseInt(args[0], reader.line_number()));
  args = reader.Expect("parser-mode");
  if (args.size() != 1 || (args[0] != "full" && args[0] != "null-only"))
    reader.Fail("malformed 'parser-mode' line");
  model.mode_ = args[0] == "full" ? ParserMode::kFull : ParserMode::kNullOnly;
  args = reader.Expect("split-seed");
  if (args.size() != 1) reader.Fail("malformed 'split-seed' line");
  model.split_seed = static_cast<uint64_t>(ParseInt(args[0], reader.line_number()));
  args = reader.Expect("pool-check");
  if (args.size() != 1) reader.Fail("malformed 'pool-check' line");
  model.pool_check = args[0] == "1";
  model.vocab_ = Vocabulary::Read(reader);
  for (int c = 0; c < kNumComponents; ++c) {
    auto comp = static_cast<Component>(c);
    model.components_.push_back(ComponentModel::Read(ComponentName(comp), reader));
    if (model.components_.back().num_outcomes() != model.NumOutcomes(comp))
      reader.Fail(std::string(ComponentName(comp)) + " outcome space does not match vocabulary");
  }
  return model;
}

void StructuredLm::Save(const std::string& path) const {
  auto out = OpenOutput(path);
  Write(out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

StructuredLm StructuredLm::Load(const std::string& path) {
  auto in = OpenInput(path);
  return Read(in);
}

size_t CountParameters(const ComponentModel& model) { return model.NumParameters(); }

}  // namespace slm
