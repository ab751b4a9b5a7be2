#ifndef SLM_SLM_MODEL_H_
#define SLM_SLM_MODEL_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "slm/component_model.h"
#include "slm/parse_state.h"
#include "slm/vocabulary.h"

namespace slm {

enum class Component { kPredictor = 0, kTagger = 1, kParser = 2 };
inline constexpr int kNumComponents = 3;
const char* ComponentName(Component c);

// Back-off orders (most specific first):
//   predictor, parser: (h0, h-1) -> (h0) -> (h0.label) -> ()
//   tagger:            (w, h0.label, h-1.label) -> (w) -> ()
ContextSchema PredictorSchema();
ContextSchema TaggerSchema();
ContextSchema ParserSchema();
ContextSchema CanonicalSchema(Component c);

Context PredictorContext(const WordParsePrefix& prefix);
Context TaggerContext(const WordParsePrefix& prefix, WordId word);
Context ParserContext(const WordParsePrefix& prefix);

// Predictor outcomes exclude <s>, which is never predicted.
inline int32_t WordOutcome(WordId w) { return w - 1; }
inline WordId OutcomeWord(int32_t outcome) { return outcome + 1; }

// Visits every event of a derivation in order, with the prefix the event is
// conditioned on. Throws Error(kInvalidDerivation) if replay fails.
using EventVisitor = std::function<void(Component component, const Context& context,
                                        int32_t outcome, const WordParsePrefix& before)>;
void ForEachEvent(const ParseDerivation& derivation, const Vocabulary& vocab, ParserMode mode,
                  const EventVisitor& visit);

struct TraceEntry {
  Component component;
  int32_t outcome;
  double logprob;
};

// The structured language model: word predictor, tagger and parser, each a
// deleted-interpolation component model, over a shared vocabulary.
class StructuredLm {
 public:
  StructuredLm() = default;
  StructuredLm(Vocabulary vocab, ParserMode mode);

  const Vocabulary& vocab() const { return vocab_; }
  ParserMode mode() const { return mode_; }

  const ComponentModel& component(Component c) const { return components_[static_cast<int>(c)]; }
  ComponentModel& mutable_component(Component c) { return components_[static_cast<int>(c)]; }
  int32_t NumOutcomes(Component c) const;

  // P(w | h0, h-1).
  double WordProb(const WordParsePrefix& prefix, WordId word) const;
  // P(t | w, h0.label, h-1.label).
  double TagProb(const WordParsePrefix& prefix, WordId word, CategoryId tag) const;
  void TagDistribution(const WordParsePrefix& prefix, WordId word, std::span<double> out) const;
  // P(action | h0, h-1), renormalized over the legal actions; forced actions
  // have probability one. Zero for illegal actions.
  double ActionProb(const WordParsePrefix& prefix, const ParserAction& action) const;
  // Probabilities aligned with LegalActions(prefix, ...).
  std::vector<double> LegalActionProbs(const WordParsePrefix& prefix,
                                       const std::vector<ParserAction>& legal) const;

  // log P(W, T) for a complete derivation of `words` (without markers).
  double JointLogProb(const std::vector<WordId>& words, const ParseDerivation& derivation,
                      std::vector<TraceEntry>* trace = nullptr) const;

  // Model provenance, reported in the tables.
  std::string source = "unknown";
  int iteration = 0;
  uint64_t split_seed = 0;
  bool pool_check = true;

  void Write(std::ostream& out) const;
  static StructuredLm Read(std::istream& in);
  void Save(const std::string& path) const;
  static StructuredLm Load(const std::string& path);

 private:
  Vocabulary vocab_;
  ParserMode mode_ = ParserMode::kFull;
  std::vector<ComponentModel> components_;
};

size_t CountParameters(const ComponentModel& model);

}  // namespace slm

#endif  // SLM_SLM_MODEL_H_
