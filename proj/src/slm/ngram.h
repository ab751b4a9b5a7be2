#ifndef SLM_NGRAM_H_
#define SLM_NGRAM_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "slm/component_model.h"
#include "slm/estimation.h"
#include "slm/search.h"
#include "slm/slm_model.h"
#include "slm/text.h"
#include "slm/vocabulary.h"

namespace slm {

// (w-1, w-2) -> (w-1) -> ()
ContextSchema TrigramSchema();
// Context for predicting position k of <s> w_1 .. w_n </s> (1 <= k <= n+1).
Context TrigramContext(const IndexedSentence& words, size_t k);

class TrigramModel {
 public:
  TrigramModel() = default;
  TrigramModel(Vocabulary vocab, ComponentModel model);

  const Vocabulary& vocab() const { return vocab_; }
  const ComponentModel& component() const { return model_; }

  // P(word | prev1, prev2); prev2 is kNoSymbol right after <s>.
  double Prob(WordId word, WordId prev1, WordId prev2) const;
  // P(w_k | history) for w_1..w_n and </s>.
  std::vector<double> SentenceProbs(const IndexedSentence& words) const;

  uint64_t split_seed = 0;
  bool pool_check = true;

  void Write(std::ostream& out) const;
  static TrigramModel Read(std::istream& in);
  void Save(const std::string& path) const;
  static TrigramModel Load(const std::string& path);

 private:
  Vocabulary vocab_;
  ComponentModel model_;
};

// Deleted-interpolation trigram with the same bucketing and check split as
// the structured model's components.
TrigramModel TrainTrigram(const std::vector<IndexedSentence>& sentences, const Vocabulary& vocab,
                          uint64_t split_seed, bool pool_check = true,
                          const WeightEstimationOptions& options = {});

// lambda * trigram + (1 - lambda) * slm; the endpoints return the chosen
// component unchanged.
double InterpProb(double lambda, double trigram_prob, double slm_prob);

// Per-word probabilities of both models for a set of sentences.
struct ComponentProbs {
  std::vector<std::vector<double>> trigram;  // empty when not computed
  std::vector<std::vector<double>> slm;      // empty when not computed
};

class InterpolatedLm {
 public:
  // Either model may be null if lambda selects only the other one. Throws
  // Error(kVocabularyMismatch) if the word vocabularies differ.
  InterpolatedLm(const TrigramModel* trigram, const StructuredLm* slm, double lambda,
                 BeamOptions beam = {});

  double lambda() const { return lambda_; }
  std::vector<double> SentenceProbs(const IndexedSentence& words) const;

 private:
  const TrigramModel* trigram_;
  const StructuredLm* slm_;
  double lambda_;
  BeamOptions beam_;
};

// Runs each model at most once per sentence. A null model is skipped.
ComponentProbs ComputeComponentProbs(const TrigramModel* trigram, const StructuredLm* slm,
                                     const std::vector<IndexedSentence>& sentences,
                                     const BeamOptions& beam, int threads = 1);

// Perplexity of the lambda mixture from precomputed component probabilities.
double MixturePerplexity(const ComponentProbs& probs, double lambda);

// Grid argmin of held-out perplexity; ties go to the smaller lambda.
double TuneLambda(const ComponentProbs& probs, const std::vector<double>& grid);
double TuneLambda(const TrigramModel& trigram, const StructuredLm& slm,
                  const std::vector<IndexedSentence>& held_out, const std::vector<double>& grid,
                  const BeamOptions& beam = {}, int threads = 1);

}  // namespace slm

#endif  // SLM_NGRAM_H_
