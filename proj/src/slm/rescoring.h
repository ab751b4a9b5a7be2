#ifndef SLM_RESCORING_H_
#define SLM_RESCORING_H_

#include <vector>

#include "slm/eval.h"
#include "slm/ngram.h"
#include "slm/search.h"
#include "slm/slm_model.h"
#include "slm/text.h"

namespace slm {

// Language-model probabilities of every n-best hypothesis under the
// structured model and/or the trigram, kept per word so that any lambda
// can be applied afterwards.
class NBestScores {
 public:
  // Either model may be null. Hypothesis words are retokenized with
  // `rules` (if given) before vocabulary mapping.
  NBestScores(const std::vector<NBestList>& lists, const StructuredLm* slm,
              const TrigramModel* trigram, const RewriteTable* rules, const BeamOptions& beam,
              int threads = 1);

  // Natural-log LM score per hypothesis of list `i` at the given trigram
  // weight. With a trigram the mixture is per word; otherwise the list's
  // own LM scores are mixed with the structured model's sentence
  // probability.
  std::vector<double> LmLogProbs(size_t i, double lambda) const;

  // Selected hypothesis index per list.
  std::vector<size_t> Select(double lambda, const RescoreWeights& weights) const;

  const std::vector<NBestList>& lists() const { return lists_; }

 private:
  const std::vector<NBestList>& lists_;
  bool has_slm_;
  bool has_trigram_;
  // [list][hypothesis][word]
  std::vector<std::vector<std::vector<double>>> slm_probs_;
  std::vector<std::vector<std::vector<double>>> trigram_probs_;
};

// Per-list selections as an id -> words map.
std::map<std::string, Sentence> Selections(const std::vector<NBestList>& lists,
                                           const std::vector<size_t>& chosen);
std::map<std::string, Sentence> References(const std::vector<NBestList>& lists);

}  // namespace slm

#endif  // SLM_RESCORING_H_
