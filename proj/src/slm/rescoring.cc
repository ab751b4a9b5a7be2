#include "slm/rescoring.h"

#include <cmath>

#include "slm/error.h"
#include "slm/parallel.h"

namespace slm {

NBestScores::NBestScores(const std::vector<NBestList>& lists, const StructuredLm* slm,
                         const TrigramModel* trigram, const RewriteTable* rules,
                         const BeamOptions& beam, int threads)
    : lists_(lists), has_slm_(slm != nullptr), has_trigram_(trigram != nullptr) {
  if (slm && trigram && !slm->vocab().SameWords(trigram->vocab()))
    throw Error(ErrorCode::kVocabularyMismatch,
                "trigram and structured model use different word vocabularies");
  const Vocabulary* vocab = slm ? &slm->vocab() : trigram ? &trigram->vocab() : nullptr;
  if (has_slm_) slm_probs_.resize(lists.size());
  if (has_trigram_) trigram_probs_.resize(lists.size());
  if (vocab == nullptr) return;
  ParallelFor(lists.size(), threads, [&](size_t i) {
    for (const auto& h : lists[i].hypotheses) {
      const Sentence words = rules ? Retokenize(h.words, *rules) : h.words;
      const IndexedSentence ids = MapToVocabulary(words, *vocab);
      if (slm) slm_probs_[i].push_back(SearchSentence(*slm, ids, beam).word_probs);
      if (trigram) trigram_probs_[i].push_back(trigram->SentenceProbs(ids));
    }
  });
}

std::vector<double> NBestScores::LmLogProbs(size_t i, double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  if (lambda < 1.0 && !has_slm_)
    throw Error(ErrorCode::kInvalidArgument, "lambda < 1 needs a structured model");
  const NBestList& list = lists_.at(i);
  std::vector<double> out(list.hypotheses.size(), 0.0);
  for (size_t h = 0; h < out.size(); ++h) {
    if (has_trigram_) {
      const auto& tri = trigram_probs_[i][h];
      for (size_t k = 0; k < tri.size(); ++k) {
        const double p = lambda == 1.0 ? tri[k] : InterpProb(lambda, tri[k], slm_probs_[i][h][k]);
        out[h] += std::log(p);
      }
      continue;
    }
    double slm = 0.0;
    if (has_slm_) {
      for (double p : slm_probs_[i][h]) slm += std::log(p);
    }
    const double external = list.hypotheses[h].lm;
    if (lambda == 1.0) {
      out[h] = external;
    } else if (lambda == 0.0) {
      out[h] = slm;
    } else {
      const double a = std::log(lambda) + external;
      const double b = std::log(1.0 - lambda) + slm;
      const double m = std::max(a, b);
      out[h] = m + std::log(std::exp(a - m) + std::exp(b - m));
    }
  }
  return out;
}

std::vector<size_t> NBestScores::Select(double lambda, const RescoreWeights& weights) const {
  std::vector<size_t> chosen;
  chosen.reserve(lists_.size());
  for (size_t i = 0; i < lists_.size(); ++i)
    chosen.push_back(Rescore(lists_[i], LmLogProbs(i, lambda), weights));
  return chosen;
}

std::map<std::string, Sentence> Selections(const std::vector<NBestList>& lists,
                                           const std::vector<size_t>& chosen) {
  std::map<std::string, Sentence> out;
  for (size_t i = 0; i < lists.size(); ++i) out[lists[i].id] = lists[i].hypotheses.at(chosen[i]).words;
  return out;
}

std::map<std::string, Sentence> References(const std::vector<NBestList>& lists) {
  std::map<std::string, Sentence> out;
  for (const auto& l : lists) out[l.id] = l.reference;
  return out;
}

}  // namespace slm
