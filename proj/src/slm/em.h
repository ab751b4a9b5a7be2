#ifndef SLM_EM_H_
#define SLM_EM_H_

#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "slm/estimation.h"
#include "slm/search.h"
#include "slm/slm_model.h"
#include "slm/text.h"

namespace slm {

struct EmOptions {
  int nbest = 10;
  BeamOptions beam;
  int threads = 1;
  WeightEstimationOptions weights;
};

struct EStepResult {
  CountSplit counts;
  // Sum over sentences of log of the summed joint probability of the
  // N-best support.
  double log_likelihood = 0.0;
  // Sum of log P(w_k | W_{k-1}) from the search, </s> included.
  double lm_log_prob = 0.0;
  size_t predicted_tokens = 0;
  size_t skipped = 0;
  // Per sentence N-best derivations, best first; empty when skipped.
  std::vector<std::vector<ParseDerivation>> support;

  double perplexity() const;
};

// Searches each sentence, keeps up to `nbest` complete parses and adds their
// events weighted by the posterior over that set. Sentences where the
// search fails are skipped with a warning.
EStepResult EStep(const StructuredLm& model, const std::vector<IndexedSentence>& sentences,
                  const EmOptions& options);

// Same accumulation over fixed derivations rescored under `model`; no
// search is run and lm_log_prob is left at zero.
EStepResult FrozenEStep(const StructuredLm& model, const std::vector<IndexedSentence>& sentences,
                        const std::vector<std::vector<ParseDerivation>>& support,
                        const EmOptions& options);

// Re-estimates every component from fractional counts.
StructuredLm MStep(const StructuredLm& model, const CountSplit& counts,
                   const WeightEstimationOptions& options = {});

struct IterationRecord {
  int iteration = 0;
  double train_ppl = 0.0;
  double log_likelihood = 0.0;
  // Likelihood of this iteration's support under the next model; NaN on
  // the last row.
  double next_support_log_likelihood = 0.0;
  size_t parameters[kNumComponents] = {0, 0, 0};
  size_t skipped = 0;
};

struct TrainOptions {
  int iterations = 13;
  EmOptions em;
  // Called after every E-step with the model it ran under.
  std::function<void(const StructuredLm&, const EStepResult&)> observer;
};

StructuredLm Train(const StructuredLm& initial, const std::vector<IndexedSentence>& sentences,
                   const TrainOptions& options, std::vector<IterationRecord>* trace = nullptr);

// Tab-separated metrics with a header row.
void WriteTrace(std::ostream& out, const std::vector<IterationRecord>& trace);

}  // namespace slm

#endif  // SLM_EM_H_
