#ifndef SLM_SEARCH_H_
#define SLM_SEARCH_H_

#include <limits>
#include <vector>

#include "slm/parse_state.h"
#include "slm/slm_model.h"

namespace slm {

struct BeamOptions {
  int max_entries = 10;    // per stack; 0 keeps everything
  double log_width = 6.9;  // ln 1000; infinity keeps everything

  static BeamOptions Unlimited() {
    return {0, std::numeric_limits<double>::infinity()};
  }
};

// Orders hypotheses best first: higher log-probability, then the
// lexicographically smaller derivation.
bool BetterHypothesis(const WordParsePrefix& a, const WordParsePrefix& b);

// Keeps hypotheses within log_width of the best and at most max_entries.
void PruneStack(std::vector<WordParsePrefix>* stack, const BeamOptions& options);

// Synchronous multi-stack search state: the set S_k of parses of the word
// prefix w_0..w_k that survived pruning, each closed by null. While a word
// position is being parsed, hypotheses are stratified into stacks by the
// number of parser operations taken at that position.
class StackSet {
 public:
  StackSet(const StructuredLm& model, const BeamOptions& options);

  int position() const { return position_; }
  const std::vector<WordParsePrefix>& hypotheses() const { return hypotheses_; }
  bool finished() const { return finished_; }

  // rho(W_k, T_k) = P(W_k T_k) / sum over S_k.
  std::vector<double> Posteriors() const;

  // P(next | W_k) = sum over S_k of P(next | W_k T_k) * rho(W_k, T_k).
  double LmProb(WordId next) const;

  // Predicts `next`, expands every tag and every legal parser continuation
  // up to the closing null, pruning each stack. Throws
  // Error(kSearchFailure) if nothing survives.
  void Advance(WordId next);

  // Number of parser-operation stacks used by the last Advance.
  int last_stack_count() const { return last_stack_count_; }

 private:
  const StructuredLm& model_;
  BeamOptions options_;
  int position_ = 0;
  bool finished_ = false;
  int last_stack_count_ = 0;
  std::vector<WordParsePrefix> hypotheses_;
};

struct SentenceSearch {
  // P(w_k | W_{k-1}) for w_1..w_n and </s>.
  std::vector<double> word_probs;
  // Complete parses surviving the final stacks, best first.
  std::vector<WordParsePrefix> complete;
};

// Runs the search over `words` followed by </s>.
SentenceSearch SearchSentence(const StructuredLm& model, const std::vector<WordId>& words,
                              const BeamOptions& options);

struct BestParseResult {
  ParseTreePtr tree;
  double logprob = 0.0;
  ParseDerivation derivation;
};

// Highest-probability complete parse found by the search.
BestParseResult BestParse(const StructuredLm& model, const std::vector<WordId>& words,
                          const BeamOptions& options);

}  // namespace slm

#endif  // SLM_SEARCH_H_
